use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn modcomp(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcomp"))
        .args(args)
        .env("MODCOMP_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn files_with_extension(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

fn config_path(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

const MINIMAL: &str = r#"
[experiment]
kind = "weights"
name = "young"

[weights]
weight = "gevrey:2"
young_j_max = 50
young_m_max = 50
"#;

#[test]
fn minimal_weights_config_passes_with_one_csv() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "young.toml", MINIMAL);
    let res = modcomp(&["run", cfg.to_str().unwrap()], &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let csvs = files_with_extension(&out, "csv");
    assert_eq!(csvs.len(), 1);
    let text = fs::read_to_string(&csvs[0]).unwrap();
    assert!(text.starts_with("weight,check,parameter,value,bound,passed"));
    assert!(text.contains("gevrey:2,young"));
    assert!(out.join("young_manifest.json").exists());
}

#[test]
fn missing_grid_is_a_config_error_naming_the_key() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        "[experiment]\nkind = \"stft-identities\"\nname = \"bad\"\n\n[stft_identities]\northogonality = true\n",
    );
    let res = modcomp(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("grid"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn non_power_of_two_grid_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        "[experiment]\nkind = \"stft-identities\"\nname = \"bad\"\n\n[stft_identities]\ngrid = { half_width = 8.0, points = 1000 }\n",
    );
    let res = modcomp(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("stft_identities.grid"));
}

#[test]
fn negative_control_probe_fails_with_flagged_rows() {
    let tmp = TempDir::new().unwrap();
    let res = modcomp(&["run", &config_path("negative_control.toml")], tmp.path());
    assert_eq!(res.status.code(), Some(1), "{}", String::from_utf8_lossy(&res.stdout));
    let text = fs::read_to_string(tmp.path().join("negative_control_ratios.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,family_param_a,family_param_beta,ratio,source_norm,target_norm,flags"));
    assert_eq!(lines.clone().count(), 81);
    assert!(lines.any(|l| !l.ends_with(',')), "no row carries a flag");
}

#[test]
fn memory_budget_is_enforced() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "budget.toml",
        r#"
[experiment]
kind = "symbol-decay"
name = "budget"
memory_budget = 1024

[symbol_decay]
map = { type = "sine", amplitude = 0.3 }
poly_orders = [2]
dump = true

[symbol_decay.grid]
z1 = { half_width = 2.0, points = 4 }
z2 = { half_width = 2.0, points = 4 }
patch = { half_width = 4.0, points = 16 }
"#,
    );
    let res = modcomp(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("budget"));
}

#[test]
fn list_shows_six_kinds() {
    let tmp = TempDir::new().unwrap();
    let res = modcomp(&["list"], tmp.path());
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8_lossy(&res.stdout);
    for kind in ["weights", "stft-identities", "symbol-decay", "derivative-bounds", "operator-model", "norm-probe"] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{kind} missing");
    }
    let json = modcomp(&["list", "--json"], tmp.path());
    let value: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let kinds = value.as_array().unwrap();
    assert_eq!(kinds.len(), 6);
    assert!(kinds.iter().all(|k| !k["parameters"].as_array().unwrap().is_empty()));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let res = modcomp(&["frobnicate"], tmp.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("Usage"));
}

#[test]
fn dump_subcommand_prints_header() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "dump.toml",
        r#"
[experiment]
kind = "stft-identities"
name = "dumped"

[stft_identities]
grid = { half_width = 8.0, points = 256 }
orthogonality = false
rihaczek_points = 0
dump_stft = true
"#,
    );
    let res = modcomp(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let bin = tmp.path().join("dumped_stft.bin");
    let shown = modcomp(&["dump", bin.to_str().unwrap()], tmp.path());
    assert_eq!(shown.status.code(), Some(0));
    let text = String::from_utf8_lossy(&shown.stdout);
    assert!(text.contains("256"), "{text}");

    fs::write(tmp.path().join("junk.bin"), b"not a dump").unwrap();
    let bad = modcomp(&["dump", tmp.path().join("junk.bin").to_str().unwrap()], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    for config in ["young.toml", "identities.toml", "operator_model.toml", "derivative_bounds.toml"] {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        modcomp(&["run", &config_path(config)], a.path());
        modcomp(&["run", &config_path(config)], b.path());
        let csv_a = files_with_extension(a.path(), "csv");
        assert!(!csv_a.is_empty());
        for file in csv_a {
            let other = b.path().join(file.file_name().unwrap());
            assert_eq!(fs::read(&file).unwrap(), fs::read(&other).unwrap(), "{config}: {}", file.display());
        }
    }
}
