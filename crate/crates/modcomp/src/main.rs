use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modcomp::dump::Dump;
use modcomp::error::{EXIT_CHECK_FAILED, EXIT_USAGE};
use modcomp::{registry, run, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "modcomp", version, about = "Numerical experiments on composition operators in modulation spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides MODCOMP_OUT_DIR but not the config.
        #[arg(long, env = "MODCOMP_OUT_DIR")]
        out_dir: Option<PathBuf>,
    },
    /// List experiment kinds and their parameters.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the header of a binary dump.
    Dump { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<i32, RunError> {
    match command {
        Command::Run { config, out_dir } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = cfg.output_dir(out_dir.as_deref());
            let outcome = run(&cfg, &dir)?;
            for c in &outcome.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("wrote {}", outcome.manifest.display());
            Ok(if outcome.passed { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::List { json } => {
            let kinds = registry::kinds();
            if json {
                println!("{}", serde_json::to_string_pretty(&kinds)?);
            } else {
                print!("{}", registry::render_text(&kinds));
            }
            Ok(0)
        }
        Command::Dump { file } => {
            println!("{}", Dump::read(&file)?.describe());
            Ok(0)
        }
    }
}
