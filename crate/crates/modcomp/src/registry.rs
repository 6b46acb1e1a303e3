//! Catalogue of experiment kinds and their parameters for `modcomp list`.

use serde::Serialize;

use crate::config::ExperimentKind;

#[derive(Debug, Clone, Serialize)]
pub struct Parameter {
    pub key: &'static str,
    pub kind: &'static str,
    /// None when the key is required.
    pub default: Option<&'static str>,
    pub description: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct KindInfo {
    pub kind: &'static str,
    pub section: &'static str,
    pub description: &'static str,
    pub outputs: &'static [&'static str],
    pub parameters: Vec<Parameter>,
}

const fn req(key: &'static str, kind: &'static str, description: &'static str) -> Parameter {
    Parameter { key, kind, default: None, description }
}

const fn opt(key: &'static str, kind: &'static str, default: &'static str, description: &'static str) -> Parameter {
    Parameter { key, kind, default: Some(default), description }
}

pub fn kinds() -> Vec<KindInfo> {
    ExperimentKind::ALL.iter().map(|k| info(*k)).collect()
}

pub fn info(kind: ExperimentKind) -> KindInfo {
    let (description, outputs, parameters) = match kind {
        ExperimentKind::Weights => (
            "Young inequality, conjugate, weight conditions, BMM and small-power checks for a subadditive weight",
            &["weights.csv", "conjugate.tsv", "small_power.tsv"][..],
            vec![
                req("weight", "weight name", "gevrey:<s>, logpower:<q> or linear"),
                opt("checks", "list", "[\"young\"]", "any of young, conjugate, conditions, bmm, small_power"),
                opt("young_j_max", "integer", "50", "largest j in the Young inequality"),
                opt("young_m_max", "integer", "50", "largest m in the Young inequality"),
                opt("conjugate_samples", "integer", "100", "samples of y in [1/s, 100]"),
                opt("conjugate_tolerance", "float", "1e-8", "relative tolerance of the conjugate comparison"),
                opt("bmm_candidates", "list of floats", "[1, 2, 4, 8, 16]", "candidate constants H"),
                opt("small_power_exponent", "float", "0.5", "exponent a in omega(x^a)/omega(x)"),
            ],
        ),
        ExperimentKind::StftIdentities => (
            "Orthogonality relations and the Rihaczek STFT identity",
            &["identities.csv", "stft.bin"][..],
            vec![
                req("grid.half_width", "float", "Riemann-sum grid is [-L, L)"),
                req("grid.points", "power of two", "grid size"),
                opt("orthogonality", "bool", "true", "run the ten orthogonality quadruples"),
                opt("rihaczek_points", "integer", "3", "probe points per coordinate (0 skips)"),
                opt("rihaczek_extent", "float", "2", "probe box [-e, e]^4"),
                opt("tolerance", "float", "1e-5", "absolute residual tolerance"),
                opt("dump_stft", "bool", "false", "write the first STFT as a binary dump"),
            ],
        ),
        ExperimentKind::SymbolDecay => (
            "Decay ratios of the four-dimensional STFT of exp(i phi(x) y) with stability under grid doubling",
            &["decay.csv", "decay.tsv", "symbol.bin"][..],
            vec![
                req("map", "map table", "type = zero | sine | cosine | bump | translation"),
                req("grid.z1 / grid.z2", "axis", "centre axes {half_width, points}"),
                req("grid.patch", "axis", "integration patch; points a power of two"),
                opt("declared_b", "float", "map growth", "growth exponent used in zeta2 mode"),
                opt("window_width", "float", "1", "width of the Gaussian window"),
                opt("poly_orders", "list of integers", "[]", "polynomial orders N"),
                opt("poly_mode", "zeta1 | zeta2", "zeta1", "decay variable for the polynomial probes"),
                opt("exp", "table", "none", "{weight, order, mode, k_candidates} for the exponential probe"),
                opt("dump", "bool", "false", "store and dump the full array (memory_budget applies)"),
            ],
        ),
        ExperimentKind::DerivativeBounds => (
            "Smallest m in the ultradifferentiable derivative bound of the symbol, with finite-difference cross-checks",
            &["derivatives.csv"][..],
            vec![
                req("map", "map table", "perturbation map"),
                req("weight", "weight name", "weight omega"),
                req("n_max", "integer", "highest derivative order (at most 25)"),
                req("grid", "box", "{x_max, y_max, nx, ny}"),
                opt("ell", "float", "1", "parameter l of the bound"),
                opt("m_candidates", "list of floats", "[0, 1, 2, 4, 8, 16, 32]", "candidate m"),
                opt("fd_order", "integer", "6", "highest order compared with finite differences (0 skips)"),
                opt("fd_tolerance", "float", "1e-3", "relative tolerance of the comparison"),
            ],
        ),
        ExperimentKind::OperatorModel => (
            "Cauchy bound, plane-wave eigenrelation and product expansion of the model operator G(D)",
            &["operator.csv"][..],
            vec![
                req("truncation", "integer", "number K of factors"),
                req("order", "float", "Gevrey order s"),
                req("grid", "axis", "evaluation grid"),
                opt("m", "float", "ceil(m_G)", "constant in the Cauchy bound"),
                opt("cauchy_n_max", "integer", "40", "highest coefficient checked"),
                opt("eigen_count", "integer", "50", "number of plane-wave frequencies"),
                opt("eigen_extent", "float", "10", "frequencies span [-e, e]"),
                opt("eigen_tolerance", "float", "1e-10", "absolute residual tolerance"),
                opt("expansion", "table", "none", "{truncation, k_max, r_max, frequency, tolerance, ell}"),
            ],
        ),
        ExperimentKind::NormProbe => (
            "Modulation-space norm ratios of an operator over a shifted Gaussian family",
            &["ratios.csv", "summary.csv"][..],
            vec![
                req("operator", "identity | compose | kohn-nirenberg", "operator under test"),
                req("map", "map table", "perturbation map"),
                req("source / target", "weight table", "type = unit | poly | poly-loss | exp-isotropic | exp-split | loss"),
                req("p", "1 | 2 | \"inf\"", "modulation-space exponent"),
                req("family", "table", "{extent, points, width}"),
                req("grid", "tf grid", "{x, patch} axes"),
                opt("dimension", "1 | 2", "1", "dimension 2 uses separable maps and tensor families"),
                opt("k_candidates", "list of floats", "none", "sweep k of a loss source weight"),
                opt("window_width", "float", "1", "width of the Gaussian window"),
                opt("cap", "float", "10", "bound on max/median of the ratios"),
                opt("slope_max", "float", "0.01", "bound on the fitted log-ratio slope"),
            ],
        ),
    };
    KindInfo { kind: kind.name(), section: kind.section(), description, outputs, parameters }
}

pub fn render_text(kinds: &[KindInfo]) -> String {
    let mut out = String::new();
    for k in kinds {
        out.push_str(&format!("{}  [{}]\n    {}\n", k.kind, k.section, k.description));
        for p in &k.parameters {
            let default = p.default.map(|d| format!(" (default {d})")).unwrap_or_else(|| " (required)".into());
            out.push_str(&format!("    {:<22} {:<18} {}{}\n", p.key, p.kind, p.description, default));
        }
        out.push('\n');
    }
    out
}
