//! Experiment configuration files: one TOML document per experiment with an
//! `[experiment]` header and a parameter section named after its kind.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use modcomp_core::grid::UniformGrid;
use modcomp_core::modnorm::Exponent;
use modcomp_core::operators::CompositionMap;
use modcomp_core::stft::TfGrid;
use modcomp_core::symbol::{PerturbationMap, ScalarMap};
use modcomp_core::weights::{SubadditiveWeight, TfWeight};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Weights,
    StftIdentities,
    SymbolDecay,
    DerivativeBounds,
    OperatorModel,
    NormProbe,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Weights,
        ExperimentKind::StftIdentities,
        ExperimentKind::SymbolDecay,
        ExperimentKind::DerivativeBounds,
        ExperimentKind::OperatorModel,
        ExperimentKind::NormProbe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Weights => "weights",
            ExperimentKind::StftIdentities => "stft-identities",
            ExperimentKind::SymbolDecay => "symbol-decay",
            ExperimentKind::DerivativeBounds => "derivative-bounds",
            ExperimentKind::OperatorModel => "operator-model",
            ExperimentKind::NormProbe => "norm-probe",
        }
    }

    /// Name of the parameter section in a config file.
    pub fn section(&self) -> &'static str {
        match self {
            ExperimentKind::Weights => "weights",
            ExperimentKind::StftIdentities => "stft_identities",
            ExperimentKind::SymbolDecay => "symbol_decay",
            ExperimentKind::DerivativeBounds => "derivative_bounds",
            ExperimentKind::OperatorModel => "operator_model",
            ExperimentKind::NormProbe => "norm_probe",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Header,
    pub weights: Option<WeightsParams>,
    pub stft_identities: Option<StftIdentitiesParams>,
    pub symbol_decay: Option<SymbolDecayParams>,
    pub derivative_bounds: Option<DerivativeBoundsParams>,
    pub operator_model: Option<OperatorModelParams>,
    pub norm_probe: Option<NormProbeParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub kind: ExperimentKind,
    /// Prefix of every output file.
    pub name: String,
    /// Output directory; falls back to MODCOMP_OUT_DIR, then `.`.
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_budget")]
    pub memory_budget: u64,
}

fn default_budget() -> u64 {
    1 << 30
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightCheck {
    Young,
    Conjugate,
    Conditions,
    Bmm,
    SmallPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsParams {
    pub weight: String,
    #[serde(default = "default_young_max")]
    pub young_j_max: u32,
    #[serde(default = "default_young_max")]
    pub young_m_max: u32,
    #[serde(default = "default_checks")]
    pub checks: Vec<WeightCheck>,
    /// Samples of y in [1/s, 100] for the conjugate comparison.
    #[serde(default = "default_conjugate_samples")]
    pub conjugate_samples: usize,
    #[serde(default = "default_conjugate_tolerance")]
    pub conjugate_tolerance: f64,
    #[serde(default = "default_bmm_candidates")]
    pub bmm_candidates: Vec<f64>,
    #[serde(default = "default_small_power")]
    pub small_power_exponent: f64,
}

fn default_young_max() -> u32 {
    50
}
fn default_checks() -> Vec<WeightCheck> {
    vec![WeightCheck::Young]
}
fn default_conjugate_samples() -> usize {
    100
}
fn default_conjugate_tolerance() -> f64 {
    1e-8
}
fn default_bmm_candidates() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0, 16.0]
}
fn default_small_power() -> f64 {
    0.5
}

/// Uniform axis [-half_width, half_width) with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub half_width: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn grid(&self, key: &str) -> Result<UniformGrid, RunError> {
        UniformGrid::new(self.half_width, self.points).map_err(|e| RunError::config(format!("{key}: {e}")))
    }

    pub fn fft_grid(&self, key: &str) -> Result<UniformGrid, RunError> {
        if !self.points.is_power_of_two() {
            return Err(RunError::config(format!("{key}: points = {} is not a power of two", self.points)));
        }
        UniformGrid::fft(self.half_width, self.points).map_err(|e| RunError::config(format!("{key}: {e}")))
    }
}

/// Centres on `x`, integration patch (and hence frequencies) on `patch`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfGridSpec {
    pub x: AxisSpec,
    pub patch: AxisSpec,
}

impl TfGridSpec {
    pub fn build(&self, key: &str) -> Result<TfGrid, RunError> {
        TfGrid::new(self.x.grid(&format!("{key}.x"))?, self.patch.fft_grid(&format!("{key}.patch"))?)
            .map_err(|e| RunError::config(format!("{key}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftIdentitiesParams {
    /// Riemann-sum grid for the orthogonality relations.
    pub grid: AxisSpec,
    #[serde(default = "default_true")]
    pub orthogonality: bool,
    /// Probe points per coordinate for the Rihaczek identity (0 skips it).
    #[serde(default = "default_probe_points")]
    pub rihaczek_points: usize,
    #[serde(default = "default_probe_extent")]
    pub rihaczek_extent: f64,
    #[serde(default = "default_identity_tolerance")]
    pub tolerance: f64,
    /// Writes the STFT of the first test signal as a binary dump.
    #[serde(default)]
    pub dump_stft: bool,
}

fn default_true() -> bool {
    true
}
fn default_probe_points() -> usize {
    3
}
fn default_probe_extent() -> f64 {
    2.0
}
fn default_identity_tolerance() -> f64 {
    1e-5
}

/// φ_KN of a perturbation of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    Zero,
    /// 2π·a·sin x.
    Sine { amplitude: f64 },
    /// 2π·a·cos x.
    Cosine { amplitude: f64 },
    /// 2π·a·(1+x²)^e.
    Bump { amplitude: f64, exponent: f64 },
    /// Constant phase -2πc, that is ψ(x) = x - c.
    Translation { shift: f64 },
}

impl MapSpec {
    /// The perturbation with its natural growth exponent, or `declared_b`
    /// when given.
    pub fn perturbation(&self, declared_b: Option<f64>) -> Result<PerturbationMap, RunError> {
        let tau = 2.0 * std::f64::consts::PI;
        let map = match *self {
            MapSpec::Zero | MapSpec::Translation { .. } => PerturbationMap::zero(),
            MapSpec::Sine { amplitude } => PerturbationMap::sine(amplitude),
            MapSpec::Cosine { amplitude } => PerturbationMap::scalar(
                ScalarMap::Cosine { amplitude: tau * amplitude },
                0.0,
                (tau * amplitude).abs(),
                modcomp_core::symbol::DerivativeClass::UltraBounded,
            )?,
            MapSpec::Bump { amplitude, exponent } => PerturbationMap::bump(amplitude, exponent)?,
        };
        Ok(match declared_b {
            Some(b) => map.with_declared_growth(b)?,
            None => map,
        })
    }

    pub fn composition(&self) -> Result<CompositionMap, RunError> {
        Ok(match *self {
            MapSpec::Translation { shift } => CompositionMap::translation(shift),
            _ => CompositionMap::perturbed_identity(self.perturbation(None)?)?,
        })
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Zero => write!(f, "zero"),
            MapSpec::Sine { amplitude } => write!(f, "sine:{amplitude}"),
            MapSpec::Cosine { amplitude } => write!(f, "cosine:{amplitude}"),
            MapSpec::Bump { amplitude, exponent } => write!(f, "bump:{amplitude}:{exponent}"),
            MapSpec::Translation { shift } => write!(f, "translation:{shift}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Zeta1,
    Zeta2,
}

impl From<ModeSpec> for modcomp_core::symbol::DecayMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Zeta1 => modcomp_core::symbol::DecayMode::Zeta1,
            ModeSpec::Zeta2 => modcomp_core::symbol::DecayMode::Zeta2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolGridSpec {
    pub z1: AxisSpec,
    pub z2: AxisSpec,
    pub patch: AxisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpDecaySpec {
    pub weight: String,
    pub order: u32,
    pub mode: ModeSpec,
    #[serde(default = "default_k_candidates")]
    pub k_candidates: Vec<f64>,
}

fn default_k_candidates() -> Vec<f64> {
    modcomp_core::symbol::DEFAULT_K_CANDIDATES.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDecayParams {
    pub map: MapSpec,
    /// Growth exponent b used in the zeta2 compensation; defaults to the
    /// map's own.
    pub declared_b: Option<f64>,
    #[serde(default = "default_window_width")]
    pub window_width: f64,
    pub grid: SymbolGridSpec,
    #[serde(default)]
    pub poly_orders: Vec<u32>,
    #[serde(default = "default_mode")]
    pub poly_mode: ModeSpec,
    pub exp: Option<ExpDecaySpec>,
    /// Stores the full four-dimensional array and dumps it.
    #[serde(default)]
    pub dump: bool,
}

fn default_window_width() -> f64 {
    1.0
}
fn default_mode() -> ModeSpec {
    ModeSpec::Zeta1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub x_max: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeBoundsParams {
    pub map: MapSpec,
    pub weight: String,
    #[serde(default = "default_ell")]
    pub ell: f64,
    pub n_max: usize,
    pub grid: BoxSpec,
    #[serde(default = "default_m_candidates")]
    pub m_candidates: Vec<f64>,
    /// Highest order compared against finite differences (0 skips).
    #[serde(default = "default_fd_order")]
    pub fd_order: usize,
    #[serde(default = "default_fd_tolerance")]
    pub fd_tolerance: f64,
}

fn default_ell() -> f64 {
    1.0
}
fn default_m_candidates() -> Vec<f64> {
    modcomp_core::ultradiff::DEFAULT_M_CANDIDATES.to_vec()
}
fn default_fd_order() -> usize {
    6
}
fn default_fd_tolerance() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSpec {
    pub truncation: usize,
    pub k_max: usize,
    pub r_max: usize,
    /// Angular frequency of the plane-wave test function h.
    pub frequency: f64,
    #[serde(default = "default_reassembly_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_ell")]
    pub ell: f64,
}

fn default_reassembly_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorModelParams {
    pub truncation: usize,
    pub order: f64,
    #[serde(default = "default_cauchy_n_max")]
    pub cauchy_n_max: usize,
    /// Defaults to ceil(m_G).
    pub m: Option<f64>,
    #[serde(default = "default_eigen_count")]
    pub eigen_count: usize,
    #[serde(default = "default_eigen_extent")]
    pub eigen_extent: f64,
    #[serde(default = "default_eigen_tolerance")]
    pub eigen_tolerance: f64,
    pub grid: AxisSpec,
    pub expansion: Option<ExpansionSpec>,
}

fn default_cauchy_n_max() -> usize {
    40
}
fn default_eigen_count() -> usize {
    50
}
fn default_eigen_extent() -> f64 {
    10.0
}
fn default_eigen_tolerance() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    /// (1+|z|)^s.
    Poly { s: f64 },
    /// v_{s+Nb}(z)(1+|z₂|)^N.
    PolyLoss { s: f64, n: f64, b: f64 },
    /// e^{a ω(|z|)}.
    ExpIsotropic { a: f64, omega: WeightName },
    /// e^{s(ω(z₁)+ω(z₂))}.
    ExpSplit { s: f64, omega: WeightName },
    /// e^{s(ω(z₁)+ω(z₂))} e^{kω(z₂)}.
    Loss { s: f64, k: f64, omega: WeightName },
}

/// A one-variable weight written as `gevrey:2`, `logpower:3` or `linear`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WeightName(pub SubadditiveWeight);

impl TryFrom<String> for WeightName {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        SubadditiveWeight::from_str(&s).map(WeightName).map_err(|e| e.to_string())
    }
}

impl From<WeightName> for String {
    fn from(w: WeightName) -> String {
        w.0.to_string()
    }
}

impl WeightSpec {
    pub fn build(&self) -> TfWeight {
        match *self {
            WeightSpec::Unit => TfWeight::Unit,
            WeightSpec::Poly { s } => TfWeight::Poly { s },
            WeightSpec::PolyLoss { s, n, b } => TfWeight::polynomial_loss(s, n, b),
            WeightSpec::ExpIsotropic { a, omega } => TfWeight::ExpIsotropic { a, omega: omega.0 },
            WeightSpec::ExpSplit { s, omega } => TfWeight::ExpSplit { s, omega: omega.0 },
            WeightSpec::Loss { s, k, omega } => TfWeight::Loss { s, k, omega: omega.0 },
        }
    }

    /// The same weight with k replaced, for loss weights.
    pub fn with_k(&self, k: f64) -> Option<WeightSpec> {
        match *self {
            WeightSpec::Loss { s, omega, .. } => Some(WeightSpec::Loss { s, k, omega }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorSpec {
    Identity,
    Compose,
    KohnNirenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Largest |a| and |β|.
    pub extent: f64,
    /// Lattice points per parameter.
    pub points: usize,
    #[serde(default = "default_window_width")]
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormProbeParams {
    pub operator: OperatorSpec,
    pub map: MapSpec,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub source: WeightSpec,
    pub target: WeightSpec,
    /// Sweeps k of a loss source weight; the smallest bounded k passes.
    pub k_candidates: Option<Vec<f64>>,
    #[serde(with = "exponent_serde")]
    pub p: Exponent,
    pub family: FamilySpec,
    pub grid: TfGridSpec,
    #[serde(default = "default_window_width")]
    pub window_width: f64,
    #[serde(default = "default_cap")]
    pub cap: f64,
    #[serde(default = "default_slope_max")]
    pub slope_max: f64,
}

fn default_dimension() -> usize {
    1
}
fn default_cap() -> f64 {
    modcomp_core::operators::DEFAULT_CAP
}
fn default_slope_max() -> f64 {
    modcomp_core::operators::DEFAULT_SLOPE_MAX
}

mod exponent_serde {
    use modcomp_core::modnorm::Exponent;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_string())
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Text(t) => t,
        };
        text.parse().map_err(|_| serde::de::Error::custom(format!("p must be 1, 2 or \"inf\", got {text}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            RunError::Config(msg) => RunError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for kind in ExperimentKind::ALL {
            let here = match kind {
                ExperimentKind::Weights => self.weights.is_some(),
                ExperimentKind::StftIdentities => self.stft_identities.is_some(),
                ExperimentKind::SymbolDecay => self.symbol_decay.is_some(),
                ExperimentKind::DerivativeBounds => self.derivative_bounds.is_some(),
                ExperimentKind::OperatorModel => self.operator_model.is_some(),
                ExperimentKind::NormProbe => self.norm_probe.is_some(),
            };
            if here {
                out.push(kind.section());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let kind = self.experiment.kind;
        let present = self.present();
        if !present.contains(&kind.section()) {
            return Err(RunError::config(format!("missing section [{}] for kind `{kind}`", kind.section())));
        }
        if let Some(other) = present.iter().find(|s| **s != kind.section()) {
            return Err(RunError::config(format!("section [{other}] does not belong to kind `{kind}`")));
        }
        if self.experiment.name.is_empty() || self.experiment.name.contains(['/', '\\']) {
            return Err(RunError::config("experiment.name must be a plain file prefix"));
        }
        match kind {
            ExperimentKind::Weights => {
                let w = self.weights.as_ref().expect("checked");
                parse_weight(&w.weight, "weights.weight")?;
            }
            ExperimentKind::StftIdentities => {
                let s = self.stft_identities.as_ref().expect("checked");
                s.grid.fft_grid("stft_identities.grid")?;
            }
            ExperimentKind::SymbolDecay => {
                let s = self.symbol_decay.as_ref().expect("checked");
                s.grid.patch.fft_grid("symbol_decay.grid.patch")?;
                s.grid.z1.grid("symbol_decay.grid.z1")?;
                s.grid.z2.grid("symbol_decay.grid.z2")?;
                if let Some(e) = &s.exp {
                    parse_weight(&e.weight, "symbol_decay.exp.weight")?;
                }
                if s.poly_orders.contains(&0) {
                    return Err(RunError::config("symbol_decay.poly_orders: N must be at least 1"));
                }
            }
            ExperimentKind::DerivativeBounds => {
                let d = self.derivative_bounds.as_ref().expect("checked");
                parse_weight(&d.weight, "derivative_bounds.weight")?;
            }
            ExperimentKind::OperatorModel => {
                let o = self.operator_model.as_ref().expect("checked");
                o.grid.grid("operator_model.grid")?;
            }
            ExperimentKind::NormProbe => {
                let n = self.norm_probe.as_ref().expect("checked");
                n.grid.build("norm_probe.grid")?;
                if !(1..=2).contains(&n.dimension) {
                    return Err(RunError::config("norm_probe.dimension must be 1 or 2"));
                }
                if n.k_candidates.is_some() && n.source.with_k(0.0).is_none() {
                    return Err(RunError::config("norm_probe.k_candidates needs a source of type \"loss\""));
                }
            }
        }
        Ok(())
    }

    /// Resolved output directory.
    pub fn output_dir(&self, env_default: Option<&Path>) -> PathBuf {
        self.experiment
            .output_dir
            .clone()
            .or_else(|| env_default.map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

pub fn parse_weight(text: &str, key: &str) -> Result<SubadditiveWeight, RunError> {
    SubadditiveWeight::from_str(text).map_err(|e| RunError::config(format!("{key}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[experiment]
kind = "weights"
name = "young"

[weights]
weight = "gevrey:2"
"#;

    #[test]
    fn minimal_weights_config() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let w = c.weights.unwrap();
        assert_eq!(w.young_j_max, 50);
        assert_eq!(w.checks, vec![WeightCheck::Young]);
        assert_eq!(c.experiment.memory_budget, 1 << 30);
    }

    #[test]
    fn missing_key_is_named() {
        let text = r#"
[experiment]
kind = "stft-identities"
name = "x"

[stft_identities]
orthogonality = true
"#;
        let err = ExperimentConfig::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("grid"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn section_must_match_kind() {
        let text = MINIMAL.replace("kind = \"weights\"", "kind = \"norm-probe\"");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("[norm_probe]"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("weight = \"gevrey:2\"", "weight = \"gevrey:2\"\ncolour = 3");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn grid_sizes_must_be_powers_of_two() {
        let text = r#"
[experiment]
kind = "stft-identities"
name = "x"

[stft_identities]
grid = { half_width = 8.0, points = 1000 }
"#;
        let err = ExperimentConfig::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("power of two"), "{err}");
    }

    #[test]
    fn exponent_forms() {
        for (raw, p) in [("1", Exponent::One), ("2", Exponent::Two), ("\"inf\"", Exponent::Infinity)] {
            #[derive(Deserialize)]
            struct W {
                #[serde(with = "exponent_serde")]
                p: Exponent,
            }
            let w: W = toml::from_str(&format!("p = {raw}")).unwrap();
            assert_eq!(w.p, p);
        }
    }

    #[test]
    fn weight_spec_parses() {
        #[derive(Deserialize)]
        struct W {
            w: WeightSpec,
        }
        let w: W = toml::from_str(r#"w = { type = "loss", s = 1.0, k = 2.0, omega = "gevrey:2" }"#).unwrap();
        assert_eq!(w.w.with_k(4.0).unwrap().build().to_string(), "loss(1;4;gevrey:2)");
        assert!(toml::from_str::<W>(r#"w = { type = "loss", s = 1.0, k = 2.0, omega = "gevrey:0.2" }"#).is_err());
    }
}
