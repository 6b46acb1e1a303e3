//! The composition operator C_ψ f = f∘ψ, its Kohn–Nirenberg realisation
//! σ(x,D), loss indices, and norm-ratio probes between weighted modulation
//! spaces.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::UniformGrid;
use crate::modnorm::{mod_norm, mod_norm_of_matrix, weighted_norm_tensor, Exponent, NormEstimate, TailBound};
use crate::par;
use crate::quadrature::GaussLegendre;
use crate::signal::{cis_turns, AnalyticSignal, SampledSignal};
use crate::stft::{stft, TfGrid, TfMatrix};
use crate::symbol::{Coupling, PerturbationMap, ScalarMap};
use crate::weights::TfWeight;

/// ψ(x) = A x + c + φ(x)/(2π), so that for A = I and c = 0 the
/// Kohn–Nirenberg phase 2π(ψ(x) - x) is exactly φ(x).
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMap {
    /// Row-major d×d.
    pub linear: Vec<f64>,
    pub shift: Vec<f64>,
    pub perturbation: PerturbationMap,
}

impl CompositionMap {
    pub fn new(linear: Vec<f64>, shift: Vec<f64>, perturbation: PerturbationMap) -> Result<Self> {
        let d = shift.len();
        if !(1..=2).contains(&d) {
            return Err(Error::DimensionMismatch { expected: 1, got: d });
        }
        if linear.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: linear.len() });
        }
        if perturbation.dim() != d || perturbation.arg_dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: perturbation.dim() });
        }
        let map = Self { linear, shift, perturbation };
        let det = map.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix(det));
        }
        Ok(map)
    }

    /// ψ(x) = x + φ(x)/(2π).
    pub fn perturbed_identity(perturbation: PerturbationMap) -> Result<Self> {
        let d = perturbation.dim();
        Self::new(identity(d), alloc::vec![0.0; d], perturbation)
    }

    /// ψ(x) = x - c in one dimension.
    pub fn translation(c: f64) -> Self {
        Self::new(alloc::vec![1.0], alloc::vec![-c], PerturbationMap::zero()).expect("valid")
    }

    /// ψ(x) = a x in one dimension.
    pub fn dilation(a: f64) -> Result<Self> {
        Self::new(alloc::vec![a], alloc::vec![0.0], PerturbationMap::zero())
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn determinant(&self) -> f64 {
        match self.dim() {
            1 => self.linear[0],
            _ => self.linear[0] * self.linear[3] - self.linear[1] * self.linear[2],
        }
    }

    pub fn has_identity_linear_part(&self) -> bool {
        self.linear == identity(self.dim())
    }

    fn is_diagonal(&self) -> bool {
        self.dim() == 1 || (self.linear[1] == 0.0 && self.linear[2] == 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let phi = self.perturbation.value(x);
        (0..d)
            .map(|i| {
                let lin: f64 = (0..d).map(|j| self.linear[i * d + j] * x[j]).sum();
                lin + self.shift[i] + phi[i] / (2.0 * PI)
            })
            .collect()
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.linear[0] * x + self.shift[0] + self.perturbation.components[0].value(x) / (2.0 * PI)
    }

    /// φ_KN(x) = 2π(ψ(x) - x).
    pub fn kn_phase(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).iter().zip(x).map(|(p, xi)| 2.0 * PI * (p - xi)).collect()
    }

    // Coordinate c of a separable map.
    fn axis_map(&self, c: usize) -> impl Fn(f64) -> f64 + '_ {
        let d = self.dim();
        move |t| {
            self.linear[c * d + c] * t + self.shift[c] + self.perturbation.components[c].value(t) / (2.0 * PI)
        }
    }
}

fn identity(d: usize) -> Vec<f64> {
    (0..d * d).map(|k| if k % (d + 1) == 0 { 1.0 } else { 0.0 }).collect()
}

/// Samples f∘ψ by exact evaluation.
pub fn compose(f: &AnalyticSignal, psi: &CompositionMap, axis: UniformGrid) -> Result<SampledSignal> {
    if psi.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: psi.dim() });
    }
    SampledSignal::new(1, axis, axis.nodes().map(|x| f.eval(psi.eval1(x))).collect())
}

/// Samples (f₁⊗f₂)∘ψ on axis² for a separable ψ (diagonal A, tensor φ).
pub fn compose_tensor(f1: &AnalyticSignal, f2: &AnalyticSignal, psi: &CompositionMap, axis: UniformGrid) -> Result<SampledSignal> {
    require_separable(psi)?;
    let (p1, p2) = (psi.axis_map(0), psi.axis_map(1));
    Ok(crate::signal::sample_tensor(|t| f1.eval(p1(t)), |t| f2.eval(p2(t)), axis))
}

fn require_separable(psi: &CompositionMap) -> Result<()> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
    }
    if !psi.is_diagonal() || psi.perturbation.coupling != Coupling::Tensor {
        return Err(invalid("psi", "tensor operations need a diagonal linear part and tensor coupling"));
    }
    Ok(())
}

/// Gauss–Legendre settings for the frequency integral of σ(x,D)f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnQuadrature {
    pub order: usize,
    /// Bound required on the neglected mass of |f̂|.
    pub tail_tolerance: f64,
    /// Largest half-width searched for the frequency range.
    pub max_half_width: f64,
}

impl Default for KnQuadrature {
    fn default() -> Self {
        Self { order: 32, tail_tolerance: 1e-12, max_half_width: 256.0 }
    }
}

// Half-width R around the spectral centre with sampled tail mass below the
// tolerance, from sup |f̂| on [R, 4R] on both sides times the shell length.
fn frequency_range(f: &AnalyticSignal, quad: &KnQuadrature) -> Result<(f64, f64)> {
    let centre = f.modulation;
    let mut r = 1.0;
    loop {
        let mut sup = 0.0f64;
        for i in 0..=256 {
            let y = r + 3.0 * r * i as f64 / 256.0;
            sup = sup.max(f.fourier(centre + y)?.norm()).max(f.fourier(centre - y)?.norm());
        }
        let tail = sup * 6.0 * r;
        if tail < quad.tail_tolerance {
            return Ok((centre, r));
        }
        if 2.0 * r > quad.max_half_width {
            return Err(Error::QuadratureTail { tail, threshold: quad.tail_tolerance });
        }
        r *= 2.0;
    }
}

/// σ(x,D)f(x) = ∫ e^{iφ_KN(x)y} f̂(y) e^{2πixy} dy at each point.
pub fn kohn_nirenberg_values(psi: &CompositionMap, f: &AnalyticSignal, points: &[f64], quad: &KnQuadrature) -> Result<Vec<Complex64>> {
    if psi.dim() != 1 || !psi.has_identity_linear_part() {
        return Err(invalid("psi", "Kohn–Nirenberg form needs d = 1 and A = I"));
    }
    let (centre, r) = frequency_range(f, quad)?;
    // Total phase x + φ_KN(x)/(2π) = ψ(x), in cycles per unit frequency.
    let eff: Vec<f64> = points.iter().map(|&x| psi.eval1(x)).collect();
    let reach = eff.iter().fold(0.0f64, |a, e| a.max(e.abs())) + f.shift.abs() + 1.0;
    let panels = libm::ceil(2.0 * r * reach).max(4.0) as usize;
    let gl = GaussLegendre::new(quad.order)?;
    let (ys, ws) = gl.composite(centre - r, centre + r, panels);
    let fhat: Vec<Complex64> = ys.iter().zip(&ws).map(|(y, w)| Ok(f.fourier(*y)? * w)).collect::<Result<_>>()?;
    Ok(par::map_indices(points.len(), |i| {
        crate::sum::pairwise_complex_by(ys.len(), &|j| fhat[j] * cis_turns(eff[i] * ys[j]))
    }))
}

pub fn kohn_nirenberg_apply(psi: &CompositionMap, f: &AnalyticSignal, axis: UniformGrid, quad: &KnQuadrature) -> Result<SampledSignal> {
    let points: Vec<f64> = axis.nodes().collect();
    SampledSignal::new(1, axis, kohn_nirenberg_values(psi, f, &points, quad)?)
}

/// σ(x,D)(f₁⊗f₂) for a tensor perturbation of the identity, which factors
/// into one-dimensional frequency integrals.
pub fn kohn_nirenberg_apply_tensor(
    psi: &CompositionMap,
    f1: &AnalyticSignal,
    f2: &AnalyticSignal,
    axis: UniformGrid,
    quad: &KnQuadrature,
) -> Result<SampledSignal> {
    require_separable(psi)?;
    if !psi.has_identity_linear_part() {
        return Err(invalid("psi", "Kohn–Nirenberg form needs A = I"));
    }
    let points: Vec<f64> = axis.nodes().collect();
    let mut factors = Vec::with_capacity(2);
    for (c, f) in [f1, f2].into_iter().enumerate() {
        let single = CompositionMap::new(
            alloc::vec![1.0],
            alloc::vec![psi.shift[c]],
            PerturbationMap::scalar(psi.perturbation.components[c], psi.perturbation.growth_exponent, psi.perturbation.growth_constant, psi.perturbation.class)?,
        )?;
        factors.push(kohn_nirenberg_values(&single, f, &points, quad)?);
    }
    let mut values = Vec::with_capacity(points.len() * points.len());
    for a in &factors[0] {
        for b in &factors[1] {
            values.push(a * b);
        }
    }
    SampledSignal::new(2, axis, values)
}

/// Source exponent of the corollary and the theorem's order N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossIndex {
    /// t = (1+b)/(1-b)·⌊2s⌋ + s + 2d + 1.
    pub t: f64,
    /// Smallest integer with (1-b)N > 2(s+d).
    pub n: u32,
    /// t - (s + N(1+b)); the theorem's source weight is dominated by
    /// v_{s+N(1+b)}, so a negative gap means v_t does not dominate it.
    pub gap: f64,
}

pub fn loss_index(s: f64, b: f64, d: u32) -> Result<LossIndex> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid("s", "must be finite and nonnegative"));
    }
    if !(0.0..1.0).contains(&b) {
        return Err(invalid("b", "must lie in [0, 1)"));
    }
    let d = d as f64;
    let t = (1.0 + b) / (1.0 - b) * libm::floor(2.0 * s) + s + 2.0 * d + 1.0;
    let bound = 2.0 * (s + d) / (1.0 - b);
    let mut n = libm::floor(bound) as u32;
    while (1.0 - b) * n as f64 <= 2.0 * (s + d) {
        n += 1;
    }
    Ok(LossIndex { t, n, gap: t - (s + n as f64 * (1.0 + b)) })
}

/// C_ψ f = C_{ψ̃}(C_A f) with ψ̃(x) = x + A⁻¹(c + φ(x)/(2π)).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineReduction {
    pub reduced: CompositionMap,
    /// The linear part A applied first, row-major.
    pub linear: Vec<f64>,
}

pub fn affine_reduce(psi: &CompositionMap) -> Result<AffineReduction> {
    let d = psi.dim();
    if !psi.is_diagonal() || (d == 2 && psi.perturbation.coupling != Coupling::Tensor) {
        return Err(invalid("psi", "reduction needs a diagonal linear part"));
    }
    let det = psi.determinant();
    if det == 0.0 {
        return Err(Error::SingularMatrix(det));
    }
    let inv: Vec<f64> = (0..d).map(|c| 1.0 / psi.linear[c * d + c]).collect();
    let components: Vec<ScalarMap> = psi.perturbation.components.iter().zip(&inv).map(|(m, a)| m.scaled(*a)).collect();
    let p = &psi.perturbation;
    let scale = inv.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    let perturbation = PerturbationMap::new(components, p.coupling, p.growth_exponent, p.growth_constant * scale, p.class)?;
    let shift: Vec<f64> = psi.shift.iter().zip(&inv).map(|(c, a)| c * a).collect();
    Ok(AffineReduction { reduced: CompositionMap::new(identity(d), shift, perturbation)?, linear: psi.linear.clone() })
}

impl AffineReduction {
    /// x ↦ (C_A f)(ψ̃(x)) in one dimension.
    pub fn apply(&self, f: &AnalyticSignal, axis: UniformGrid) -> Result<SampledSignal> {
        if self.reduced.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.reduced.dim() });
        }
        let a = self.linear[0];
        let scaled = |t: f64| f.eval(a * t);
        SampledSignal::new(1, axis, axis.nodes().map(|x| scaled(self.reduced.eval1(x))).collect())
    }
}

/// One member M_β T_a g of a time–frequency shifted family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMember {
    pub a: f64,
    pub beta: f64,
    pub signal: AnalyticSignal,
}

impl FamilyMember {
    pub fn shift(&self) -> f64 {
        libm::hypot(self.a, self.beta)
    }
}

/// M_β T_a g for a and β on `points` equispaced values of [-extent, extent].
pub fn shifted_gaussian_family(base: &AnalyticSignal, extent: f64, points: usize) -> Vec<FamilyMember> {
    let axis: Vec<f64> = (0..points)
        .map(|i| if points == 1 { 0.0 } else { -extent + 2.0 * extent * i as f64 / (points - 1) as f64 })
        .collect();
    let mut out = Vec::with_capacity(points * points);
    for &a in &axis {
        for &beta in &axis {
            out.push(FamilyMember { a, beta, signal: base.tf_shift(a, beta) });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOperator {
    Identity,
    Compose(CompositionMap),
    KohnNirenberg(CompositionMap, KnQuadrature),
}

impl ProbeOperator {
    fn image_stft(&self, f: &AnalyticSignal, g: &AnalyticSignal, grid: &TfGrid) -> Result<TfMatrix> {
        match self {
            ProbeOperator::Identity => stft(|t| f.eval(t), g, grid),
            ProbeOperator::Compose(psi) => {
                if psi.dim() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: psi.dim() });
                }
                stft(|t| f.eval(psi.eval1(t)), g, grid)
            }
            ProbeOperator::KohnNirenberg(psi, quad) => {
                // Every point x_i + u_j lies on the patch lattice when the
                // centre spacing is a multiple of the patch spacing.
                let hp = grid.patch.spacing();
                let ratio = grid.x.spacing() / hp;
                let stride = libm::round(ratio);
                if (ratio - stride).abs() > 1e-9 {
                    return Err(invalid("grid", "centre spacing must be a multiple of the patch spacing"));
                }
                let start = grid.x.node(0) + grid.patch.node(0);
                let count = (grid.x.len() - 1) * stride as usize + grid.patch.len();
                let points: Vec<f64> = (0..count).map(|k| start + k as f64 * hp).collect();
                let values = kohn_nirenberg_values(psi, f, &points, quad)?;
                stft(
                    |t| {
                        let k = libm::round((t - start) / hp) as usize;
                        values[k]
                    },
                    g,
                    grid,
                )
            }
        }
    }
}

/// Window, grid, exponent and the boundedness thresholds of a probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub window: AnalyticSignal,
    pub grid: TfGrid,
    pub p: Exponent,
    /// Largest admissible max/median ratio.
    pub cap: f64,
    /// Largest admissible slope of log r against the shift magnitude.
    pub slope_max: f64,
}

pub const DEFAULT_CAP: f64 = 10.0;
pub const DEFAULT_SLOPE_MAX: f64 = 0.01;
/// Slope above which a probe counts as exhibiting growth.
pub const GROWTH_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub a: f64,
    pub beta: f64,
    pub shift: f64,
    pub source: NormEstimate,
    pub target: NormEstimate,
    pub ratio: f64,
    /// Set when either norm carries a tail warning.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioProbe {
    pub rows: Vec<RatioRow>,
    pub max: f64,
    pub median: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub cap_ratio: f64,
    pub cap: f64,
    pub slope_max: f64,
}

impl RatioProbe {
    fn from_rows(rows: Vec<RatioRow>, cap: f64, slope_max: f64) -> Self {
        let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let max = ratios.last().copied().unwrap_or(f64::NAN);
        let median = median_sorted(&ratios);
        let xs: Vec<f64> = rows.iter().map(|r| r.shift).collect();
        let ys: Vec<f64> = rows.iter().map(|r| libm::log(r.ratio)).collect();
        let (slope, slope_stderr) = least_squares_slope(&xs, &ys);
        Self { rows, max, median, slope, slope_stderr, cap_ratio: max / median, cap, slope_max }
    }

    pub fn slope_passed(&self) -> bool {
        self.slope <= self.slope_max
    }

    pub fn cap_passed(&self) -> bool {
        self.cap_ratio <= self.cap
    }

    /// Boundedness evidence: slope and cap both within their thresholds.
    pub fn bounded(&self) -> bool {
        self.slope_passed() && self.cap_passed()
    }

    pub fn shows_growth(&self) -> bool {
        self.slope > GROWTH_SLOPE
    }

    pub fn flagged_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Ordinary least-squares slope and its standard error.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 3 {
        return (f64::NAN, f64::NAN);
    }
    let mx = crate::sum::pairwise(xs) / n;
    let my = crate::sum::pairwise(ys) / n;
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let sxy: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let sxx = crate::sum::pairwise(&sxx);
    let slope = crate::sum::pairwise(&sxy) / sxx;
    let res: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - my - slope * (x - mx);
            e * e
        })
        .collect();
    let sigma2 = crate::sum::pairwise(&res) / (n - 2.0);
    (slope, libm::sqrt(sigma2 / sxx))
}

/// r(f) = ‖Tf‖_{M^p_{m_tgt}} / ‖f‖_{M^p_{m_src}} over a family.
pub fn norm_ratio_probe(
    op: &ProbeOperator,
    family: &[FamilyMember],
    m_src: &TfWeight,
    m_tgt: &TfWeight,
    settings: &ProbeSettings,
) -> Result<RatioProbe> {
    let g = &settings.window;
    let mut rows = Vec::with_capacity(family.len());
    for member in family {
        let source = mod_norm(&member.signal, g, m_src, settings.p, &settings.grid)?;
        let image = op.image_stft(&member.signal, g, &settings.grid)?;
        let target = if matches!(op, ProbeOperator::Identity) {
            mod_norm(&member.signal, g, m_tgt, settings.p, &settings.grid)?
        } else {
            mod_norm_of_matrix(&image, m_tgt, settings.p)
        };
        rows.push(RatioRow {
            a: member.a,
            beta: member.beta,
            shift: member.shift(),
            ratio: target.norm / source.norm,
            flagged: source.warning || target.warning,
            source,
            target,
        });
    }
    Ok(RatioProbe::from_rows(rows, settings.cap, settings.slope_max))
}

/// (M_β T_a g) ⊗ (M_β T_a g) on the diagonal of the two-dimensional
/// shift lattice.
pub fn tensor_gaussian_family(base: &AnalyticSignal, extent: f64, points: usize) -> Vec<FamilyMember> {
    shifted_gaussian_family(base, extent, points)
}

/// Norm-ratio probe in d = 2 for a separable ψ acting on tensor members
/// f ⊗ f; norms over ℝ⁴ are assembled from the one-dimensional STFTs.
pub fn norm_ratio_probe_tensor(
    psi: &CompositionMap,
    family: &[FamilyMember],
    m_src: &TfWeight,
    m_tgt: &TfWeight,
    settings: &ProbeSettings,
) -> Result<RatioProbe> {
    require_separable(psi)?;
    let g = &settings.window;
    let grid = &settings.grid;
    let (p1, p2) = (psi.axis_map(0), psi.axis_map(1));
    let untracked = TailBound { value: f64::NAN, certified: false };
    let mut rows = Vec::with_capacity(family.len());
    for member in family {
        let f = member.signal;
        let v = stft(|t| f.eval(t), g, grid)?;
        let src = weighted_norm_tensor(&v, &v, m_src, settings.p);
        let w1 = stft(|t| f.eval(p1(t)), g, grid)?;
        let w2 = stft(|t| f.eval(p2(t)), g, grid)?;
        let tgt = weighted_norm_tensor(&w1, &w2, m_tgt, settings.p);
        let source = NormEstimate { norm: src, tail: untracked, warning: false };
        let target = NormEstimate { norm: tgt, tail: untracked, warning: false };
        rows.push(RatioRow {
            a: member.a,
            beta: member.beta,
            shift: core::f64::consts::SQRT_2 * member.shift(),
            ratio: tgt / src,
            flagged: !(src.is_finite() && tgt.is_finite()),
            source,
            target,
        });
    }
    Ok(RatioProbe::from_rows(rows, settings.cap, settings.slope_max))
}

/// Smallest k whose source weight m_{s',k} makes the probe bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweep {
    pub table: Vec<(f64, RatioProbe)>,
    pub smallest: Option<f64>,
}

pub fn sweep_source_k(
    op: &ProbeOperator,
    family: &[FamilyMember],
    source: impl Fn(f64) -> TfWeight,
    m_tgt: &TfWeight,
    settings: &ProbeSettings,
    candidates: &[f64],
) -> Result<KSweep> {
    let mut ks = candidates.to_vec();
    ks.sort_by(f64::total_cmp);
    let mut table = Vec::with_capacity(ks.len());
    for k in ks {
        table.push((k, norm_ratio_probe(op, family, &source(k), m_tgt, settings)?));
    }
    let smallest = table.iter().find(|(_, p)| p.bounded()).map(|(k, _)| *k);
    Ok(KSweep { table, smallest })
}

pub fn describe_probe(p: &RatioProbe) -> alloc::string::String {
    format!(
        "max={:.6e} median={:.6e} cap_ratio={:.4} slope={:.5}±{:.5} flagged={}",
        p.max,
        p.median,
        p.cap_ratio,
        p.slope,
        p.slope_stderr,
        p.flagged_rows()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::DerivativeClass;

    fn axis() -> UniformGrid {
        UniformGrid::new(8.0, 128).unwrap()
    }

    #[test]
    fn compose_examples() {
        let f = AnalyticSignal::gaussian(1.0, 1.0, 0.0, 0.0);
        let id = CompositionMap::perturbed_identity(PerturbationMap::zero()).unwrap();
        assert_eq!(compose(&f, &id, axis()).unwrap(), crate::signal::sample(|t| f.eval(t), axis()));
        let c = 1.5;
        let tr = compose(&f, &CompositionMap::translation(c), axis()).unwrap();
        let shifted = f.translated(c);
        assert!(tr.values.iter().zip(axis().nodes()).all(|(v, t)| (v - shifted.eval(t)).norm() < 1e-15));
        let dil = compose(&f, &CompositionMap::dilation(2.0).unwrap(), axis()).unwrap();
        assert!(dil.values.iter().zip(axis().nodes()).all(|(v, t)| (v.re - libm::exp(-4.0 * PI * t * t)).abs() < 1e-15));
        assert_eq!(CompositionMap::dilation(0.0).unwrap_err(), Error::SingularMatrix(0.0));
    }

    #[test]
    fn kn_phase_matches_map() {
        let psi = CompositionMap::perturbed_identity(PerturbationMap::sine(0.3)).unwrap();
        for x in [-3.0, 0.2, 5.0] {
            let direct = 2.0 * PI * (psi.eval1(x) - x);
            assert!((psi.kn_phase(&[x])[0] - direct).abs() < 1e-12);
            assert!((direct - 2.0 * PI * 0.3 * libm::sin(x)).abs() < 1e-12);
        }
        assert!((CompositionMap::translation(0.5).kn_phase(&[1.0])[0] + PI).abs() < 1e-15);
    }

    #[test]
    fn kn_examples() {
        let q = KnQuadrature::default();
        let f = AnalyticSignal::normalized_gaussian(1.0).tf_shift(1.0, 2.0);
        let id = CompositionMap::perturbed_identity(PerturbationMap::zero()).unwrap();
        let out = kohn_nirenberg_apply(&id, &f, axis(), &q).unwrap();
        assert!(out.max_abs_diff(&crate::signal::sample(|t| f.eval(t), axis())) < 1e-8);
        let tr = CompositionMap::translation(0.7);
        let out = kohn_nirenberg_apply(&tr, &f, axis(), &q).unwrap();
        assert!(out.max_abs_diff(&compose(&f, &tr, axis()).unwrap()) < 1e-8);
        let psi = CompositionMap::perturbed_identity(PerturbationMap::sine(0.3)).unwrap();
        let g = AnalyticSignal::normalized_gaussian(1.0);
        let out = kohn_nirenberg_apply(&psi, &g, axis(), &q).unwrap();
        assert!(out.max_abs_diff(&compose(&g, &psi, axis()).unwrap()) < 1e-4);
        assert!(kohn_nirenberg_apply(&CompositionMap::dilation(2.0).unwrap(), &g, axis(), &q).is_err());
    }

    #[test]
    fn kn_tail_refusal() {
        let q = KnQuadrature { max_half_width: 2.0, ..KnQuadrature::default() };
        let narrow = AnalyticSignal::gaussian(1.0, 0.05, 0.0, 0.0);
        let wide_spectrum = AnalyticSignal::gaussian(1.0, 40.0, 0.0, 0.0);
        assert!(kohn_nirenberg_apply(&CompositionMap::translation(0.0), &narrow, axis(), &q).is_ok());
        assert!(matches!(
            kohn_nirenberg_apply(&CompositionMap::translation(0.0), &wide_spectrum, axis(), &q),
            Err(Error::QuadratureTail { .. })
        ));
    }

    #[test]
    fn tensor_kn_matches_tensor_compose() {
        let pert = PerturbationMap::new(
            alloc::vec![ScalarMap::Sine { amplitude: 2.0 * PI * 0.3 }; 2],
            Coupling::Tensor,
            0.0,
            1.0,
            DerivativeClass::UltraBounded,
        )
        .unwrap();
        let psi = CompositionMap::perturbed_identity(pert).unwrap();
        let f1 = AnalyticSignal::normalized_gaussian(1.0);
        let f2 = f1.tf_shift(0.5, -1.0);
        let ax = UniformGrid::new(4.0, 32).unwrap();
        let kn = kohn_nirenberg_apply_tensor(&psi, &f1, &f2, ax, &KnQuadrature::default()).unwrap();
        let exact = compose_tensor(&f1, &f2, &psi, ax).unwrap();
        assert!(kn.max_abs_diff(&exact) < 1e-4);
    }

    #[test]
    fn loss_index_examples() {
        let a = loss_index(0.0, 0.0, 1).unwrap();
        assert_eq!((a.t, a.n), (3.0, 3));
        assert_eq!(loss_index(1.0, 0.0, 1).unwrap().t, 6.0);
        let c = loss_index(1.0, 0.5, 1).unwrap();
        assert_eq!(c.t, 10.0);
        assert_eq!(c.n, 9);
        assert_eq!(c.gap, 10.0 - 14.5);
        assert!(loss_index(1.0, 1.0, 1).is_err());
    }

    #[test]
    fn affine_reduction_examples() {
        let f = AnalyticSignal::normalized_gaussian(1.0).tf_shift(0.3, 1.0);
        let id = CompositionMap::perturbed_identity(PerturbationMap::zero()).unwrap();
        let r = affine_reduce(&id).unwrap();
        assert_eq!(r.reduced, id);
        let psi = CompositionMap::new(alloc::vec![2.0], alloc::vec![0.0], PerturbationMap::sine(1.0)).unwrap();
        let r = affine_reduce(&psi).unwrap();
        assert!(r.reduced.has_identity_linear_part());
        let direct = compose(&f, &psi, axis()).unwrap();
        assert!(r.apply(&f, axis()).unwrap().max_abs_diff(&direct) < 1e-10);
        let pure = affine_reduce(&CompositionMap::dilation(3.0).unwrap()).unwrap();
        assert!(pure.reduced.perturbation.value(&[1.7])[0] == 0.0);
    }

    #[test]
    fn identity_probe_is_flat() {
        let g = AnalyticSignal::normalized_gaussian(1.0);
        let settings = ProbeSettings {
            window: g,
            grid: TfGrid::new(UniformGrid::new(8.0, 64).unwrap(), UniformGrid::new(4.0, 128).unwrap()).unwrap(),
            p: Exponent::Two,
            cap: DEFAULT_CAP,
            slope_max: DEFAULT_SLOPE_MAX,
        };
        let family = shifted_gaussian_family(&g, 2.0, 3);
        let m = TfWeight::Poly { s: 1.0 };
        let p = norm_ratio_probe(&ProbeOperator::Identity, &family, &m, &m, &settings).unwrap();
        assert!(p.rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-15));
        assert!(p.bounded());
    }

    #[test]
    fn regression_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (s, e) = least_squares_slope(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-15 && e.abs() < 1e-15);
    }
}
