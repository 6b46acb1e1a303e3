//! Faà di Bruno expansions of the symbol, factorial-type derivative bounds,
//! and a finite-product model of an ultradifferential operator G(D).

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::UniformGrid;
use crate::signal::{cis, AnalyticSignal, SampledSignal};
use crate::symbol::{Coupling, PerturbationMap};
use crate::weights::{euclid, SubadditiveWeight};

/// Largest order accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_ORDER: usize = 25;

/// k = (k₁,…,k_n) with Σ j·k_j = n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub counts: Vec<u32>,
    /// Σ k_j.
    pub total: u32,
    /// k!/(k₁!…k_n!).
    pub weight: u128,
    /// n!/∏ k_j!(j!)^{k_j}, the Faà di Bruno coefficient.
    pub faa_coefficient: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    pub n: usize,
    pub partitions: Vec<Partition>,
}

impl PartitionSet {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn weight_sum(&self) -> u128 {
        self.partitions.iter().map(|p| p.weight).sum()
    }
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

pub fn enumerate_partitions(n: usize) -> Result<PartitionSet> {
    if n == 0 || n > MAX_PARTITION_ORDER {
        return Err(Error::PartitionOrder(n));
    }
    let mut partitions = Vec::new();
    let mut counts = alloc::vec![0u32; n];
    fill_partitions(n, n, &mut counts, &mut partitions);
    Ok(PartitionSet { n, partitions })
}

// Distributes `remaining` among parts of size <= `largest`.
fn fill_partitions(remaining: usize, largest: usize, counts: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        let n = counts.len() as u32;
        let total: u32 = counts.iter().sum();
        let mut denom_multi = 1u128;
        let mut denom_faa = 1u128;
        for (j, &k) in counts.iter().enumerate() {
            let kf = factorial(k);
            denom_multi *= kf;
            denom_faa *= kf * factorial(j as u32 + 1).pow(k);
        }
        out.push(Partition {
            counts: counts.clone(),
            total,
            weight: factorial(total) / denom_multi,
            faa_coefficient: factorial(n) / denom_faa,
        });
        return;
    }
    for part in (1..=largest.min(remaining)).rev() {
        counts[part - 1] += 1;
        fill_partitions(remaining - part, part, counts, out);
        counts[part - 1] -= 1;
    }
}

/// Partition tables for every order up to `n_max`, reused across points.
#[derive(Debug, Clone)]
pub struct FaaDiBruno {
    sets: Vec<PartitionSet>,
}

impl FaaDiBruno {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max > MAX_PARTITION_ORDER {
            return Err(Error::PartitionOrder(n_max));
        }
        Ok(Self { sets: (1..=n_max).map(enumerate_partitions).collect::<Result<_>>()? })
    }

    pub fn max_order(&self) -> usize {
        self.sets.len()
    }

    /// e^{-h} ∂ⁿ e^{h} given h' ,…, h^{(n)} in `h[1..=n]`.
    pub fn exp_derivative(&self, n: usize, h: &[Complex64]) -> Result<Complex64> {
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let set = self.sets.get(n - 1).ok_or(Error::PartitionOrder(n))?;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &set.partitions {
            let mut term = Complex64::new(p.faa_coefficient as f64, 0.0);
            for (j, &k) in p.counts.iter().enumerate() {
                if k > 0 {
                    term *= h[j + 1].powu(k);
                }
            }
            acc += term;
        }
        Ok(acc)
    }
}

fn scalar_path(phi: &PerturbationMap) -> Result<()> {
    if phi.arg_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: phi.arg_dim() });
    }
    Ok(())
}

// ∂ₓⁿ e^{iΣ φ_c(x) y_c} for a scalar argument.
fn scalar_derivative(faa: &FaaDiBruno, phi: &PerturbationMap, n: usize, x: f64, y: &[f64]) -> Result<Complex64> {
    let mut h = alloc::vec![Complex64::new(0.0, 0.0); n + 1];
    for (c, yc) in phi.components.iter().zip(y) {
        for (hj, dj) in h.iter_mut().zip(c.derivatives(n, x)) {
            *hj += Complex64::new(0.0, dj * yc);
        }
    }
    Ok(cis(h[0].im) * faa.exp_derivative(n, &h)?)
}

/// ∂ₓⁿ σ(x,y) through the partition sum. Requires a scalar argument (d = 1
/// or line coupling).
pub fn symbol_nth_derivative(phi: &PerturbationMap, n: usize, x: f64, y: &[f64]) -> Result<Complex64> {
    scalar_path(phi)?;
    if y.len() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: y.len() });
    }
    scalar_derivative(&FaaDiBruno::new(n)?, phi, n, x, y)
}

/// ∂^α σ(x,y) for a tensor-coupled map, as a product over components.
pub fn symbol_partial_derivative(phi: &PerturbationMap, alpha: &[usize], x: &[f64], y: &[f64]) -> Result<Complex64> {
    let d = phi.dim();
    if phi.coupling != Coupling::Tensor {
        return Err(invalid("coupling", "partial derivatives need tensor coupling"));
    }
    for len in [alpha.len(), x.len(), y.len()] {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, got: len });
        }
    }
    let faa = FaaDiBruno::new(alpha.iter().copied().max().unwrap_or(0))?;
    let mut out = Complex64::new(1.0, 0.0);
    for c in 0..d {
        let single = PerturbationMap::scalar(phi.components[c], phi.growth_exponent, phi.growth_constant, phi.class)?;
        out *= scalar_derivative(&faa, &single, alpha[c], x[c], &y[c..=c])?;
    }
    Ok(out)
}

/// Sample box [-x_max, x_max] × [-y_max, y_max] per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeGrid {
    pub x_max: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for DerivativeGrid {
    fn default() -> Self {
        Self { x_max: 4.0, y_max: 8.0, nx: 33, ny: 33 }
    }
}

impl DerivativeGrid {
    fn xs(&self) -> Vec<f64> {
        linspace(self.x_max, self.nx)
    }

    fn ys(&self) -> Vec<f64> {
        linspace(self.y_max, self.ny)
    }
}

fn linspace(r: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1).max(1) as f64).collect()
}

pub const DEFAULT_M_CANDIDATES: [f64; 7] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBoundReport {
    /// Smallest passing candidate.
    pub m: f64,
    /// Smallest real m that would pass on the grid.
    pub required: f64,
    /// min over the grid of log(bound) - log|∂σ| at the chosen m.
    pub worst_margin: f64,
    /// (n, x, y) of the worst margin.
    pub worst_at: (usize, Vec<f64>, Vec<f64>),
}

struct BoundPoint {
    n: usize,
    log_lhs: f64,
    omega_y: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Smallest m among `candidates` with
/// |∂^α σ(x,y)| <= (4d)^n e^{d·m·ω(|y|)} e^{ℓφ*(n/ℓ)} for 1 <= |α| = n <= n_max.
pub fn check_derivative_bound(
    phi: &PerturbationMap,
    w: &SubadditiveWeight,
    ell: f64,
    n_max: usize,
    grid: &DerivativeGrid,
    candidates: &[f64],
) -> Result<DerivativeBoundReport> {
    if ell.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
        return Err(invalid("ell", "must be positive"));
    }
    let d = phi.dim();
    let faa = FaaDiBruno::new(n_max)?;
    let base: Vec<f64> = (0..=n_max)
        .map(|n| Ok(n as f64 * libm::log(4.0 * d as f64) + ell * w.young_conjugate(n as f64 / ell)?))
        .collect::<Result<_>>()?;
    let points = bound_points(&faa, phi, w, n_max, grid)?;

    let dm = d as f64;
    let mut required = 0.0f64;
    for p in &points {
        let excess = p.log_lhs - base[p.n];
        if excess > 0.0 {
            required = required.max(if p.omega_y > 0.0 { excess / (dm * p.omega_y) } else { f64::INFINITY });
        }
    }
    let mut sorted: Vec<f64> = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let margin = |m: f64, p: &BoundPoint| base[p.n] + dm * m * p.omega_y - p.log_lhs;
    let Some(&m) = sorted.iter().find(|&&m| points.iter().all(|p| margin(m, p) >= 0.0)) else {
        let top = sorted.last().copied().unwrap_or(0.0);
        let worst = points.iter().min_by(|a, b| margin(top, a).total_cmp(&margin(top, b)));
        let at = worst.map(|p| format!("n={}, x={:?}, y={:?}", p.n, p.x, p.y)).unwrap_or_default();
        return Err(Error::NoCandidate(format!("required m = {required}; worst at {at}")));
    };
    let worst = points.iter().min_by(|a, b| margin(m, a).total_cmp(&margin(m, b)));
    let (worst_margin, worst_at) = match worst {
        Some(p) => (margin(m, p), (p.n, p.x.clone(), p.y.clone())),
        None => (f64::INFINITY, (0, Vec::new(), Vec::new())),
    };
    Ok(DerivativeBoundReport { m, required, worst_margin, worst_at })
}

fn bound_points(
    faa: &FaaDiBruno,
    phi: &PerturbationMap,
    w: &SubadditiveWeight,
    n_max: usize,
    grid: &DerivativeGrid,
) -> Result<Vec<BoundPoint>> {
    let (xs, ys) = (grid.xs(), grid.ys());
    let d = phi.dim();
    let mut out = Vec::new();
    if phi.arg_dim() == 1 {
        for y in tensor_points(&ys, d) {
            let omega_y = w.omega(euclid(&y));
            for &x in &xs {
                for n in 1..=n_max {
                    let v = scalar_derivative(faa, phi, n, x, &y)?.norm();
                    if v > 0.0 {
                        out.push(BoundPoint { n, log_lhs: libm::log(v), omega_y, x: alloc::vec![x], y: y.clone() });
                    }
                }
            }
        }
        return Ok(out);
    }
    // Tensor coupling: |∂^α σ| = ∏_c |∂^{α_c} e^{iφ_c(x_c)y_c}|.
    let mut tables = Vec::with_capacity(d);
    for c in 0..d {
        let single = PerturbationMap::scalar(phi.components[c], phi.growth_exponent, phi.growth_constant, phi.class)?;
        let mut t = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                let row: Vec<f64> = (0..=n_max)
                    .map(|n| scalar_derivative(faa, &single, n, x, &[y]).map(|v| v.norm()))
                    .collect::<Result<_>>()?;
                t.push(row);
            }
        }
        tables.push(t);
    }
    let cells = xs.len() * ys.len();
    let mut idx = alloc::vec![0usize; d];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| xs[i / ys.len()]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| ys[i % ys.len()]).collect();
        let omega_y = w.omega(euclid(&y));
        for n in 1..=n_max {
            let mut best = 0.0f64;
            for alpha in multi_indices(d, n) {
                let v: f64 = (0..d).map(|c| tables[c][idx[c]][alpha[c]]).product();
                best = best.max(v);
            }
            if best > 0.0 {
                out.push(BoundPoint { n, log_lhs: libm::log(best), omega_y, x: x.clone(), y: y.clone() });
            }
        }
        if !advance(&mut idx, cells) {
            break;
        }
    }
    Ok(out)
}

fn tensor_points(axis: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut idx = alloc::vec![0usize; d];
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        if !advance(&mut idx, axis.len()) {
            return out;
        }
    }
}

fn advance(idx: &mut [usize], radix: usize) -> bool {
    for i in idx.iter_mut().rev() {
        *i += 1;
        if *i < radix {
            return true;
        }
        *i = 0;
    }
    false
}

/// Every α ∈ ℕ^d with |α| = n.
pub fn multi_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return alloc::vec![alloc::vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in multi_indices(d - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// G(z) = ∏_{k=1}^{K} (1 + z²/k^{2s}) with its Taylor data.
#[derive(Debug, Clone, PartialEq)]
pub struct EntireOperatorModel {
    pub truncation: usize,
    pub order: f64,
    pub weight: SubadditiveWeight,
    /// m_k = k^s.
    pub roots: Vec<f64>,
    /// c_n = G^{(n)}(0)/n!, n = 0..=2K.
    pub coefficients: Vec<f64>,
    /// max over dyadic circles |z| = 2^j, j <= 10, of log|G| / (1 + ω(|z|)).
    pub growth_constant: f64,
    /// Largest N with log G(x) >= N ω(x) on [1, 10³].
    pub ellipticity: f64,
}

pub const GROWTH_CIRCLES: u32 = 10;
const GROWTH_ANGLES: usize = 64;
const ELLIPTICITY_POINTS: usize = 2001;

pub fn build_operator(truncation: usize, s: f64) -> Result<EntireOperatorModel> {
    if truncation == 0 {
        return Err(invalid("K", "must be positive"));
    }
    let weight = SubadditiveWeight::gevrey(s)?;
    let roots: Vec<f64> = (1..=truncation).map(|k| libm::pow(k as f64, s)).collect();
    let mut coefficients = alloc::vec![1.0];
    for m in &roots {
        let q = 1.0 / (m * m);
        let mut next = alloc::vec![0.0; coefficients.len() + 2];
        for (i, c) in coefficients.iter().enumerate() {
            next[i] += c;
            next[i + 2] += c * q;
        }
        coefficients = next;
    }
    let mut model = EntireOperatorModel {
        truncation,
        order: s,
        weight,
        roots,
        coefficients,
        growth_constant: 0.0,
        ellipticity: 0.0,
    };
    let mut mg = 0.0f64;
    for j in 0..=GROWTH_CIRCLES {
        let r = libm::pow(2.0, j as f64);
        for a in 0..GROWTH_ANGLES {
            let z = Complex64::from_polar(r, 2.0 * core::f64::consts::PI * a as f64 / GROWTH_ANGLES as f64);
            mg = mg.max(libm::log(model.eval(z).norm()) / (1.0 + weight.omega(r)));
        }
    }
    model.growth_constant = mg;
    model.ellipticity = model.ellipticity_on(1.0, 1e3);
    Ok(model)
}

impl EntireOperatorModel {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.roots.iter().fold(Complex64::new(1.0, 0.0), |acc, m| acc * (1.0 + z * z / (m * m)))
    }

    /// c_n, zero beyond the degree.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients.get(n).copied().unwrap_or(0.0)
    }

    /// b_n = (-i)ⁿ c_n.
    pub fn b(&self, n: usize) -> Complex64 {
        Complex64::new(0.0, -1.0).powu(n as u32) * self.coefficient(n)
    }

    pub fn degree(&self) -> usize {
        2 * self.truncation
    }

    /// min of log G(x)/ω(x) over a log-spaced grid of [a, b].
    pub fn ellipticity_on(&self, a: f64, b: f64) -> f64 {
        let (la, lb) = (libm::log(a), libm::log(b));
        (0..ELLIPTICITY_POINTS)
            .map(|i| {
                let x = libm::exp(la + (lb - la) * i as f64 / (ELLIPTICITY_POINTS - 1) as f64);
                libm::log(self.eval(Complex64::new(x, 0.0)).re) / self.weight.omega(x)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReport {
    pub m: f64,
    /// min over n of log(e^m e^{-mφ*(n/m)}) - log|c_n|.
    pub worst_margin: f64,
    pub worst_n: usize,
    pub violation: Option<usize>,
}

impl CauchyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// |c_n| <= e^m e^{-mφ*(n/m)} for n <= n_max.
pub fn check_cauchy_bound(model: &EntireOperatorModel, m: f64, n_max: usize) -> Result<CauchyReport> {
    if m < model.growth_constant {
        return Err(invalid("m", format!("must be at least m_G = {}", model.growth_constant)));
    }
    let mut report = CauchyReport { m, worst_margin: f64::INFINITY, worst_n: 0, violation: None };
    for n in 0..=n_max {
        let c = model.coefficient(n).abs();
        if c == 0.0 {
            continue;
        }
        let margin = m - m * model.weight.young_conjugate(n as f64 / m)? - libm::log(c);
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_n = n;
        }
        if margin < 0.0 && report.violation.is_none() {
            report.violation = Some(n);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOutput {
    pub signal: SampledSignal,
    /// Number of nonzero terms summed.
    pub terms: usize,
    /// Largest |iⁿ c_n f^{(n)}| of the highest-order term on the grid.
    pub last_term_max: f64,
}

/// G(D)f = Σ iⁿ c_n f^{(n)}, exact for the polynomial model.
pub fn apply_operator(model: &EntireOperatorModel, f: &AnalyticSignal, axis: UniformGrid) -> Result<OperatorOutput> {
    let deg = model.degree();
    let weights: Vec<Complex64> = (0..=deg).map(|n| Complex64::new(0.0, 1.0).powu(n as u32) * model.coefficient(n)).collect();
    let mut values = Vec::with_capacity(axis.len());
    let mut last = 0.0f64;
    for x in axis.nodes() {
        let ders = f.derivatives(deg, x)?;
        let terms: Vec<Complex64> = weights.iter().zip(&ders).map(|(w, d)| w * d).collect();
        last = last.max(terms[deg].norm());
        values.push(crate::sum::pairwise_complex(&terms));
    }
    let terms = model.coefficients.iter().filter(|c| **c != 0.0).count();
    Ok(OperatorOutput { signal: SampledSignal::new(1, axis, values)?, terms, last_term_max: last })
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// a_k^{(r)}(x) = Σ_{n>=k} C(n,k) b_n g^{(n-k+r)}(x) on a grid, so that
/// G(-D)(gh) = Σ_k a_k h^{(k)}.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductExpansion {
    pub k_max: usize,
    pub r_max: usize,
    pub axis: UniformGrid,
    /// Indexed [k][r][x], row-major.
    pub values: Vec<Complex64>,
}

pub fn product_expansion(
    model: &EntireOperatorModel,
    g: &AnalyticSignal,
    k_max: usize,
    r_max: usize,
    axis: UniformGrid,
) -> Result<ProductExpansion> {
    let deg = model.degree();
    let nx = axis.len();
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); (k_max + 1) * (r_max + 1) * nx];
    let b: Vec<Complex64> = (0..=deg).map(|n| model.b(n)).collect();
    for (ix, x) in axis.nodes().enumerate() {
        let gd = g.derivatives(deg + r_max, x)?;
        for k in 0..=k_max.min(deg) {
            for r in 0..=r_max {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in k..=deg {
                    acc += b[n] * binomial(n, k) * gd[n - k + r];
                }
                values[(k * (r_max + 1) + r) * nx + ix] = acc;
            }
        }
    }
    Ok(ProductExpansion { k_max, r_max, axis, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBoundRow {
    pub m0: f64,
    /// max |a_k^{(r)}(x)| e^{m₀φ*(k/m₀) - ℓφ*(r/ℓ)} over the table.
    pub required_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBoundReport {
    pub ell: f64,
    pub rows: Vec<CoefficientBoundRow>,
    /// Smallest m₀ whose constant fits a candidate, with that candidate.
    pub smallest: Option<(f64, f64)>,
    /// m₀ = 3·ceil(m_G) with its required constant.
    pub reference: CoefficientBoundRow,
}

impl CoefficientBoundReport {
    pub fn passed(&self) -> bool {
        self.smallest.is_some()
    }
}

pub const DEFAULT_M0_CANDIDATES: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// 2^0, 2^1, …, 2^40.
pub fn default_c_candidates() -> Vec<f64> {
    (0..=40).map(|j| libm::pow(2.0, j as f64)).collect()
}

impl ProductExpansion {
    pub fn get(&self, k: usize, r: usize, ix: usize) -> Complex64 {
        self.values[(k * (self.r_max + 1) + r) * self.axis.len() + ix]
    }

    /// max over the grid of |Σ_k a_k h^{(k)} - Σ_n b_n (gh)^{(n)}|, the
    /// latter by Leibniz from the derivatives of g and h.
    pub fn reassembly_residual(&self, model: &EntireOperatorModel, g: &AnalyticSignal, h: &AnalyticSignal) -> Result<f64> {
        let deg = model.degree();
        if self.k_max < deg {
            return Err(invalid("k_max", format!("must reach the degree {deg}")));
        }
        let mut worst = 0.0f64;
        for (ix, x) in self.axis.nodes().enumerate() {
            let gd = g.derivatives(deg, x)?;
            let hd = h.derivatives(deg, x)?;
            let mut lhs = Complex64::new(0.0, 0.0);
            for (k, hk) in hd.iter().enumerate() {
                lhs += self.get(k, 0, ix) * hk;
            }
            let mut rhs = Complex64::new(0.0, 0.0);
            for n in 0..=deg {
                let mut prod = Complex64::new(0.0, 0.0);
                for j in 0..=n {
                    prod += gd[j] * hd[n - j] * binomial(n, j);
                }
                rhs += model.b(n) * prod;
            }
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }

    /// Fails with [`Error::Reassembly`] above `tolerance`.
    pub fn verify_reassembly(
        &self,
        model: &EntireOperatorModel,
        g: &AnalyticSignal,
        h: &AnalyticSignal,
        tolerance: f64,
    ) -> Result<f64> {
        let residual = self.reassembly_residual(model, g, h)?;
        if residual > tolerance {
            return Err(Error::Reassembly { residual, tolerance });
        }
        Ok(residual)
    }

    fn required_c(&self, w: &SubadditiveWeight, m0: f64, ell: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..=self.k_max {
            let ck = m0 * w.young_conjugate(k as f64 / m0)?;
            for r in 0..=self.r_max {
                let log_bound = -ck + ell * w.young_conjugate(r as f64 / ell)?;
                for ix in 0..self.axis.len() {
                    let a = self.get(k, r, ix).norm();
                    if a > 0.0 {
                        worst = worst.max(libm::exp(libm::log(a) - log_bound));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Sweeps m₀ and C_ℓ for |a_k^{(r)}| <= C_ℓ e^{-m₀φ*(k/m₀) + ℓφ*(r/ℓ)}.
    pub fn coefficient_bound(
        &self,
        model: &EntireOperatorModel,
        ell: f64,
        m0_candidates: &[f64],
        c_candidates: &[f64],
    ) -> Result<CoefficientBoundReport> {
        if ell.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
            return Err(invalid("ell", "must be positive"));
        }
        let w = model.weight;
        let mut m0s = m0_candidates.to_vec();
        m0s.sort_by(f64::total_cmp);
        let rows: Vec<CoefficientBoundRow> = m0s
            .iter()
            .map(|&m0| Ok(CoefficientBoundRow { m0, required_c: self.required_c(&w, m0, ell)? }))
            .collect::<Result<_>>()?;
        let mut cs = c_candidates.to_vec();
        cs.sort_by(f64::total_cmp);
        let smallest = rows.iter().find_map(|row| {
            cs.iter().find(|&&c| row.required_c <= c).map(|&c| (row.m0, c))
        });
        let m0 = 3.0 * libm::ceil(model.growth_constant);
        let reference = CoefficientBoundRow { m0, required_c: self.required_c(&w, m0, ell)? };
        Ok(CoefficientBoundReport { ell, rows, smallest, reference })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{DerivativeClass, ScalarMap};
    use core::f64::consts::PI;

    #[test]
    fn partition_examples() {
        let one = enumerate_partitions(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.partitions[0].counts, alloc::vec![1]);
        assert_eq!(one.weight_sum(), 1);
        let three = enumerate_partitions(3).unwrap();
        assert_eq!(three.len(), 3);
        assert_eq!(three.weight_sum(), 4);
        assert_eq!(enumerate_partitions(12).unwrap().weight_sum(), 2048);
        assert_eq!(enumerate_partitions(0).unwrap_err(), Error::PartitionOrder(0));
        assert_eq!(enumerate_partitions(26).unwrap_err(), Error::PartitionOrder(26));
        // Faà di Bruno coefficients of order n sum to the Bell number.
        let bell: u128 = enumerate_partitions(5).unwrap().partitions.iter().map(|p| p.faa_coefficient).sum();
        assert_eq!(bell, 52);
    }

    #[test]
    fn first_derivative_is_chain_rule() {
        let phi = PerturbationMap::sine(0.3);
        let (x, y) = (0.7, 1.3);
        let d1 = symbol_nth_derivative(&phi, 1, x, &[y]).unwrap();
        let expect = Complex64::new(0.0, phi.components[0].derivative(1, x) * y) * cis(phi.components[0].value(x) * y);
        assert!((d1 - expect).norm() < 1e-14);
        let constant = PerturbationMap::scalar(ScalarMap::Constant { value: 2.0 }, 0.0, 2.0, DerivativeClass::SchwartzBounded).unwrap();
        for n in 1..8 {
            assert_eq!(symbol_nth_derivative(&constant, n, x, &[y]).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn fourth_derivative_matches_central_difference() {
        let phi = PerturbationMap::sine(0.3);
        let (x, y, h) = (0.7, 1.3, 1e-2);
        let s = |t: f64| cis(phi.components[0].value(t) * y);
        let fd = (s(x + 2.0 * h) - s(x + h) * 4.0 + s(x) * 6.0 - s(x - h) * 4.0 + s(x - 2.0 * h)) / (h * h * h * h);
        let exact = symbol_nth_derivative(&phi, 4, x, &[y]).unwrap();
        // 17-digit rounding of a 40-digit reference from an independent arbitrary-precision evaluation.
        let reference = Complex64::new(-34.996_114_138_962_15, 18.639_837_893_036_85);
        assert!((exact - reference).norm() / reference.norm() < 1e-13);
        assert!((fd - exact).norm() / exact.norm() < 1e-3);
    }

    #[test]
    fn derivative_bound_examples() {
        let w = SubadditiveWeight::gevrey(2.0).unwrap();
        let grid = DerivativeGrid { nx: 17, ny: 17, ..DerivativeGrid::default() };
        let zero = check_derivative_bound(&PerturbationMap::zero(), &w, 1.0, 12, &grid, &DEFAULT_M_CANDIDATES).unwrap();
        assert_eq!(zero.m, 0.0);
        let sine = check_derivative_bound(&PerturbationMap::sine(0.3), &w, 1.0, 12, &grid, &DEFAULT_M_CANDIDATES).unwrap();
        assert!(sine.m <= 16.0 && sine.worst_margin >= 0.0);
        let tensor = PerturbationMap::new(
            alloc::vec![ScalarMap::Sine { amplitude: 2.0 * PI * 0.3 }; 2],
            Coupling::Tensor,
            0.0,
            1.0,
            DerivativeClass::UltraBounded,
        )
        .unwrap();
        let grid2 = DerivativeGrid { nx: 9, ny: 9, ..DerivativeGrid::default() };
        let t = check_derivative_bound(&tensor, &w, 1.0, 8, &grid2, &DEFAULT_M_CANDIDATES).unwrap();
        assert!(t.m <= 16.0);
        let fail = check_derivative_bound(&PerturbationMap::sine(0.3), &w, 1.0, 12, &grid, &[0.0]).unwrap_err();
        assert!(matches!(fail, Error::NoCandidate(_)));
    }

    #[test]
    fn partial_derivative_factorises() {
        let tensor = PerturbationMap::new(
            alloc::vec![ScalarMap::Sine { amplitude: 1.0 }, ScalarMap::Cosine { amplitude: 0.5 }],
            Coupling::Tensor,
            0.0,
            1.0,
            DerivativeClass::UltraBounded,
        )
        .unwrap();
        let v = symbol_partial_derivative(&tensor, &[2, 3], &[0.3, -0.4], &[1.1, 2.0]).unwrap();
        let a = symbol_nth_derivative(&PerturbationMap::scalar(tensor.components[0], 0.0, 1.0, DerivativeClass::UltraBounded).unwrap(), 2, 0.3, &[1.1]).unwrap();
        let b = symbol_nth_derivative(&PerturbationMap::scalar(tensor.components[1], 0.0, 1.0, DerivativeClass::UltraBounded).unwrap(), 3, -0.4, &[2.0]).unwrap();
        assert!((v - a * b).norm() < 1e-13);
    }

    #[test]
    fn operator_coefficients() {
        let g1 = build_operator(1, 2.0).unwrap();
        assert_eq!(g1.coefficients, alloc::vec![1.0, 0.0, 1.0]);
        assert_eq!(g1.b(0), Complex64::new(1.0, 0.0));
        assert_eq!(g1.b(1), Complex64::new(0.0, 0.0));
        assert!((g1.b(2) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let g2 = build_operator(2, 2.0).unwrap();
        assert!((g2.coefficient(4) - 1.0 / 16.0).abs() < 1e-15);
        assert!((g2.coefficient(2) - (1.0 + 1.0 / 16.0)).abs() < 1e-15);
        assert_eq!(g2.coefficient(5), 0.0);
        assert!(build_operator(0, 2.0).is_err());
        let g8 = build_operator(8, 2.0).unwrap();
        assert_eq!(g8.coefficient(0), 1.0);
        assert!((1..=16).step_by(2).all(|n| g8.coefficient(n) == 0.0));
        assert!(g8.ellipticity_on(10.0, 1e3) >= 2.0);
    }

    #[test]
    fn cauchy_bound_holds_at_rounded_growth_constant() {
        let g8 = build_operator(8, 2.0).unwrap();
        let r = check_cauchy_bound(&g8, libm::ceil(g8.growth_constant), 40).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(check_cauchy_bound(&g8, 0.5 * g8.growth_constant, 40).is_err());
    }

    #[test]
    fn operator_on_examples() {
        let axis = UniformGrid::new(4.0, 64).unwrap();
        let g2 = build_operator(2, 2.0).unwrap();
        let out = apply_operator(&g2, &AnalyticSignal::plane_wave(3.0), axis).unwrap();
        let mult = g2.eval(Complex64::new(-3.0, 0.0));
        for (x, v) in axis.nodes().zip(&out.signal.values) {
            assert!((v - mult * cis(3.0 * x)).norm() < 1e-10);
        }
        let g1 = build_operator(1, 2.0).unwrap();
        let f = AnalyticSignal::gaussian(1.0, 1.0, 0.0, 0.0);
        let out = apply_operator(&g1, &f, axis).unwrap();
        for (t, v) in axis.nodes().zip(&out.signal.values) {
            let e = libm::exp(-PI * t * t);
            let second = (4.0 * PI * PI * t * t - 2.0 * PI) * e;
            assert!((v - Complex64::new(e - second, 0.0)).norm() < 1e-12);
        }
        let one = apply_operator(&build_operator(5, 2.0).unwrap(), &AnalyticSignal::plane_wave(0.0), axis).unwrap();
        assert!(one.signal.values.iter().all(|v| (v - 1.0).norm() < 1e-15));
    }

    #[test]
    fn expansion_examples() {
        let axis = UniformGrid::new(2.0, 16).unwrap();
        let g2 = build_operator(2, 2.0).unwrap();
        let e = product_expansion(&g2, &AnalyticSignal::plane_wave(0.0), 6, 2, axis).unwrap();
        for k in 0..=6 {
            for ix in 0..16 {
                assert!((e.get(k, 0, ix) - g2.b(k)).norm() < 1e-15);
                assert_eq!(e.get(k, 1, ix).norm(), 0.0);
            }
        }
        let g = AnalyticSignal::gaussian(1.0, 1.0, 0.0, 0.0);
        let e = product_expansion(&g2, &g, 4, 3, axis).unwrap();
        let r = e.verify_reassembly(&g2, &g, &AnalyticSignal::plane_wave(2.5), 1e-8).unwrap();
        assert!(r < 1e-8);
        let short = product_expansion(&g2, &g, 2, 0, axis).unwrap();
        assert!(short.reassembly_residual(&g2, &g, &AnalyticSignal::plane_wave(1.0)).is_err());
        let report = e.coefficient_bound(&g2, 1.0, &DEFAULT_M0_CANDIDATES, &default_c_candidates()).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert!(multi_indices(2, 5).iter().all(|a| a.iter().sum::<usize>() == 5));
    }
}
