//! The symbol σ(x,y) = e^{iφ(x)·y}, its four-dimensional STFT against
//! g ⊗ g, and sup-ratio diagnostics of its decay.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::Fft2;
use crate::grid::UniformGrid;
use crate::par;
use crate::signal::{cis, cis_turns, AnalyticSignal};
use crate::stft::check_window;
use crate::weights::{SubadditiveWeight, STABILITY_THRESHOLD};

/// Smooth real function of one variable with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarMap {
    Zero,
    Constant { value: f64 },
    /// c·x.
    Linear { slope: f64 },
    /// a·sin(x).
    Sine { amplitude: f64 },
    /// a·cos(x).
    Cosine { amplitude: f64 },
    /// a·(1+x²)^e.
    Bump { amplitude: f64, exponent: f64 },
}

impl ScalarMap {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            ScalarMap::Zero => 0.0,
            ScalarMap::Constant { value } => value,
            ScalarMap::Linear { slope } => slope * x,
            ScalarMap::Sine { amplitude } => amplitude * libm::sin(x),
            ScalarMap::Cosine { amplitude } => amplitude * libm::cos(x),
            ScalarMap::Bump { amplitude, exponent } => amplitude * libm::pow(1.0 + x * x, exponent),
        }
    }

    pub fn derivative(&self, n: usize, x: f64) -> f64 {
        self.derivatives(n, x)[n]
    }

    /// f(x), f'(x), ..., f^{(n)}(x).
    pub fn derivatives(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = alloc::vec![0.0; n + 1];
        match *self {
            ScalarMap::Zero => {}
            ScalarMap::Constant { value } => out[0] = value,
            ScalarMap::Linear { slope } => {
                out[0] = slope * x;
                if n >= 1 {
                    out[1] = slope;
                }
            }
            ScalarMap::Sine { amplitude } | ScalarMap::Cosine { amplitude } => {
                let (s, c) = libm::sincos(x);
                let cycle = [s, c, -s, -c];
                let offset = if matches!(self, ScalarMap::Sine { .. }) { 0 } else { 1 };
                for (k, v) in out.iter_mut().enumerate() {
                    *v = amplitude * cycle[(k + offset) % 4];
                }
            }
            ScalarMap::Bump { amplitude, exponent } => {
                // Taylor coefficients of w = u^e with u = (1+x²) + 2x·h + h².
                let u = [1.0 + x * x, 2.0 * x, 1.0];
                let mut w = alloc::vec![0.0; n + 1];
                w[0] = libm::pow(u[0], exponent);
                for k in 1..=n {
                    let mut acc = 0.0;
                    for j in 1..=k.min(2) {
                        acc += (exponent * j as f64 - (k - j) as f64) * u[j] * w[k - j];
                    }
                    w[k] = acc / (k as f64 * u[0]);
                }
                let mut fact = 1.0;
                for (k, v) in out.iter_mut().enumerate() {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    *v = amplitude * fact * w[k];
                }
            }
        }
        out
    }

    pub fn is_even(&self) -> bool {
        matches!(self, ScalarMap::Zero | ScalarMap::Constant { .. } | ScalarMap::Cosine { .. } | ScalarMap::Bump { .. })
    }

    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            ScalarMap::Zero => ScalarMap::Zero,
            ScalarMap::Constant { value } => ScalarMap::Constant { value: c * value },
            ScalarMap::Linear { slope } => ScalarMap::Linear { slope: c * slope },
            ScalarMap::Sine { amplitude } => ScalarMap::Sine { amplitude: c * amplitude },
            ScalarMap::Cosine { amplitude } => ScalarMap::Cosine { amplitude: c * amplitude },
            ScalarMap::Bump { amplitude, exponent } => ScalarMap::Bump { amplitude: c * amplitude, exponent },
        }
    }
}

impl fmt::Display for ScalarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMap::Zero => write!(f, "zero"),
            ScalarMap::Constant { value } => write!(f, "const({value})"),
            ScalarMap::Linear { slope } => write!(f, "linear({slope})"),
            ScalarMap::Sine { amplitude } => write!(f, "sin({amplitude})"),
            ScalarMap::Cosine { amplitude } => write!(f, "cos({amplitude})"),
            ScalarMap::Bump { amplitude, exponent } => write!(f, "bump({amplitude};{exponent})"),
        }
    }
}

/// How the components of a vector map read their argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// φ: ℝ → ℝ^d, every component reads the same scalar x.
    Line,
    /// φ(x)_j = φ_j(x_j).
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeClass {
    /// Every derivative of order >= 1 bounded.
    SchwartzBounded,
    /// Derivatives bounded by Gevrey-type factorial growth.
    UltraBounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMap {
    pub components: Vec<ScalarMap>,
    pub coupling: Coupling,
    /// b in |φ(x)| <= C(1+|x|)^b.
    pub growth_exponent: f64,
    pub growth_constant: f64,
    pub class: DerivativeClass,
}

impl PerturbationMap {
    pub fn scalar(map: ScalarMap, growth_exponent: f64, growth_constant: f64, class: DerivativeClass) -> Result<Self> {
        Self::new(alloc::vec![map], Coupling::Tensor, growth_exponent, growth_constant, class)
    }

    pub fn new(
        components: Vec<ScalarMap>,
        coupling: Coupling,
        growth_exponent: f64,
        growth_constant: f64,
        class: DerivativeClass,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("components", "at least one component required"));
        }
        if !(0.0..1.0).contains(&growth_exponent) {
            return Err(invalid("growth_exponent", "must lie in [0, 1)"));
        }
        Ok(Self { components, coupling, growth_exponent, growth_constant, class })
    }

    /// φ(x) = 2π·a·sin x, bounded with all derivatives.
    pub fn sine(amplitude: f64) -> Self {
        let a = 2.0 * PI * amplitude;
        Self::scalar(ScalarMap::Sine { amplitude: a }, 0.0, a.abs(), DerivativeClass::UltraBounded)
            .expect("valid")
    }

    /// φ(x) = 2π·a·(1+x²)^e with growth exponent 2e.
    pub fn bump(amplitude: f64, exponent: f64) -> Result<Self> {
        let a = 2.0 * PI * amplitude;
        Self::scalar(
            ScalarMap::Bump { amplitude: a, exponent },
            2.0 * exponent,
            a.abs(),
            DerivativeClass::UltraBounded,
        )
    }

    pub fn zero() -> Self {
        Self::scalar(ScalarMap::Zero, 0.0, 0.0, DerivativeClass::UltraBounded).expect("valid")
    }

    /// The same map with a different declared growth exponent.
    pub fn with_declared_growth(&self, b: f64) -> Result<Self> {
        Self::new(self.components.clone(), self.coupling, b, self.growth_constant, self.class)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Length of the x argument.
    pub fn arg_dim(&self) -> usize {
        match self.coupling {
            Coupling::Line => 1,
            Coupling::Tensor => self.dim(),
        }
    }

    fn arg(&self, x: &[f64], j: usize) -> f64 {
        match self.coupling {
            Coupling::Line => x[0],
            Coupling::Tensor => x[j],
        }
    }

    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().enumerate().map(|(j, c)| c.value(self.arg(x, j))).collect()
    }

    /// Verifies |φ(x)| <= C(1+|x|)^b on `points` samples per axis of
    /// [-x_max, x_max] (one axis for line coupling, each axis separately
    /// along coordinate lines otherwise).
    pub fn check_growth(&self, x_max: f64, points: usize) -> bool {
        let d = self.arg_dim();
        (0..points).all(|i| {
            let t = -x_max + 2.0 * x_max * i as f64 / (points - 1).max(1) as f64;
            (0..d).all(|axis| {
                let mut x = alloc::vec![0.0; d];
                x[axis] = t;
                let v = crate::weights::euclid(&self.value(&x));
                let r = crate::weights::euclid(&x);
                v <= self.growth_constant * libm::pow(1.0 + r, self.growth_exponent) * (1.0 + 1e-12) + 1e-12
            })
        })
    }

    /// Largest |φ_j^{(k)}| for 1 <= k <= order over samples of [-x_max, x_max].
    pub fn derivative_sup(&self, order: usize, x_max: f64, points: usize) -> f64 {
        let mut sup = 0.0f64;
        for c in &self.components {
            for i in 0..points {
                let t = -x_max + 2.0 * x_max * i as f64 / (points - 1).max(1) as f64;
                for v in &c.derivatives(order, t)[1..] {
                    sup = sup.max(v.abs());
                }
            }
        }
        sup
    }
}

impl fmt::Display for PerturbationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.components.iter().enumerate() {
            if j > 0 {
                f.write_str("+")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "[b={}]", self.growth_exponent)
    }
}

/// e^{iφ(x)·y}.
pub fn symbol_eval(phi: &PerturbationMap, x: &[f64], y: &[f64]) -> Complex64 {
    let v = phi.value(x);
    let phase: f64 = v.iter().zip(y).map(|(a, b)| a * b).sum();
    cis(phase)
}

/// Sampling of (z₁, z₂) and the integration patch for (x, y); ζ₁ and ζ₂ run
/// over `patch.dual()`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolGrid {
    pub z1: UniformGrid,
    pub z2: UniformGrid,
    pub patch: UniformGrid,
}

impl SymbolGrid {
    pub fn new(z1: UniformGrid, z2: UniformGrid, patch: UniformGrid) -> Result<Self> {
        patch.require_fft()?;
        Ok(Self { z1, z2, patch })
    }

    pub fn zeta(&self) -> UniformGrid {
        self.patch.dual()
    }

    /// ζ-range and z-range both doubled at unchanged spacing, so every node
    /// of `self` is also a node of the result.
    pub fn doubled(&self) -> Self {
        Self {
            z1: self.z1.doubled(),
            z2: self.z2.doubled(),
            patch: UniformGrid::new(self.patch.half_width(), 2 * self.patch.len()).expect("doubling keeps validity"),
        }
    }

    pub fn memory_bytes(&self) -> u64 {
        let n = self.patch.len() as u64;
        self.z1.len() as u64 * self.z2.len() as u64 * n * n * core::mem::size_of::<Complex64>() as u64
    }
}

/// V_{g⊗g}σ sampled on z₁ × z₂ × ζ × ζ, row-major in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStft {
    pub grid: SymbolGrid,
    pub values: Vec<Complex64>,
    pub window: AnalyticSignal,
}

impl SymbolStft {
    pub fn index(&self, i1: usize, i2: usize, k1: usize, k2: usize) -> usize {
        let n = self.grid.patch.len();
        ((i1 * self.grid.z2.len() + i2) * n + k1) * n + k2
    }

    pub fn get(&self, i1: usize, i2: usize, k1: usize, k2: usize) -> Complex64 {
        self.values[self.index(i1, i2, k1, k2)]
    }

    /// sup of factor·|V| over the stored grid.
    pub fn decay_sup(&self, probe: &DecayProbe) -> f64 {
        let n = self.grid.patch.len();
        let zeta = self.grid.zeta();
        let (b, c) = probe.zeta_tables(&zeta);
        let mut sup = 0.0f64;
        for i1 in 0..self.grid.z1.len() {
            for i2 in 0..self.grid.z2.len() {
                let a = probe.z_factor(self.grid.z1.node(i1), self.grid.z2.node(i2));
                let base = self.index(i1, i2, 0, 0);
                for (k1, bk) in b.iter().enumerate() {
                    for (k2, ck) in c.iter().enumerate() {
                        sup = sup.max(a * bk * ck * self.values[base + k1 * n + k2].norm());
                    }
                }
            }
        }
        sup
    }
}

/// Per-z₁ precomputation shared by every z₂ in the row.
struct PatchKernel<'a> {
    grid: &'a SymbolGrid,
    fft: &'a Fft2,
    /// φ(z₁ + u_j).
    phase: Vec<f64>,
    /// e^{iφ(z₁+u_j) u_l} conj(g(u_j) g(u_l)) (-1)^{j+l}.
    base: Vec<Complex64>,
}

impl<'a> PatchKernel<'a> {
    fn new(phi: &PerturbationMap, taper: &[Complex64], grid: &'a SymbolGrid, fft: &'a Fft2, z1: f64) -> Self {
        let n = grid.patch.len();
        let phase: Vec<f64> = grid.patch.nodes().map(|u| phi.components[0].value(z1 + u)).collect();
        let mut base = Vec::with_capacity(n * n);
        for j in 0..n {
            for l in 0..n {
                base.push(cis(phase[j] * grid.patch.node(l)) * taper[j] * taper[l]);
            }
        }
        Self { grid, fft, phase, base }
    }

    /// Unphased, unscaled FFT of the windowed symbol patch at (z₁, z₂).
    fn transform(&self, z2: f64, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        let n = self.grid.patch.len();
        buf.clear();
        for j in 0..n {
            let c = cis(self.phase[j] * z2);
            buf.extend(self.base[j * n..(j + 1) * n].iter().map(|b| b * c));
        }
        self.fft.forward(buf, scratch);
    }
}

fn taper(g: &AnalyticSignal, patch: &UniformGrid) -> Vec<Complex64> {
    patch
        .nodes()
        .enumerate()
        .map(|(j, u)| g.eval(u).conj() * if j % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

fn require_scalar(phi: &PerturbationMap) -> Result<()> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: phi.dim() });
    }
    Ok(())
}

/// Full four-dimensional STFT of σ, refused when it would exceed `budget`
/// bytes.
pub fn symbol_stft_4d(phi: &PerturbationMap, g: &AnalyticSignal, grid: &SymbolGrid, budget: u64) -> Result<SymbolStft> {
    require_scalar(phi)?;
    let required = grid.memory_bytes();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    check_window(g, &grid.patch)?;
    let n = grid.patch.len();
    let h = grid.patch.spacing();
    let zeta = grid.zeta();
    let fft = Fft2::new(n, n)?;
    let taper = taper(g, &grid.patch);
    let row_len = grid.z2.len() * n * n;
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.z1.len() * row_len];
    par::for_each_row(&mut values, row_len, |i1, row| {
        let z1 = grid.z1.node(i1);
        let kernel = PatchKernel::new(phi, &taper, grid, &fft, z1);
        let mut buf = Vec::with_capacity(n * n);
        let mut scratch = Vec::new();
        for (i2, out) in row.chunks_mut(n * n).enumerate() {
            let z2 = grid.z2.node(i2);
            kernel.transform(z2, &mut buf, &mut scratch);
            for k1 in 0..n {
                let p1 = cis_turns(-z1 * zeta.node(k1));
                for k2 in 0..n {
                    let sign = if (k1 + k2) % 2 == 0 { h * h } else { -h * h };
                    out[k1 * n + k2] = buf[k1 * n + k2] * p1 * cis_turns(-z2 * zeta.node(k2)) * sign;
                }
            }
        }
    });
    Ok(SymbolStft { grid: *grid, values, window: *g })
}

/// V_{g⊗g}σ(z, ζ) by direct summation over the patch, for one point.
pub fn symbol_stft_point(phi: &PerturbationMap, g: &AnalyticSignal, patch: &UniformGrid, z: [f64; 2], zeta: [f64; 2]) -> Complex64 {
    let h = patch.spacing();
    let n = patch.len();
    let rows: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = z[0] + patch.node(j);
            let px = phi.components[0].value(x);
            let gx = g.eval(patch.node(j)).conj();
            crate::sum::pairwise_complex_by(n, &|l| {
                let y = z[1] + patch.node(l);
                cis(px * y) * gx * g.eval(patch.node(l)).conj() * cis_turns(-(x * zeta[0] + y * zeta[1]))
            })
        })
        .collect();
    crate::sum::pairwise_complex(&rows) * (h * h)
}

/// Which frequency variable the decay is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    /// Decay in ζ₁ against growth in z₂.
    Zeta1,
    /// Decay in ζ₂ against growth in |z₁|^b.
    Zeta2,
}

impl fmt::Display for DecayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayMode::Zeta1 => "zeta1",
            DecayMode::Zeta2 => "zeta2",
        })
    }
}

/// Multiplier applied to |V| before taking the sup. Every variant factors as
/// A(z₁,z₂)·B(ζ₁)·C(ζ₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayProbe {
    /// zeta1: (1+|ζ₁|)^N (1+|z₂|)^{-N}; zeta2: (1+|ζ₂|)^N (1+|z₁|)^{-Nb}.
    Poly { n: f64, mode: DecayMode, b: f64 },
    /// zeta1: e^{Nω(ζ₁) - kω(z₂)}; zeta2: e^{Nω(ζ₂) - kω(|z₁|^b)}.
    Exp { omega: SubadditiveWeight, n: f64, k: f64, mode: DecayMode, b: f64 },
}

impl DecayProbe {
    pub fn mode(&self) -> DecayMode {
        match self {
            DecayProbe::Poly { mode, .. } | DecayProbe::Exp { mode, .. } => *mode,
        }
    }

    pub fn order(&self) -> f64 {
        match self {
            DecayProbe::Poly { n, .. } | DecayProbe::Exp { n, .. } => *n,
        }
    }

    pub fn k(&self) -> Option<f64> {
        match self {
            DecayProbe::Exp { k, .. } => Some(*k),
            DecayProbe::Poly { .. } => None,
        }
    }

    fn z_factor(&self, z1: f64, z2: f64) -> f64 {
        match *self {
            DecayProbe::Poly { n, mode: DecayMode::Zeta1, .. } => libm::pow(1.0 + z2.abs(), -n),
            DecayProbe::Poly { n, mode: DecayMode::Zeta2, b } => libm::pow(1.0 + z1.abs(), -n * b),
            DecayProbe::Exp { omega, k, mode: DecayMode::Zeta1, .. } => libm::exp(-k * omega.omega(z2)),
            DecayProbe::Exp { omega, k, mode: DecayMode::Zeta2, b, .. } => {
                libm::exp(-k * omega.omega(libm::pow(z1.abs(), b)))
            }
        }
    }

    fn zeta_factor(&self, zeta: f64) -> f64 {
        match *self {
            DecayProbe::Poly { n, .. } => libm::pow(1.0 + zeta.abs(), n),
            DecayProbe::Exp { omega, n, .. } => libm::exp(n * omega.omega(zeta)),
        }
    }

    fn zeta_tables(&self, zeta: &UniformGrid) -> (Vec<f64>, Vec<f64>) {
        let active: Vec<f64> = zeta.nodes().map(|w| self.zeta_factor(w)).collect();
        let ones = alloc::vec![1.0; zeta.len()];
        match self.mode() {
            DecayMode::Zeta1 => (active, ones),
            DecayMode::Zeta2 => (ones, active),
        }
    }
}

/// Sups of each probe over the grid without storing the four-dimensional
/// array.
pub fn sweep_sups(phi: &PerturbationMap, g: &AnalyticSignal, grid: &SymbolGrid, probes: &[DecayProbe]) -> Result<Vec<f64>> {
    require_scalar(phi)?;
    check_window(g, &grid.patch)?;
    let n = grid.patch.len();
    let h2 = grid.patch.spacing() * grid.patch.spacing();
    let zeta = grid.zeta();
    let fft = Fft2::new(n, n)?;
    let taper = taper(g, &grid.patch);
    // Outer product B(ζ₁)C(ζ₂) per probe.
    let tables: Vec<Vec<f64>> = probes
        .iter()
        .map(|p| {
            let (b, c) = p.zeta_tables(&zeta);
            let mut t = Vec::with_capacity(n * n);
            for bk in &b {
                t.extend(c.iter().map(|ck| bk * ck * h2));
            }
            t
        })
        .collect();
    let rows = par::map_indices(grid.z1.len(), |i1| {
        let z1 = grid.z1.node(i1);
        let kernel = PatchKernel::new(phi, &taper, grid, &fft, z1);
        let mut buf = Vec::with_capacity(n * n);
        let mut scratch = Vec::new();
        let mut mags = alloc::vec![0.0; n * n];
        let mut sups = alloc::vec![0.0f64; probes.len()];
        for i2 in 0..grid.z2.len() {
            let z2 = grid.z2.node(i2);
            kernel.transform(z2, &mut buf, &mut scratch);
            for (m, v) in mags.iter_mut().zip(buf.iter()) {
                *m = v.norm();
            }
            for (p, probe) in probes.iter().enumerate() {
                let a = probe.z_factor(z1, z2);
                let t = &tables[p];
                let mut best = 0.0f64;
                for (m, w) in mags.iter().zip(t) {
                    best = best.max(m * w);
                }
                sups[p] = sups[p].max(a * best);
            }
        }
        sups
    });
    let mut out = alloc::vec![0.0f64; probes.len()];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o = o.max(v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub base: f64,
    pub doubled: f64,
    pub relative_change: f64,
    pub stable: bool,
}

impl StabilityReport {
    fn new(base: f64, doubled: f64) -> Self {
        let relative_change = (doubled - base) / base;
        Self {
            base,
            doubled,
            relative_change,
            stable: base.is_finite() && doubled.is_finite() && relative_change.abs() < STABILITY_THRESHOLD,
        }
    }
}

/// Each probe's sup on `grid` and on `grid.doubled()`.
pub fn decay_stability(
    phi: &PerturbationMap,
    g: &AnalyticSignal,
    grid: &SymbolGrid,
    probes: &[DecayProbe],
) -> Result<Vec<StabilityReport>> {
    let base = sweep_sups(phi, g, grid, probes)?;
    let doubled = sweep_sups(phi, g, &grid.doubled(), probes)?;
    Ok(base.into_iter().zip(doubled).map(|(a, b)| StabilityReport::new(a, b)).collect())
}

/// Polynomial decay ratio with its stability under doubling.
pub fn decay_ratio_poly(
    phi: &PerturbationMap,
    g: &AnalyticSignal,
    grid: &SymbolGrid,
    n: u32,
    mode: DecayMode,
    b: f64,
) -> Result<StabilityReport> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    Ok(decay_stability(phi, g, grid, &[DecayProbe::Poly { n: n as f64, mode, b }])?[0])
}

pub const DEFAULT_K_CANDIDATES: [f64; 6] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ExpDecayResult {
    pub k: f64,
    pub sup: f64,
    /// Every candidate with its report, in candidate order.
    pub table: Vec<(f64, StabilityReport)>,
}

/// Smallest k among `candidates` whose exponential decay ratio is stable.
#[allow(clippy::too_many_arguments)]
pub fn decay_ratio_exp(
    phi: &PerturbationMap,
    g: &AnalyticSignal,
    grid: &SymbolGrid,
    omega: SubadditiveWeight,
    n: u32,
    mode: DecayMode,
    b: f64,
    candidates: &[f64],
) -> Result<ExpDecayResult> {
    let mut ks: Vec<f64> = candidates.to_vec();
    ks.sort_by(f64::total_cmp);
    let probes: Vec<DecayProbe> =
        ks.iter().map(|&k| DecayProbe::Exp { omega, n: n as f64, k, mode, b }).collect();
    let reports = decay_stability(phi, g, grid, &probes)?;
    let table: Vec<(f64, StabilityReport)> = ks.iter().copied().zip(reports).collect();
    match table.iter().find(|(_, r)| r.stable) {
        Some(&(k, r)) => Ok(ExpDecayResult { k, sup: r.base, table }),
        None => {
            let mut msg = String::new();
            for (k, r) in &table {
                use core::fmt::Write;
                let _ = write!(msg, "k={k}: {:+.3}%; ", 100.0 * r.relative_change);
            }
            Err(Error::NoCandidate(msg))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> AnalyticSignal {
        AnalyticSignal::normalized_gaussian(1.0)
    }

    fn small_grid() -> SymbolGrid {
        SymbolGrid::new(
            UniformGrid::new(2.0, 8).unwrap(),
            UniformGrid::new(2.0, 8).unwrap(),
            UniformGrid::new(4.0, 32).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(symbol_eval(&PerturbationMap::zero(), &[1.3], &[-2.0]), Complex64::new(1.0, 0.0));
        let phi = PerturbationMap::sine(0.3);
        let v = symbol_eval(&phi, &[PI / 2.0], &[1.0]);
        assert!((v - cis(0.6 * PI)).norm() < 1e-14);
        let t = PerturbationMap::new(
            alloc::vec![ScalarMap::Sine { amplitude: 1.0 }, ScalarMap::Bump { amplitude: 0.5, exponent: 0.3 }],
            Coupling::Tensor,
            0.6,
            1.0,
            DerivativeClass::UltraBounded,
        )
        .unwrap();
        let (x, y) = ([0.4, -1.2], [2.0, 0.7]);
        let prod = cis(t.components[0].value(x[0]) * y[0]) * cis(t.components[1].value(x[1]) * y[1]);
        assert!((symbol_eval(&t, &x, &y) - prod).norm() < 1e-14);
        assert!((symbol_eval(&t, &x, &y).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bump_derivatives_match_closed_forms() {
        let m = ScalarMap::Bump { amplitude: 2.0, exponent: 0.3 };
        for x in [-2.0, 0.0, 0.7] {
            let d = m.derivatives(2, x);
            let u = 1.0 + x * x;
            assert!((d[0] - 2.0 * libm::pow(u, 0.3)).abs() < 1e-14);
            assert!((d[1] - 2.0 * 0.6 * x * libm::pow(u, -0.7)).abs() < 1e-14);
            let second = 2.0 * (0.6 * libm::pow(u, -0.7) + 0.6 * (-0.7) * 2.0 * x * x * libm::pow(u, -1.7));
            assert!((d[2] - second).abs() < 1e-13);
        }
    }

    #[test]
    fn growth_declarations() {
        assert!(PerturbationMap::sine(0.3).check_growth(1e3, 2001));
        let bump = PerturbationMap::bump(1.0, 0.3).unwrap();
        assert!(bump.check_growth(1e3, 2001));
        assert!(!bump.with_declared_growth(0.3).unwrap().check_growth(1e3, 2001));
        assert!(PerturbationMap::sine(0.3).derivative_sup(6, 10.0, 101) <= 2.0 * PI * 0.3 + 1e-12);
    }

    #[test]
    fn zero_symbol_separates() {
        let v = symbol_stft_4d(&PerturbationMap::zero(), &g(), &small_grid(), u64::MAX).unwrap();
        let zeta = small_grid().zeta();
        let mut err = 0.0f64;
        for i1 in 0..8 {
            for i2 in 0..8 {
                for k1 in 8..=24 {
                    for k2 in 8..=24 {
                        let expect = g().fourier(zeta.node(k1)).unwrap().norm() * g().fourier(zeta.node(k2)).unwrap().norm();
                        err = err.max((v.get(i1, i2, k1, k2).norm() - expect).abs());
                    }
                }
            }
        }
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn stored_matches_direct_sum_and_pointwise_bound() {
        let phi = PerturbationMap::sine(0.3);
        let grid = small_grid();
        let v = symbol_stft_4d(&phi, &g(), &grid, u64::MAX).unwrap();
        let zeta = grid.zeta();
        for &(i1, i2, k1, k2) in &[(3, 5, 10, 20), (0, 7, 16, 16), (6, 1, 2, 30)] {
            let direct = symbol_stft_point(&phi, &g(), &grid.patch, [grid.z1.node(i1), grid.z2.node(i2)], [zeta.node(k1), zeta.node(k2)]);
            assert!((direct - v.get(i1, i2, k1, k2)).norm() < 1e-12);
        }
        // |V| <= ‖g‖₁², ‖g‖₁ = 2^{1/4} · 1 for the normalised Gaussian.
        let bound = libm::sqrt(2.0);
        assert!(v.values.iter().all(|c| c.norm() <= bound + 1e-12));
    }

    #[test]
    fn conjugate_symmetries() {
        let grid = small_grid();
        let n = 32;
        let sine = symbol_stft_4d(&PerturbationMap::sine(0.3), &g(), &grid, u64::MAX).unwrap();
        let cosine = PerturbationMap::scalar(ScalarMap::Cosine { amplitude: 2.0 }, 0.0, 2.0, DerivativeClass::UltraBounded).unwrap();
        let even = symbol_stft_4d(&cosine, &g(), &grid, u64::MAX).unwrap();
        let mut err = 0.0f64;
        for i1 in 1..8 {
            for i2 in 1..8 {
                for k1 in 1..n {
                    for k2 in 0..n {
                        let a = sine.get(i1, i2, k1, k2).conj();
                        let b = sine.get(i1, 8 - i2, n - k1, k2);
                        err = err.max((a - b).norm());
                        let c = even.get(i1, i2, k1, k2);
                        let d = even.get(8 - i1, i2, n - k1, k2);
                        err = err.max((c - d).norm());
                    }
                }
            }
        }
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn budget_refusal_reports_bytes() {
        let err = symbol_stft_4d(&PerturbationMap::zero(), &g(), &small_grid(), 1000).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { required: 8 * 8 * 32 * 32 * 16, budget: 1000 });
    }

    #[test]
    fn streaming_sups_match_stored() {
        let phi = PerturbationMap::sine(0.3);
        let grid = small_grid();
        let v = symbol_stft_4d(&phi, &g(), &grid, u64::MAX).unwrap();
        let w = SubadditiveWeight::gevrey(2.0).unwrap();
        let probes = [
            DecayProbe::Poly { n: 2.0, mode: DecayMode::Zeta1, b: 0.0 },
            DecayProbe::Poly { n: 4.0, mode: DecayMode::Zeta2, b: 0.5 },
            DecayProbe::Exp { omega: w, n: 2.0, k: 1.0, mode: DecayMode::Zeta1, b: 0.0 },
        ];
        let s = sweep_sups(&phi, &g(), &grid, &probes).unwrap();
        for (p, sup) in probes.iter().zip(s) {
            assert!((v.decay_sup(p) - sup).abs() <= 1e-12 * sup, "{p:?}");
        }
    }

    #[test]
    fn zero_symbol_needs_no_k() {
        let w = SubadditiveWeight::gevrey(2.0).unwrap();
        let r = decay_ratio_exp(&PerturbationMap::zero(), &g(), &small_grid(), w, 2, DecayMode::Zeta1, 0.0, &DEFAULT_K_CANDIDATES)
            .unwrap();
        assert_eq!(r.k, 0.0);
        let r = decay_ratio_exp(&PerturbationMap::zero(), &g(), &small_grid(), w, 2, DecayMode::Zeta2, 0.5, &DEFAULT_K_CANDIDATES)
            .unwrap();
        assert_eq!(r.k, 0.0);
        let p = decay_ratio_poly(&PerturbationMap::zero(), &g(), &small_grid(), 6, DecayMode::Zeta2, 0.0).unwrap();
        assert!(p.stable && p.base.is_finite());
    }
}
