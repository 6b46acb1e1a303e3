//! One-variable subadditive weights, their Young conjugates, phase-space
//! weights built from them, and grid checks of the weight axioms.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;

/// Upper end of the search interval for the numerical Young conjugate.
pub const YOUNG_T_MAX: f64 = 200.0;
/// Final bracket width of the golden-section search.
pub const YOUNG_T_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// ω(t) = t^{1/s}, s > 1.
    Gevrey { s: f64 },
    /// ω(t) = (log(1+t))^q, q > 1.
    LogPower { q: f64 },
    /// ω(t) = t. Violates integrability; kept as a negative control.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditiveWeight {
    kind: WeightKind,
}

impl SubadditiveWeight {
    pub fn gevrey(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 1.0) {
            return Err(invalid("s", "Gevrey order must exceed 1"));
        }
        Ok(Self { kind: WeightKind::Gevrey { s } })
    }

    pub fn log_power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(invalid("q", "log-power exponent must exceed 1"));
        }
        Ok(Self { kind: WeightKind::LogPower { q } })
    }

    pub fn linear() -> Self {
        Self { kind: WeightKind::Linear }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// ω(|t|).
    pub fn omega(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.kind {
            WeightKind::Gevrey { s } => libm::pow(t, 1.0 / s),
            WeightKind::LogPower { q } => libm::pow(libm::log1p(t), q),
            WeightKind::Linear => t,
        }
    }

    /// ω(|x|) for a point of ℝ^d.
    pub fn omega_norm(&self, x: &[f64]) -> f64 {
        self.omega(euclid(x))
    }

    /// φ_ω(t) = ω(e^t), evaluated without forming e^t where possible.
    pub fn phi(&self, t: f64) -> f64 {
        match self.kind {
            WeightKind::Gevrey { s } => libm::exp(t / s),
            WeightKind::LogPower { q } => libm::pow(softplus(t), q),
            WeightKind::Linear => libm::exp(t),
        }
    }

    /// Closed-form conjugate where one is known.
    pub fn young_closed_form(&self, y: f64) -> Option<f64> {
        match self.kind {
            WeightKind::Gevrey { s } => {
                let sy = s * y;
                Some(if sy >= 1.0 { sy * (libm::log(sy) - 1.0) } else { -1.0 })
            }
            WeightKind::Linear => {
                // sup_t (yt - e^t): attained at t = ln y when y >= 1.
                Some(if y >= 1.0 { y * (libm::log(y) - 1.0) } else { -1.0 })
            }
            WeightKind::LogPower { .. } => None,
        }
    }

    /// φ*_ω(y) = sup_{t >= 0} (yt - φ_ω(t)).
    pub fn young_conjugate(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(invalid("y", "must be finite and nonnegative"));
        }
        match self.young_closed_form(y) {
            Some(v) => Ok(v),
            None => self.young_conjugate_numeric(y),
        }
    }

    /// Golden-section maximisation of yt - φ_ω(t) on [0, T_max]. The
    /// objective is concave because φ_ω is convex.
    pub fn young_conjugate_numeric(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(invalid("y", "must be finite and nonnegative"));
        }
        let h = |t: f64| y * t - self.phi(t);
        let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
        let (mut a, mut b) = (0.0, YOUNG_T_MAX);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut hc, mut hd) = (h(c), h(d));
        while b - a > YOUNG_T_TOL {
            if hc >= hd {
                b = d;
                d = c;
                hd = hc;
                c = b - ratio * (b - a);
                hc = h(c);
            } else {
                a = c;
                c = d;
                hc = hd;
                d = a + ratio * (b - a);
                hd = h(d);
            }
        }
        let t = 0.5 * (a + b);
        if YOUNG_T_MAX - t < 2.0 * YOUNG_T_TOL {
            return Err(Error::Divergence { y, t_max: YOUNG_T_MAX });
        }
        Ok(h(t).max(h(0.0)))
    }

    /// Upper bound for ∫_T^∞ ω(t)/(1+t²) dt, or `None` when the integral
    /// diverges.
    pub fn tail_integral_bound(&self, t: f64) -> Option<f64> {
        let t = t.max(1.0);
        match self.kind {
            WeightKind::Gevrey { s } => {
                let e = 1.0 / s;
                Some(libm::pow(t, e - 1.0) / (1.0 - e))
            }
            WeightKind::LogPower { q } => {
                // log(1+t) <= log(2t) on [1, ∞); substituting u = log(2t)
                // gives 2Γ(q+1, log 2T).
                let lo = libm::log(2.0 * t);
                let gl = GaussLegendre::new(32).ok()?;
                let v = gl.integrate(lo, lo + 400.0, 64, |u| {
                    libm::exp(q * libm::log(u) - u)
                });
                Some(2.0 * v)
            }
            WeightKind::Linear => None,
        }
    }
}

impl fmt::Display for SubadditiveWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WeightKind::Gevrey { s } => write!(f, "gevrey:{s}"),
            WeightKind::LogPower { q } => write!(f, "logpower:{q}"),
            WeightKind::Linear => write!(f, "linear"),
        }
    }
}

impl core::str::FromStr for SubadditiveWeight {
    type Err = Error;

    /// Parses `gevrey:<s>`, `logpower:<q>` or `linear`.
    fn from_str(text: &str) -> Result<Self> {
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (text.trim(), None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| invalid("weight", alloc::format!("expected a number after `{name}:`")))
        };
        match name {
            "gevrey" => Self::gevrey(number(arg)?),
            "logpower" => Self::log_power(number(arg)?),
            "linear" if arg.is_none() => Ok(Self::linear()),
            _ => Err(invalid("weight", alloc::format!("unknown weight `{text}`"))),
        }
    }
}

fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t + libm::log1p(libm::exp(-t))
    } else {
        libm::log1p(libm::exp(t))
    }
}

pub(crate) fn euclid(x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for v in x {
        acc += v * v;
    }
    libm::sqrt(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungReport {
    pub worst_slack: f64,
    pub worst_at: (u32, u32),
    pub violation: Option<(u32, u32)>,
}

impl YoungReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks 3m φ*(j/(3m)) + j <= m φ*(j/m) for 1 <= j <= j_max, 1 <= m <= m_max.
pub fn check_young_inequality(w: &SubadditiveWeight, j_max: u32, m_max: u32) -> Result<YoungReport> {
    if j_max == 0 || m_max == 0 {
        return Err(invalid("j_max/m_max", "must be at least 1"));
    }
    let mut report = YoungReport { worst_slack: f64::INFINITY, worst_at: (0, 0), violation: None };
    for m in 1..=m_max {
        let mf = m as f64;
        for j in 1..=j_max {
            let jf = j as f64;
            let lhs = 3.0 * mf * w.young_conjugate(jf / (3.0 * mf))? + jf;
            let rhs = mf * w.young_conjugate(jf / mf)?;
            let slack = rhs - lhs;
            if slack < report.worst_slack {
                report.worst_slack = slack;
                report.worst_at = (j, m);
            }
            if slack < -1e-10 * (1.0 + rhs.abs()) && report.violation.is_none() {
                report.violation = Some((j, m));
            }
        }
    }
    Ok(report)
}

/// Weight on phase space ℝ^{2d}; a point is z = (z̄₁, z̄₂) with z̄₁ the
/// first d coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum TfWeight {
    Unit,
    /// (1+|z|)^s.
    Poly { s: f64 },
    /// (1+|z̄₁|)^a (1+|z̄₂|)^b.
    PolyFactored { a: f64, b: f64 },
    /// e^{a ω(|z|)}.
    ExpIsotropic { a: f64, omega: SubadditiveWeight },
    /// e^{s(ω(z̄₁)+ω(z̄₂))}.
    ExpSplit { s: f64, omega: SubadditiveWeight },
    /// e^{s(ω(z̄₁)+ω(z̄₂))} e^{k ω(z̄₂)}.
    Loss { s: f64, k: f64, omega: SubadditiveWeight },
    Product(Box<TfWeight>, Box<TfWeight>),
    Quotient(Box<TfWeight>, Box<TfWeight>),
}

impl TfWeight {
    /// v_{s+Nb}(z) (1+|z̄₂|)^N.
    pub fn polynomial_loss(s: f64, n: f64, b: f64) -> Self {
        TfWeight::Product(
            Box::new(TfWeight::Poly { s: s + n * b }),
            Box::new(TfWeight::PolyFactored { a: 0.0, b: n }),
        )
    }

    pub fn product(a: TfWeight, b: TfWeight) -> Self {
        TfWeight::Product(Box::new(a), Box::new(b))
    }

    pub fn quotient(a: TfWeight, b: TfWeight) -> Self {
        TfWeight::Quotient(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let d = z.len() / 2;
        match self {
            TfWeight::Unit => 1.0,
            TfWeight::Poly { s } => libm::pow(1.0 + euclid(z), *s),
            TfWeight::PolyFactored { a, b } => {
                libm::pow(1.0 + euclid(&z[..d]), *a) * libm::pow(1.0 + euclid(&z[d..]), *b)
            }
            TfWeight::ExpIsotropic { a, omega } => libm::exp(a * omega.omega_norm(z)),
            TfWeight::ExpSplit { s, omega } => {
                libm::exp(s * (omega.omega_norm(&z[..d]) + omega.omega_norm(&z[d..])))
            }
            TfWeight::Loss { s, k, omega } => {
                let w2 = omega.omega_norm(&z[d..]);
                libm::exp(s * (omega.omega_norm(&z[..d]) + w2) + k * w2)
            }
            TfWeight::Product(a, b) => a.eval(z) * b.eval(z),
            TfWeight::Quotient(a, b) => a.eval(z) / b.eval(z),
        }
    }

    /// Upper bound for the weight on the ball |z| <= r.
    pub fn sup_on_ball(&self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            TfWeight::Unit => 1.0,
            TfWeight::Poly { s } => libm::pow(1.0 + r, s.max(0.0)),
            TfWeight::PolyFactored { a, b } => libm::pow(1.0 + r, a.max(0.0) + b.max(0.0)),
            TfWeight::ExpIsotropic { a, omega } => libm::exp(a.max(0.0) * omega.omega(r)),
            TfWeight::ExpSplit { s, omega } => libm::exp(2.0 * s.max(0.0) * omega.omega(r)),
            TfWeight::Loss { s, k, omega } => {
                libm::exp((s.max(0.0) + (s + k).max(0.0)) * omega.omega(r))
            }
            TfWeight::Product(a, b) => a.sup_on_ball(r) * b.sup_on_ball(r),
            TfWeight::Quotient(a, b) => a.sup_on_ball(r) / b.inf_on_ball(r),
        }
    }

    /// Lower bound for the weight on the ball |z| <= r.
    pub fn inf_on_ball(&self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            TfWeight::Unit => 1.0,
            TfWeight::Poly { s } => libm::pow(1.0 + r, s.min(0.0)),
            TfWeight::PolyFactored { a, b } => libm::pow(1.0 + r, a.min(0.0) + b.min(0.0)),
            TfWeight::ExpIsotropic { a, omega } => libm::exp(a.min(0.0) * omega.omega(r)),
            TfWeight::ExpSplit { s, omega } => libm::exp(2.0 * s.min(0.0) * omega.omega(r)),
            TfWeight::Loss { s, k, omega } => {
                libm::exp((s.min(0.0) + (s + k).min(0.0)) * omega.omega(r))
            }
            TfWeight::Product(a, b) => a.inf_on_ball(r) * b.inf_on_ball(r),
            TfWeight::Quotient(a, b) => a.inf_on_ball(r) / b.sup_on_ball(r),
        }
    }
}

impl fmt::Display for TfWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TfWeight::Unit => write!(f, "unit"),
            TfWeight::Poly { s } => write!(f, "poly({s})"),
            TfWeight::PolyFactored { a, b } => write!(f, "polyfactored({a};{b})"),
            TfWeight::ExpIsotropic { a, omega } => write!(f, "exp({a};{omega})"),
            TfWeight::ExpSplit { s, omega } => write!(f, "expsplit({s};{omega})"),
            TfWeight::Loss { s, k, omega } => write!(f, "loss({s};{k};{omega})"),
            TfWeight::Product(a, b) => write!(f, "{a}*{b}"),
            TfWeight::Quotient(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

/// Symmetric sample grid on [-H, H]^{2d} with an odd number of points per
/// coordinate, so the origin is always a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub d: usize,
    pub half_width: f64,
    pub points: usize,
}

impl PhaseGrid {
    pub fn new(d: usize, half_width: f64, points: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "must be positive"));
        }
        if points < 3 || points % 2 == 0 {
            return Err(invalid("points", "must be odd and at least 3"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", "must be positive and finite"));
        }
        Ok(Self { d, half_width, points })
    }

    /// Twice the extent at the same spacing.
    pub fn enlarged(&self) -> Self {
        Self { d: self.d, half_width: 2.0 * self.half_width, points: 2 * self.points - 1 }
    }

    fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModerateReport {
    pub constant: f64,
    pub enlarged_constant: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Relative change allowed between a grid and its enlargement.
pub const STABILITY_THRESHOLD: f64 = 0.05;

/// sup m(x₁+x₂) / (m(x₁) v(x₂)) over grid pairs, on the grid and on its
/// enlargement.
pub fn check_moderate(m: &TfWeight, v: &TfWeight, grid: &PhaseGrid) -> ModerateReport {
    let constant = moderate_sup(m, v, grid);
    let enlarged_constant = moderate_sup(m, v, &grid.enlarged());
    let relative_change = (enlarged_constant - constant) / constant;
    ModerateReport {
        constant,
        enlarged_constant,
        relative_change,
        stable: constant.is_finite() && relative_change.abs() < STABILITY_THRESHOLD,
    }
}

fn moderate_sup(m: &TfWeight, v: &TfWeight, grid: &PhaseGrid) -> f64 {
    let dim = 2 * grid.d;
    let p = grid.points;
    let h = grid.spacing();
    let total = p.pow(dim as u32);
    // Sums of two nodes land on the grid with 2p-1 points per axis.
    let q = 2 * p - 1;
    let sum_total = q.pow(dim as u32);
    let mut z = alloc::vec![0.0; dim];
    let decode = |mut idx: usize, base: usize, offset: f64, z: &mut [f64]| {
        for c in (0..dim).rev() {
            z[c] = offset + (idx % base) as f64 * h;
            idx /= base;
        }
    };
    let mut mv = Vec::with_capacity(total);
    let mut vv = Vec::with_capacity(total);
    for i in 0..total {
        decode(i, p, -grid.half_width, &mut z);
        mv.push(m.eval(&z));
        vv.push(v.eval(&z));
    }
    let mut msum = Vec::with_capacity(sum_total);
    for i in 0..sum_total {
        decode(i, q, -2.0 * grid.half_width, &mut z);
        msum.push(m.eval(&z));
    }
    let mut sup = 0.0f64;
    let mut a = alloc::vec![0usize; dim];
    let mut b = alloc::vec![0usize; dim];
    for (i, mi) in mv.iter().enumerate() {
        split_index(i, p, &mut a);
        for (j, vj) in vv.iter().enumerate() {
            split_index(j, p, &mut b);
            let mut k = 0;
            for c in 0..dim {
                k = k * q + a[c] + b[c];
            }
            let r = msum[k] / (mi * vj);
            if r > sup {
                sup = r;
            }
        }
    }
    sup
}

fn split_index(mut idx: usize, base: usize, out: &mut [usize]) {
    for c in (0..out.len()).rev() {
        out[c] = idx % base;
        idx /= base;
    }
}

/// Outcome of one weight condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionOutcome {
    pub passed: bool,
    /// Most adverse value seen: worst margin for (α) and (δ), the integral
    /// estimate for (β), the final-to-peak ratio for (γ).
    pub value: f64,
    /// Where the most adverse value occurred.
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub alpha: ConditionOutcome,
    pub beta: ConditionOutcome,
    /// Finite-range evidence only.
    pub gamma: ConditionOutcome,
    pub delta: ConditionOutcome,
}

impl ConditionReport {
    pub fn failed(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, c) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("delta", &self.delta)] {
            if !c.passed {
                out.push(name);
            }
        }
        out
    }
}

/// Sampling for the pointwise conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionGrid {
    /// (α) uses pairs from a geometric grid on [t_min, t_max] plus 0.
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// (δ) uses second differences of φ_ω on [0, phi_range] with this step.
    pub phi_range: f64,
    pub phi_step: f64,
}

impl Default for ConditionGrid {
    fn default() -> Self {
        Self { t_min: 1e-3, t_max: 1e6, points: 200, phi_range: 40.0, phi_step: 0.01 }
    }
}

pub fn check_weight_conditions(w: &SubadditiveWeight, grid: &ConditionGrid, tail: f64) -> Result<ConditionReport> {
    if !(tail > 1.0 && tail.is_finite()) {
        return Err(invalid("tail", "must be finite and greater than 1"));
    }
    if grid.points < 2 || !(grid.t_min > 0.0 && grid.t_max > grid.t_min) {
        return Err(invalid("grid", "needs 0 < t_min < t_max and at least two points"));
    }
    let ts: Vec<f64> = core::iter::once(0.0)
        .chain(geometric(grid.t_min, grid.t_max, grid.points))
        .collect();

    let mut alpha = ConditionOutcome { passed: true, value: f64::INFINITY, at: 0.0 };
    for &s in &ts {
        for &t in &ts {
            let margin = w.omega(s) + w.omega(t) - w.omega(s + t);
            if margin < alpha.value {
                alpha.value = margin;
                alpha.at = s.max(t);
            }
        }
    }
    alpha.passed = alpha.value >= -1e-10;

    let gl = GaussLegendre::new(20)?;
    let mut integral = gl.integrate(0.0, 1.0, 8, |t| w.omega(t) / (1.0 + t * t));
    // Geometric panels on [1, tail].
    let decades = libm::ceil(libm::log10(tail)).max(1.0) as usize;
    let ratio = libm::pow(tail, 1.0 / decades as f64);
    let mut lo = 1.0;
    for _ in 0..decades {
        let hi = lo * ratio;
        integral += gl.integrate(lo, hi, 16, |t| w.omega(t) / (1.0 + t * t));
        lo = hi;
    }
    let beta = match w.tail_integral_bound(tail) {
        Some(b) if integral.is_finite() => {
            ConditionOutcome { passed: true, value: integral + b, at: tail }
        }
        _ => ConditionOutcome { passed: false, value: integral, at: tail },
    };

    let ratios: Vec<(f64, f64)> = geometric(1.0, tail, grid.points)
        .map(|t| (t, libm::log1p(t * t) / w.omega(t)))
        .collect();
    let (peak_idx, peak) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &(_, r))| if r > acc.1 { (i, r) } else { acc });
    let monotone_after = ratios[peak_idx..].windows(2).all(|p| p[1].1 <= p[0].1 * (1.0 + 1e-12));
    let last = ratios[ratios.len() - 1];
    let gamma = ConditionOutcome {
        passed: monotone_after && last.1 <= 0.5 * peak,
        value: last.1 / peak,
        at: last.0,
    };

    let steps = (grid.phi_range / grid.phi_step) as usize;
    let mut delta = ConditionOutcome { passed: true, value: f64::INFINITY, at: 0.0 };
    let h = grid.phi_step;
    for i in 1..steps {
        let t = i as f64 * h;
        let mid = w.phi(t);
        let second = w.phi(t + h) - 2.0 * mid + w.phi(t - h);
        let scaled = second / (1.0 + mid.abs());
        if scaled < delta.value {
            delta.value = scaled;
            delta.at = t;
        }
    }
    delta.passed = delta.value >= -1e-10;

    Ok(ConditionReport { alpha, beta, gamma, delta })
}

fn geometric(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = libm::log(hi / lo) / (points - 1) as f64;
    (0..points).map(move |i| lo * libm::exp(step * i as f64))
}

/// Log-spaced sample set u = log t, u in [u_min, u_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self { u_min: 0.0, u_max: 2000.0, points: 4001 }
    }
}

impl LogGrid {
    fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.u_max - self.u_min) / (self.points - 1).max(1) as f64;
        (0..self.points).map(move |i| self.u_min + step * i as f64)
    }
}

/// Smallest candidate H > 1 with 2ω(t) <= ω(Ht) + H on the grid. Nodes where
/// ω overflows are skipped.
pub fn check_bmm(w: &SubadditiveWeight, candidates: &[f64], grid: &LogGrid) -> Option<f64> {
    let mut sorted: Vec<f64> = candidates.iter().copied().filter(|h| *h > 1.0).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.into_iter().find(|&h| {
        let lh = libm::log(h);
        grid.nodes().all(|u| {
            let lhs = 2.0 * w.phi(u);
            let rhs = w.phi(u + lh) + h;
            !(lhs.is_finite() && rhs.is_finite()) || lhs <= rhs * (1.0 + 1e-12)
        })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallPowerReport {
    /// (log x, ω(x^a)/ω(x)).
    pub table: Vec<(f64, f64)>,
    pub passed: bool,
}

/// Tabulates ω(x^a)/ω(x). Passes when the ratio is nonincreasing over the
/// upper half of the log-range and halves across it.
pub fn check_small_power(w: &SubadditiveWeight, a: f64, grid: &LogGrid) -> Result<SmallPowerReport> {
    if !(0.0..1.0).contains(&a) {
        return Err(invalid("a", "must lie in [0, 1)"));
    }
    if grid.points < 4 || grid.u_max.partial_cmp(&grid.u_min) != Some(core::cmp::Ordering::Greater) || grid.u_max <= 0.0 {
        return Err(invalid("grid", "needs u_max > max(u_min, 0) and at least four points"));
    }
    let table: Vec<(f64, f64)> = grid
        .nodes()
        .map(|u| (u, w.phi(a * u) / w.phi(u)))
        .filter(|(_, r)| r.is_finite())
        .collect();
    if table.len() < 4 {
        return Ok(SmallPowerReport { table, passed: false });
    }
    let u_end = table[table.len() - 1].0;
    let half = u_end / 2.0;
    let start = table.iter().position(|(u, _)| *u >= half).unwrap_or(0);
    let tail = &table[start..];
    let monotone = tail.windows(2).all(|p| p[1].1 <= p[0].1 * (1.0 + 1e-12));
    let passed = monotone && tail[tail.len() - 1].1 <= 0.5 * tail[0].1;
    Ok(SmallPowerReport { table, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gev(s: f64) -> SubadditiveWeight {
        SubadditiveWeight::gevrey(s).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(SubadditiveWeight::gevrey(1.0).is_err());
        assert!(SubadditiveWeight::log_power(0.5).is_err());
        assert!(gev(2.0).young_conjugate(-1.0).is_err());
    }

    #[test]
    fn young_conjugate_examples() {
        let w = gev(2.0);
        assert_eq!(w.young_conjugate(0.0).unwrap(), -1.0);
        assert!((w.young_conjugate(1.0).unwrap() - (-0.613_705_638_880_109_4)).abs() < 1e-12);
        assert!((w.young_conjugate(2.0).unwrap() - 1.545_177_444_479_562_4).abs() < 1e-12);
    }

    #[test]
    fn numeric_conjugate_tracks_closed_form() {
        let w = gev(2.0);
        for y in [0.0, 0.3, 0.5, 1.0, 2.0, 17.0, 100.0] {
            let exact = w.young_closed_form(y).unwrap();
            let num = w.young_conjugate_numeric(y).unwrap();
            assert!((num - exact).abs() <= 1e-8 * exact.abs().max(1.0), "{y}: {num} vs {exact}");
        }
    }

    #[test]
    fn numeric_conjugate_reports_divergence() {
        // φ(t) = e^t with y so large that the maximiser ln y exceeds T_max.
        let w = SubadditiveWeight::linear();
        assert_eq!(
            w.young_conjugate_numeric(libm::exp(250.0)).unwrap_err(),
            Error::Divergence { y: libm::exp(250.0), t_max: YOUNG_T_MAX }
        );
    }

    #[test]
    fn log_power_conjugate_is_convex() {
        let w = SubadditiveWeight::log_power(2.0).unwrap();
        let vals: Vec<f64> = (0..60).map(|i| w.young_conjugate(0.5 * i as f64).unwrap()).collect();
        for t in vals.windows(3) {
            assert!(t[0] - 2.0 * t[1] + t[2] >= -1e-8);
        }
    }

    #[test]
    fn young_inequality_example_point() {
        let w = gev(2.0);
        let lhs = 3.0 * w.young_conjugate(1.0).unwrap() + 3.0;
        assert!((lhs - 1.158_883_083_359_671_8).abs() < 1e-12);
        assert!((w.young_conjugate(3.0).unwrap() - 4.750_556_815_368_328).abs() < 1e-12);
    }

    #[test]
    fn young_inequality_holds_for_gevrey() {
        for s in [1.5, 2.0, 3.0] {
            let r = check_young_inequality(&gev(s), 50, 50).unwrap();
            assert!(r.passed(), "s = {s}: {r:?}");
            assert!(r.worst_slack >= 0.0);
        }
    }

    #[test]
    fn moderate_examples() {
        let pg = PhaseGrid::new(1, 4.0, 9).unwrap();
        let v1 = TfWeight::Poly { s: 1.0 };
        let r = check_moderate(&v1, &v1, &pg);
        assert!((r.constant - 1.0).abs() < 1e-12 && r.stable);

        let om = gev(2.0);
        let m = TfWeight::ExpIsotropic { a: -1.0, omega: om };
        let v = TfWeight::ExpIsotropic { a: 1.0, omega: om };
        let r = check_moderate(&m, &v, &pg);
        assert!((r.constant - 1.0).abs() < 1e-12 && r.stable);

        let m = TfWeight::Poly { s: -2.0 };
        let v = TfWeight::Poly { s: 2.0 };
        let r = check_moderate(&m, &v, &PhaseGrid::new(1, 10.0, 11).unwrap());
        assert!(r.constant <= 1.0 + 1e-10);
    }

    #[test]
    fn loss_weight_is_split_moderate() {
        let om = gev(2.0);
        let m = TfWeight::Loss { s: 1.0, k: 2.0, omega: om };
        let v = TfWeight::ExpSplit { s: 3.0, omega: om };
        let r = check_moderate(&m, &v, &PhaseGrid::new(1, 6.0, 13).unwrap());
        assert!(r.constant <= 1.0 + 1e-12, "{r:?}");
        assert!(r.stable, "{r:?}");
    }

    #[test]
    fn ball_bounds_bracket_samples() {
        let om = gev(2.0);
        let w = TfWeight::quotient(
            TfWeight::Loss { s: 1.0, k: 2.0, omega: om },
            TfWeight::PolyFactored { a: 1.0, b: -2.0 },
        );
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let z = [4.0 * libm::cos(t), 4.0 * libm::sin(t)];
            let v = w.eval(&z);
            assert!(v <= w.sup_on_ball(4.0) * (1.0 + 1e-12));
            assert!(v >= w.inf_on_ball(4.0) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn gevrey_conditions_pass() {
        let r = check_weight_conditions(&gev(2.0), &ConditionGrid::default(), 1e12).unwrap();
        assert!(r.failed().is_empty(), "{r:?}");
        // ∫_0^∞ √t/(1+t²) dt = π/√2.
        assert!((r.beta.value - core::f64::consts::PI / libm::sqrt(2.0)).abs() < 2e-6 * 2.0, "{}", r.beta.value);
    }

    #[test]
    fn linear_weight_fails_integrability() {
        let r = check_weight_conditions(&SubadditiveWeight::linear(), &ConditionGrid::default(), 1e12).unwrap();
        assert!(r.failed().contains(&"beta"));
    }

    #[test]
    fn log_power_two_violates_subadditivity_near_one() {
        let w = SubadditiveWeight::log_power(2.0).unwrap();
        assert!(w.omega(2.0) > 2.0 * w.omega(1.0));
        let r = check_weight_conditions(&w, &ConditionGrid::default(), 1e12).unwrap();
        assert_eq!(r.failed(), alloc::vec!["alpha"]);
    }

    #[test]
    fn bmm_examples() {
        let cands = [1.5, 2.0, 4.0, 8.0, 16.0, 1e6];
        assert_eq!(check_bmm(&gev(2.0), &cands, &LogGrid::default()), Some(4.0));
        assert_eq!(check_bmm(&gev(3.0), &cands, &LogGrid::default()), Some(8.0));
        let lp = SubadditiveWeight::log_power(2.0).unwrap();
        assert_eq!(check_bmm(&lp, &cands, &LogGrid::default()), None);
    }

    #[test]
    fn small_power_examples() {
        let g = LogGrid::default();
        assert!(check_small_power(&gev(2.0), 0.5, &g).unwrap().passed);
        assert!(check_small_power(&gev(2.0), 0.0, &g).unwrap().passed);
        let lp = SubadditiveWeight::log_power(2.0).unwrap();
        assert!(check_small_power(&lp, 0.0, &g).unwrap().passed);
        let r = check_small_power(&lp, 0.5, &g).unwrap();
        assert!(!r.passed);
        assert!((r.table.last().unwrap().1 - 0.25).abs() < 1e-3);
        assert!(check_small_power(&lp, 1.0, &g).is_err());
    }

    #[test]
    fn weight_names_round_trip() {
        for w in [SubadditiveWeight::gevrey(2.5).unwrap(), SubadditiveWeight::log_power(3.0).unwrap(), SubadditiveWeight::linear()] {
            assert_eq!(alloc::format!("{w}").parse::<SubadditiveWeight>().unwrap(), w);
        }
        assert!("gevrey".parse::<SubadditiveWeight>().is_err());
        assert!("gevrey:0.5".parse::<SubadditiveWeight>().is_err());
        assert!("cosh:1".parse::<SubadditiveWeight>().is_err());
    }
}
