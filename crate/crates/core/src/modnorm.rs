//! Weighted modulation norms ‖m V_g f‖_{L^p} and decay profiles of STFTs.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::signal::{AnalyticSignal, GaussianEnvelope};
use crate::stft::{stft, TfGrid, TfMatrix};
use crate::sum::{pairwise, pairwise_by};
use crate::weights::{SubadditiveWeight, TfWeight};

/// Tail bounds above this fraction of the estimate raise a warning.
pub const TAIL_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    One,
    Two,
    Infinity,
}

impl Exponent {
    pub fn value(&self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Two => 2.0,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exponent::One => "1",
            Exponent::Two => "2",
            Exponent::Infinity => "inf",
        })
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Exponent::One),
            "2" => Ok(Exponent::Two),
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            _ => Err(invalid("p", "expected 1, 2 or inf")),
        }
    }
}

/// Riemann sum of (m|V|)^p, or the sup of m|V| for p = ∞.
pub fn weighted_norm(v: &TfMatrix, m: &TfWeight, p: Exponent) -> f64 {
    let nxi = v.xi.len();
    let term = |idx: usize| {
        let z = [v.x.node(idx / nxi), v.xi.node(idx % nxi)];
        m.eval(&z) * v.values[idx].norm()
    };
    finish(v.values.len(), &term, p, v.cell_area())
}

fn finish(count: usize, term: &impl Fn(usize) -> f64, p: Exponent, cell: f64) -> f64 {
    match p {
        Exponent::Infinity => (0..count).map(term).fold(0.0, f64::max),
        Exponent::One => pairwise_by(count, term) * cell,
        Exponent::Two => libm::sqrt(pairwise_by(count, &|i| {
            let t = term(i);
            t * t
        }) * cell),
    }
}

/// Bound on the part of the norm that lies outside the computed grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub value: f64,
    /// True when derived from a closed-form Gaussian envelope; false for the
    /// boundary-based estimate used otherwise.
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    pub tail: TailBound,
    pub warning: bool,
}

impl NormEstimate {
    fn new(norm: f64, tail: TailBound) -> Self {
        Self { norm, tail, warning: !matches!(tail.value.partial_cmp(&(TAIL_WARNING_FRACTION * norm)), Some(Ordering::Less | Ordering::Equal)) }
    }
}

/// ‖f‖_{M^p_m} with window g, computed on `grid`.
pub fn mod_norm(f: &AnalyticSignal, g: &AnalyticSignal, m: &TfWeight, p: Exponent, grid: &TfGrid) -> Result<NormEstimate> {
    let v = stft(|t| f.eval(t), g, grid)?;
    let norm = weighted_norm(&v, m, p);
    let tail = match f.gaussian_stft_envelope(g) {
        Some(env) => TailBound { value: envelope_tail(&env, m, p, &v), certified: true },
        None => TailBound { value: boundary_tail(&v, m, p), certified: false },
    };
    Ok(NormEstimate::new(norm, tail))
}

/// Norm of an STFT already in hand, with the boundary-based tail estimate.
pub fn mod_norm_of_matrix(v: &TfMatrix, m: &TfWeight, p: Exponent) -> NormEstimate {
    NormEstimate::new(weighted_norm(v, m, p), TailBound { value: boundary_tail(v, m, p), certified: false })
}

/// Integrates sup(m)·envelope over shells around the envelope centre that
/// cover the complement of the grid box.
pub fn envelope_tail(env: &GaussianEnvelope, m: &TfWeight, p: Exponent, v: &TfMatrix) -> f64 {
    let (cx, cxi) = env.center;
    let x_lo = v.x.node(0);
    let x_hi = v.x.node(v.x.len() - 1);
    let xi_lo = v.xi.node(0);
    let xi_hi = v.xi.node(v.xi.len() - 1);
    let rho = (cx - x_lo).min(x_hi - cx).min(cxi - xi_lo).min(xi_hi - cxi).max(0.0);
    let c_abs = libm::hypot(cx, cxi);
    let kappa = env.kappa_min();
    let step = 0.25;
    let mut acc: Vec<f64> = Vec::new();
    let mut sup = 0.0f64;
    for k in 0..100_000 {
        let r_in = rho + k as f64 * step;
        let r_out = r_in + step;
        let bound = m.sup_on_ball(c_abs + r_out) * env.peak * libm::exp(-PI * kappa * r_in * r_in);
        match p {
            Exponent::Infinity => sup = sup.max(bound),
            _ => {
                let area = PI * (r_out * r_out - r_in * r_in);
                acc.push(libm::pow(bound, p.value()) * area);
            }
        }
        if bound < 1e-300 || (k > 16 && bound == 0.0) {
            break;
        }
    }
    match p {
        Exponent::Infinity => sup,
        _ => libm::pow(pairwise(&acc), 1.0 / p.value()),
    }
}

/// Uncertified tail estimate from the outermost ring of grid cells.
fn boundary_tail(v: &TfMatrix, m: &TfWeight, p: Exponent) -> f64 {
    let (nx, nxi) = (v.x.len(), v.xi.len());
    let mut ring = Vec::new();
    for i in 0..nx {
        for k in 0..nxi {
            if i == 0 || k == 0 || i == nx - 1 || k == nxi - 1 {
                let z = [v.x.node(i), v.xi.node(k)];
                ring.push(m.eval(&z) * v.get(i, k).norm());
            }
        }
    }
    match p {
        Exponent::Infinity => ring.iter().copied().fold(0.0, f64::max),
        _ => {
            let pw: Vec<f64> = ring.iter().map(|t| libm::pow(*t, p.value())).collect();
            libm::pow(pairwise(&pw) * v.cell_area(), 1.0 / p.value())
        }
    }
}

/// Entries below this fraction of the peak are skipped in four-dimensional
/// tensor sums.
pub const TENSOR_PRUNE: f64 = 1e-24;

/// Norm of f₁ ⊗ f₂ on ℝ⁴ from the one-dimensional STFTs of the factors. The
/// phase-space point is z = (x₁, x₂, ξ₁, ξ₂).
pub fn weighted_norm_tensor(v1: &TfMatrix, v2: &TfMatrix, m: &TfWeight, p: Exponent) -> f64 {
    let keep = |v: &TfMatrix| -> Vec<(f64, f64, f64)> {
        let peak = v.max_abs();
        let nxi = v.xi.len();
        v.values
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() >= TENSOR_PRUNE * peak)
            .map(|(idx, c)| (v.x.node(idx / nxi), v.xi.node(idx % nxi), c.norm()))
            .collect()
    };
    let a = keep(v1);
    let b = keep(v2);
    let cell = v1.cell_area() * v2.cell_area();
    let term = |idx: usize| {
        let (x1, w1, ma) = a[idx / b.len()];
        let (x2, w2, mb) = b[idx % b.len()];
        m.eval(&[x1, x2, w1, w2]) * ma * mb
    };
    finish(a.len() * b.len(), &term, p, cell)
}

/// Scale against which decay is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayScale {
    /// ω(r).
    Weight(SubadditiveWeight),
    /// log(1+r).
    Polynomial,
}

impl DecayScale {
    fn eval(&self, r: f64) -> f64 {
        match self {
            DecayScale::Weight(w) => w.omega(r),
            DecayScale::Polynomial => libm::log1p(r),
        }
    }
}

/// For each radius r: -log(sup_{|z|≈r} |V(z)|) / scale(r). The annulus has
/// the width of the coarser grid spacing. Radii with no cells are skipped;
/// an underflowing sup gives +∞.
pub fn decay_profile(v: &TfMatrix, scale: DecayScale, radii: &[f64]) -> Vec<(f64, f64)> {
    let width = v.x.spacing().max(v.xi.spacing());
    let nxi = v.xi.len();
    radii
        .iter()
        .filter_map(|&r| {
            let mut sup: Option<f64> = None;
            for (idx, c) in v.values.iter().enumerate() {
                let rz = libm::hypot(v.x.node(idx / nxi), v.xi.node(idx % nxi));
                if (rz - r).abs() <= width {
                    sup = Some(sup.unwrap_or(0.0).max(c.norm()));
                }
            }
            sup.map(|s| (r, if s > 0.0 { -libm::log(s) / scale.eval(r) } else { f64::INFINITY }))
        })
        .collect()
}

/// Decay profile of V_g f computed on `grid`.
pub fn gs_decay_profile(
    f: &AnalyticSignal,
    scale: DecayScale,
    g: &AnalyticSignal,
    grid: &TfGrid,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    Ok(decay_profile(&stft(|t| f.eval(t), g, grid)?, scale, radii))
}

/// Multiplies every STFT value by c; the norm scales by |c|.
pub fn scaled_matrix(v: &TfMatrix, c: Complex64) -> TfMatrix {
    let mut out = v.clone();
    out.scale(c);
    out
}
