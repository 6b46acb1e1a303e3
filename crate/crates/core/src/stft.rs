//! Short-time Fourier transform V_g f(x,ξ) = ∫ f(t) conj(g(t-x)) e^{-2πitξ} dt,
//! the Rihaczek distribution, and numerical checks of two STFT identities.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::UniformGrid;
use crate::par;
use crate::signal::{cis, cis_turns, AnalyticSignal, SampledSignal};
use crate::sum::{pairwise_complex, pairwise_complex_by};

/// Largest window value tolerated at the edge of an integration patch,
/// relative to the window's peak on the patch.
pub const WINDOW_EDGE_TOL: f64 = 1e-14;

/// Centres x and the integration patch t = x + u, u on `patch`. The
/// frequency grid is `patch.dual()`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfGrid {
    pub x: UniformGrid,
    pub patch: UniformGrid,
}

impl TfGrid {
    pub fn new(x: UniformGrid, patch: UniformGrid) -> Result<Self> {
        patch.require_fft()?;
        Ok(Self { x, patch })
    }

    pub fn xi(&self) -> UniformGrid {
        self.patch.dual()
    }
}

/// STFT samples, row-major in (x, ξ).
#[derive(Debug, Clone, PartialEq)]
pub struct TfMatrix {
    pub x: UniformGrid,
    pub xi: UniformGrid,
    pub values: Vec<Complex64>,
    pub window: AnalyticSignal,
}

impl TfMatrix {
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.xi.len() + k]
    }

    pub fn cell_area(&self) -> f64 {
        self.x.spacing() * self.xi.spacing()
    }

    pub fn l2_norm(&self) -> f64 {
        let mass: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        libm::sqrt(crate::sum::pairwise(&mass) * self.cell_area())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Scales every entry; the STFT is linear in f.
    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }
}

/// Rejects windows that are not negligible at the patch edge.
pub fn check_window(g: &AnalyticSignal, patch: &UniformGrid) -> Result<()> {
    let peak = patch.nodes().map(|u| g.eval(u).norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(crate::error::invalid("window", "vanishes on the patch"));
    }
    let w = patch.half_width();
    let edge = g.eval(-w).norm().max(g.eval(w).norm()) / peak;
    if edge > WINDOW_EDGE_TOL {
        return Err(Error::WindowTruncation { edge, threshold: WINDOW_EDGE_TOL });
    }
    Ok(())
}

/// STFT of a function given pointwise, one FFT over the patch per centre.
pub fn stft<F>(f: F, g: &AnalyticSignal, grid: &TfGrid) -> Result<TfMatrix>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    check_window(g, &grid.patch)?;
    let n = grid.patch.len();
    let h = grid.patch.spacing();
    let xi = grid.xi();
    let fft = Fft::new(n)?;
    // conj(g(u_j)) (-1)^j, shared by every row.
    let taper: Vec<Complex64> = grid
        .patch
        .nodes()
        .enumerate()
        .map(|(j, u)| g.eval(u).conj() * if j % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.x.len() * n];
    par::for_each_row(&mut values, n, |i, row| {
        let x = grid.x.node(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = f(x + grid.patch.node(j)) * taper[j];
        }
        fft.forward(row);
        for (k, v) in row.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { h } else { -h };
            *v *= cis_turns(-x * xi.node(k)) * sign;
        }
    });
    Ok(TfMatrix { x: grid.x, xi, values, window: *g })
}

/// STFT of sampled data: the window slides over the whole signal grid and
/// the frequency grid is the signal grid's dual.
pub fn stft_sampled(f: &SampledSignal, g: &AnalyticSignal, x: UniformGrid) -> Result<TfMatrix> {
    if f.d != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.d });
    }
    f.axis.require_fft()?;
    let n = f.axis.len();
    let h = f.axis.spacing();
    let fft = Fft::new(n)?;
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); x.len() * n];
    par::for_each_row(&mut values, n, |i, row| {
        let xc = x.node(i);
        for (j, v) in row.iter_mut().enumerate() {
            let t = f.axis.node(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *v = f.values[j] * g.eval(t - xc).conj() * sign;
        }
        fft.forward(row);
        for (k, v) in row.iter_mut().enumerate() {
            *v *= if k % 2 == 0 { h } else { -h };
        }
    });
    Ok(TfMatrix { x, xi: f.axis.dual(), values, window: *g })
}

/// Single STFT value by a direct Riemann sum over x + patch.
pub fn stft_point(f: impl Fn(f64) -> Complex64, g: &AnalyticSignal, x: f64, xi: f64, patch: &UniformGrid) -> Complex64 {
    let h = patch.spacing();
    pairwise_complex_by(patch.len(), &|j| {
        let u = patch.node(j);
        let t = x + u;
        f(t) * g.eval(u).conj() * cis_turns(-t * xi)
    }) * h
}

fn inner(f: &AnalyticSignal, g: &AnalyticSignal, grid: &UniformGrid) -> Complex64 {
    pairwise_complex_by(grid.len(), &|j| {
        let t = grid.node(j);
        f.eval(t) * g.eval(t).conj()
    }) * grid.spacing()
}

/// |⟨V_{g1}f1, V_{g2}f2⟩ - ⟨f1,f2⟩ conj⟨g1,g2⟩| with all inner products as
/// Riemann sums on `grid` (and its dual for frequencies).
pub fn orthogonality_check(
    f1: &AnalyticSignal,
    f2: &AnalyticSignal,
    g1: &AnalyticSignal,
    g2: &AnalyticSignal,
    grid: UniformGrid,
) -> Result<f64> {
    let s1 = crate::signal::sample(|t| f1.eval(t), grid);
    let s2 = crate::signal::sample(|t| f2.eval(t), grid);
    let v1 = stft_sampled(&s1, g1, grid)?;
    let v2 = stft_sampled(&s2, g2, grid)?;
    let terms: Vec<Complex64> = v1.values.iter().zip(&v2.values).map(|(a, b)| a * b.conj()).collect();
    let lhs = pairwise_complex(&terms) * v1.cell_area();
    let rhs = inner(f1, f2, &grid) * inner(g1, g2, &grid).conj();
    Ok((lhs - rhs).norm())
}

/// Fourier transform in closed form, or by a direct Riemann sum over
/// [-32, 32) when no closed form exists.
fn fourier_value(f: &AnalyticSignal, xi: f64) -> Complex64 {
    match f.fourier(xi) {
        Ok(v) => v,
        Err(_) => {
            let grid = UniformGrid::new(32.0, 1 << 14).expect("static grid");
            pairwise_complex_by(grid.len(), &|j| {
                let t = grid.node(j);
                f.eval(t) * cis_turns(-t * xi)
            }) * grid.spacing()
        }
    }
}

/// R(g,f)(x,ξ) = e^{-2πixξ} g(x) conj(f̂(ξ)).
pub fn rihaczek_value(g: &AnalyticSignal, f: &AnalyticSignal, x: f64, xi: f64) -> Complex64 {
    cis_turns(-x * xi) * g.eval(x) * fourier_value(f, xi).conj()
}

/// R(g,f) on x × ξ, row-major.
pub fn rihaczek(g: &AnalyticSignal, f: &AnalyticSignal, x: &UniformGrid, xi: &UniformGrid) -> Vec<Complex64> {
    let gx: Vec<Complex64> = x.nodes().map(|t| g.eval(t)).collect();
    let fx: Vec<Complex64> = xi.nodes().map(|w| fourier_value(f, w).conj()).collect();
    let mut out = Vec::with_capacity(gx.len() * fx.len());
    for (i, a) in gx.iter().enumerate() {
        for (k, b) in fx.iter().enumerate() {
            out.push(cis_turns(-x.node(i) * xi.node(k)) * a * b);
        }
    }
    out
}

/// Quadrature box for the left side of the Rihaczek identity: a uniform
/// `n × n` Riemann sum on [-half_width, half_width)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityQuadrature {
    pub half_width: f64,
    pub n: usize,
    /// Patch for the one-dimensional STFTs on the right side.
    pub patch: UniformGrid,
}

impl Default for IdentityQuadrature {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            n: 256,
            patch: UniformGrid::new(8.0, 512).expect("static grid"),
        }
    }
}

/// Both sides of
/// V_{Φ₀}R(g,f)(z,ζ) = e^{-2πi z₂ζ₂} V_{φ1}g(z₁, z₂+ζ₁) conj(V_{φ2}f(z₁+ζ₂, z₂)),
/// Φ₀ = R(φ1, φ2), at one probe point (z₁, z₂, ζ₁, ζ₂).
pub fn rihaczek_identity_sides(
    f: &AnalyticSignal,
    g: &AnalyticSignal,
    phi1: &AnalyticSignal,
    phi2: &AnalyticSignal,
    probe: [f64; 4],
    quad: &IdentityQuadrature,
) -> (Complex64, Complex64) {
    let [z1, z2, w1, w2] = probe;
    let axis = UniformGrid::new(quad.half_width, quad.n).expect("quadrature grid");
    let h = axis.spacing();
    let nodes: Vec<f64> = axis.nodes().collect();
    let gx: Vec<Complex64> = nodes.iter().map(|&x| g.eval(x)).collect();
    let fxi: Vec<Complex64> = nodes.iter().map(|&w| fourier_value(f, w).conj()).collect();
    let p1: Vec<Complex64> = nodes.iter().map(|&x| phi1.eval(x - z1)).collect();
    let p2: Vec<Complex64> = nodes.iter().map(|&w| fourier_value(phi2, w - z2).conj()).collect();
    let rows: Vec<Complex64> = (0..nodes.len())
        .map(|i| {
            let x = nodes[i];
            pairwise_complex_by(nodes.len(), &|k| {
                let w = nodes[k];
                let r = cis_turns(-x * w) * gx[i] * fxi[k];
                let window = cis_turns(-(x - z1) * (w - z2)) * p1[i] * p2[k];
                r * window.conj() * cis_turns(-(x * w1 + w * w2))
            })
        })
        .collect();
    let lhs = pairwise_complex(&rows) * (h * h);
    let a = stft_point(|t| g.eval(t), phi1, z1, z2 + w1, &quad.patch);
    let b = stft_point(|t| f.eval(t), phi2, z1 + w2, z2, &quad.patch);
    let rhs = cis(-2.0 * PI * z2 * w2) * a * b.conj();
    (lhs, rhs)
}

/// Largest |lhs - rhs| of the Rihaczek identity over the probe set.
pub fn rihaczek_stft_identity_check(
    f: &AnalyticSignal,
    g: &AnalyticSignal,
    phi1: &AnalyticSignal,
    phi2: &AnalyticSignal,
    probes: &[[f64; 4]],
    quad: &IdentityQuadrature,
) -> f64 {
    par::map_indices(probes.len(), |i| {
        let (l, r) = rihaczek_identity_sides(f, g, phi1, phi2, probes[i], quad);
        (l - r).norm()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> AnalyticSignal {
        AnalyticSignal::normalized_gaussian(1.0)
    }

    fn tf() -> TfGrid {
        TfGrid::new(UniformGrid::new(4.0, 64).unwrap(), UniformGrid::new(6.0, 256).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_examples() {
        let v = stft(|t| g().eval(t), &g(), &tf()).unwrap();
        let i0 = v.x.index_of(0.0).unwrap();
        let i1 = v.x.index_of(1.0).unwrap();
        let k0 = v.xi.index_of(0.0).unwrap();
        assert!((v.get(i0, k0) - 1.0).norm() < 1e-12);
        assert!((v.get(i1, k0).norm() - libm::exp(-PI / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_magnitude_matches_closed_form() {
        let v = stft(|t| g().eval(t), &g(), &tf()).unwrap();
        let mut err = 0.0f64;
        for i in 0..v.x.len() {
            for k in 0..v.xi.len() {
                let (x, w) = (v.x.node(i), v.xi.node(k));
                if x.abs() <= 4.0 && w.abs() <= 4.0 {
                    err = err.max((v.get(i, k).norm() - libm::exp(-PI * (x * x + w * w) / 2.0)).abs());
                }
            }
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn covariance_under_time_frequency_shift() {
        let grid = tf();
        let v = stft(|t| g().eval(t), &g(), &grid).unwrap();
        let shifted = g().tf_shift(2.0, 3.0);
        let w = stft(|t| shifted.eval(t), &g(), &grid).unwrap();
        // x spacing 1/8, ξ spacing 1/12: shifts of 2 and 3 are 16 and 36 cells.
        let (di, dk) = (16, 36);
        let mut err = 0.0f64;
        for i in di..grid.x.len() {
            for k in dk..w.xi.len() {
                err = err.max((w.get(i, k).norm() - v.get(i - di, k - dk).norm()).abs());
            }
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn truncated_window_is_rejected() {
        let wide = AnalyticSignal::normalized_gaussian(0.05);
        let err = stft(|t| g().eval(t), &wide, &tf()).unwrap_err();
        assert!(matches!(err, Error::WindowTruncation { .. }));
    }

    #[test]
    fn sampled_and_pointwise_agree() {
        let grid = UniformGrid::new(8.0, 512).unwrap();
        let f = AnalyticSignal::hermite(2).tf_shift(0.5, -1.0);
        let s = crate::signal::sample(|t| f.eval(t), grid);
        let a = stft_sampled(&s, &g(), grid).unwrap();
        let b = stft(|t| f.eval(t), &g(), &TfGrid::new(grid, UniformGrid::new(8.0, 512).unwrap()).unwrap()).unwrap();
        let mut err = 0.0f64;
        for i in (0..512).step_by(11) {
            for k in 0..512 {
                err = err.max((a.get(i, k) - b.get(i, k)).norm());
            }
        }
        assert!(err < 1e-10, "{err}");
        let p = stft_point(|t| f.eval(t), &g(), a.x.node(200), a.xi.node(250), &UniformGrid::new(8.0, 512).unwrap());
        assert!((p - a.get(200, 250)).norm() < 1e-10);
    }

    #[test]
    fn orthogonality_examples() {
        let grid = UniformGrid::new(8.0, 1024).unwrap();
        let r = orthogonality_check(&g(), &g(), &g(), &g(), grid).unwrap();
        assert!(r < 1e-10, "{r}");
        let h1 = AnalyticSignal::hermite(1);
        assert!(orthogonality_check(&g(), &h1, &g(), &g(), grid).unwrap() < 1e-10);
        let tg = g().translated(2.0);
        let r = orthogonality_check(&tg, &g(), &g(), &g(), grid).unwrap();
        assert!(r < 1e-10, "{r}");
        // ⟨T_2 g, g⟩ = e^{-2π} for the normalised Gaussian.
        assert!((inner(&tg, &g(), &grid).norm() - libm::exp(-2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn rihaczek_examples() {
        let x = UniformGrid::new(3.0, 16).unwrap();
        let r = rihaczek(&g(), &g(), &x, &x);
        for i in 0..16 {
            for k in 0..16 {
                let (a, b) = (x.node(i), x.node(k));
                let expect = cis(-2.0 * PI * a * b) * (libm::sqrt(2.0) * libm::exp(-PI * (a * a + b * b)));
                assert!((r[i * 16 + k] - expect).norm() < 1e-14);
            }
        }
        let f = AnalyticSignal::hermite(1).translated(0.3);
        assert!((rihaczek_value(&g(), &f, 0.0, 0.0) - g().eval(0.0) * f.fourier(0.0).unwrap().conj()).norm() < 1e-15);
    }

    #[test]
    fn rihaczek_quadrature_fallback_for_chirp() {
        let c = AnalyticSignal::chirp(0.5, 4.0);
        let v = rihaczek_value(&g(), &c, 0.3, 0.2);
        assert!(v.norm().is_finite() && v.norm() > 0.0);
        assert!((v.norm() - g().eval(0.3).norm() * fourier_value(&c, 0.2).norm()).abs() < 1e-14);
    }

    #[test]
    fn rihaczek_identity_at_origin_and_probe() {
        let quad = IdentityQuadrature::default();
        let f = AnalyticSignal::gaussian(1.0, 0.8, 0.3, -0.2);
        let (l, r) = rihaczek_identity_sides(&f, &g(), &g(), &g(), [0.0; 4], &quad);
        assert!((l - r).norm() < 1e-10, "{l} {r}");
        let (l, r) = rihaczek_identity_sides(&f, &g(), &g(), &g(), [1.0, -2.0, 2.0, 0.5], &quad);
        assert!((l - r).norm() < 1e-10, "{l} {r}");
    }
}
