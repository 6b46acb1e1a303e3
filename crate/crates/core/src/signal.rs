//! Closed-form test signals, sampled signals, and the Fourier transform
//! f̂(ξ) = ∫ f(t) e^{-2πitξ} dt on uniform grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Fft, Fft2};
use crate::grid::UniformGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    /// e^{-πat²}.
    Gaussian { width: f64 },
    /// L²-normalised Hermite function h_n with e^{-πt²} envelope.
    Hermite { order: u32 },
    /// (1+t²)^{-decay/2} e^{iπ·rate·t²}.
    LinearChirp { rate: f64, decay: f64 },
    /// e^{iξt}, ξ in angular units.
    PlaneWave { frequency: f64 },
}

/// t ↦ amplitude · e^{2πiβt} · base(t - shift).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSignal {
    pub kind: SignalKind,
    pub amplitude: Complex64,
    pub shift: f64,
    pub modulation: f64,
}

impl AnalyticSignal {
    pub fn new(kind: SignalKind) -> Self {
        Self { kind, amplitude: Complex64::new(1.0, 0.0), shift: 0.0, modulation: 0.0 }
    }

    /// amp · e^{-πa(t-x₀)²} e^{2πiβt}.
    pub fn gaussian(amplitude: f64, width: f64, center: f64, modulation: f64) -> Self {
        Self {
            kind: SignalKind::Gaussian { width },
            amplitude: Complex64::new(amplitude, 0.0),
            shift: center,
            modulation,
        }
    }

    /// Gaussian of width a with unit L² norm.
    pub fn normalized_gaussian(width: f64) -> Self {
        Self::gaussian(libm::pow(2.0 * width, 0.25), width, 0.0, 0.0)
    }

    pub fn hermite(order: u32) -> Self {
        Self::new(SignalKind::Hermite { order })
    }

    pub fn chirp(rate: f64, decay: f64) -> Self {
        Self::new(SignalKind::LinearChirp { rate, decay })
    }

    pub fn plane_wave(frequency: f64) -> Self {
        Self::new(SignalKind::PlaneWave { frequency })
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.amplitude *= c;
        self
    }

    /// T_c f = f(· - c).
    pub fn translated(mut self, c: f64) -> Self {
        self.amplitude *= cis(-2.0 * PI * self.modulation * c);
        self.shift += c;
        self
    }

    /// M_β f = e^{2πiβ·} f.
    pub fn modulated(mut self, beta: f64) -> Self {
        self.modulation += beta;
        self
    }

    /// M_β T_a self.
    pub fn tf_shift(self, a: f64, beta: f64) -> Self {
        self.translated(a).modulated(beta)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.amplitude * cis(2.0 * PI * self.modulation * t) * self.base(t - self.shift)
    }

    fn base(&self, t: f64) -> Complex64 {
        match self.kind {
            SignalKind::Gaussian { width } => Complex64::new(libm::exp(-PI * width * t * t), 0.0),
            SignalKind::Hermite { order } => Complex64::new(hermite_function(order, t), 0.0),
            SignalKind::LinearChirp { rate, decay } => {
                cis(PI * rate * t * t) * libm::pow(1.0 + t * t, -0.5 * decay)
            }
            SignalKind::PlaneWave { frequency } => cis(frequency * t),
        }
    }

    /// n-th derivative at t.
    pub fn derivative(&self, n: usize, t: f64) -> Result<Complex64> {
        Ok(self.derivatives(n, t)?[n])
    }

    /// f(t), f'(t), ..., f^{(n)}(t).
    pub fn derivatives(&self, n: usize, t: f64) -> Result<Vec<Complex64>> {
        let u = t - self.shift;
        let iw = Complex64::new(0.0, 2.0 * PI * self.modulation);
        let base = self.base_derivatives(n, u)?;
        let front = self.amplitude * cis(2.0 * PI * self.modulation * t);
        // Leibniz with the modulation factor: Σ C(m,k) (2πiβ)^k b^{(m-k)}.
        let mut powers = Vec::with_capacity(n + 1);
        let mut pow = Complex64::new(1.0, 0.0);
        for _ in 0..=n {
            powers.push(pow);
            pow *= iw;
        }
        let mut out = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut binom = 1.0;
            for k in 0..=m {
                acc += base[m - k] * powers[k] * binom;
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
            out.push(front * acc);
        }
        Ok(out)
    }

    /// b^{(0)}(u), ..., b^{(n)}(u) for the unshifted, unmodulated base.
    fn base_derivatives(&self, n: usize, u: f64) -> Result<Vec<Complex64>> {
        match self.kind {
            SignalKind::Gaussian { width } => {
                let e = libm::exp(-PI * width * u * u);
                Ok(gaussian_polys(width, n, u).into_iter().map(|p| Complex64::new(p * e, 0.0)).collect())
            }
            SignalKind::Hermite { order } => {
                let e = libm::exp(-PI * u * u);
                let mut poly = hermite_poly(order);
                let mut out = Vec::with_capacity(n + 1);
                for _ in 0..=n {
                    out.push(Complex64::new(horner(&poly, u) * e, 0.0));
                    poly = differentiate_gauss_poly(&poly);
                }
                Ok(out)
            }
            SignalKind::PlaneWave { frequency } => {
                let mut out = Vec::with_capacity(n + 1);
                let mut c = cis(frequency * u);
                for _ in 0..=n {
                    out.push(c);
                    c *= Complex64::new(0.0, frequency);
                }
                Ok(out)
            }
            SignalKind::LinearChirp { .. } => {
                if n == 0 {
                    Ok(alloc::vec![self.base(u)])
                } else {
                    Err(Error::MissingDerivative("linear chirp"))
                }
            }
        }
    }

    pub fn has_derivatives(&self) -> bool {
        !matches!(self.kind, SignalKind::LinearChirp { .. })
    }

    /// Closed-form f̂(ξ).
    pub fn fourier(&self, xi: f64) -> Result<Complex64> {
        // FT of amp·e^{2πiβt} b(t-c) is amp·e^{-2πic(ξ-β)} b̂(ξ-β).
        let eta = xi - self.modulation;
        let b = match self.kind {
            SignalKind::Gaussian { width } => {
                Complex64::new(libm::exp(-PI * eta * eta / width) / libm::sqrt(width), 0.0)
            }
            SignalKind::Hermite { order } => {
                let phase = match order % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                phase * hermite_function(order, eta)
            }
            SignalKind::LinearChirp { .. } => return Err(Error::MissingFourier("linear chirp")),
            SignalKind::PlaneWave { .. } => return Err(Error::MissingFourier("plane wave")),
        };
        Ok(self.amplitude * cis(-2.0 * PI * self.shift * eta) * b)
    }

    pub fn has_fourier(&self) -> bool {
        matches!(self.kind, SignalKind::Gaussian { .. } | SignalKind::Hermite { .. })
    }

    /// Squared L² norm in closed form, when finite and known.
    pub fn norm_sq(&self) -> Option<f64> {
        let a = self.amplitude.norm_sqr();
        match self.kind {
            SignalKind::Gaussian { width } => Some(a / libm::sqrt(2.0 * width)),
            SignalKind::Hermite { .. } => Some(a),
            _ => None,
        }
    }

    /// Magnitude envelope of the STFT against a Gaussian window, when both
    /// are Gaussians: |V_g f(x,ξ)| = C e^{-π(κ_x (x-x₀)² + κ_ξ (ξ-β)²)}.
    pub fn gaussian_stft_envelope(&self, window: &AnalyticSignal) -> Option<GaussianEnvelope> {
        let (SignalKind::Gaussian { width: a }, SignalKind::Gaussian { width: b }) = (self.kind, window.kind)
        else {
            return None;
        };
        let s = a + b;
        Some(GaussianEnvelope {
            peak: self.amplitude.norm() * window.amplitude.norm() / libm::sqrt(s),
            center: (self.shift + window.shift, self.modulation - window.modulation),
            kappa_x: a * b / s,
            kappa_xi: 1.0 / s,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub peak: f64,
    pub center: (f64, f64),
    pub kappa_x: f64,
    pub kappa_xi: f64,
}

impl GaussianEnvelope {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        let (dx, dxi) = (x - self.center.0, xi - self.center.1);
        self.peak * libm::exp(-PI * (self.kappa_x * dx * dx + self.kappa_xi * dxi * dxi))
    }

    /// Slowest Gaussian rate in any phase-space direction.
    pub fn kappa_min(&self) -> f64 {
        self.kappa_x.min(self.kappa_xi)
    }
}

pub(crate) fn cis(t: f64) -> Complex64 {
    let (s, c) = libm::sincos(t);
    Complex64::new(c, s)
}

/// e^{2πi·t} with the argument reduced modulo 1 first.
pub(crate) fn cis_turns(t: f64) -> Complex64 {
    cis(2.0 * PI * (t - libm::round(t)))
}

/// p_0..p_n with d^k/du^k e^{-πau²} = p_k(u) e^{-πau²}, by
/// p_{k+1} = q' p_k + k q'' p_{k-1}, q = -πau².
fn gaussian_polys(width: f64, n: usize, u: f64) -> Vec<f64> {
    let q1 = -2.0 * PI * width * u;
    let q2 = -2.0 * PI * width;
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(q1);
    }
    for k in 1..n {
        let next = q1 * p[k] + k as f64 * q2 * p[k - 1];
        p.push(next);
    }
    p
}

/// Normalised Hermite function by the stable three-term recurrence.
pub fn hermite_function(order: u32, t: f64) -> f64 {
    let x = libm::sqrt(2.0 * PI) * t;
    let mut h0 = libm::pow(2.0, 0.25) * libm::exp(-PI * t * t);
    if order == 0 {
        return h0;
    }
    let mut h1 = libm::sqrt(2.0) * x * h0;
    for n in 1..order {
        let nf = n as f64;
        let h2 = libm::sqrt(2.0 / (nf + 1.0)) * x * h1 - libm::sqrt(nf / (nf + 1.0)) * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Coefficients (ascending) of P_n with h_n(t) = P_n(t) e^{-πt²}.
fn hermite_poly(order: u32) -> Vec<f64> {
    let c = libm::sqrt(2.0 * PI);
    let mut p0 = alloc::vec![libm::pow(2.0, 0.25)];
    if order == 0 {
        return p0;
    }
    let mut p1 = alloc::vec![0.0, libm::sqrt(2.0) * c * p0[0]];
    for n in 1..order {
        let nf = n as f64;
        let a = libm::sqrt(2.0 / (nf + 1.0)) * c;
        let b = libm::sqrt(nf / (nf + 1.0));
        let mut p2 = alloc::vec![0.0; p1.len() + 1];
        for (k, v) in p1.iter().enumerate() {
            p2[k + 1] += a * v;
        }
        for (k, v) in p0.iter().enumerate() {
            p2[k] -= b * v;
        }
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P ↦ P' - 2πtP, the polynomial factor of d/dt [P e^{-πt²}].
fn differentiate_gauss_poly(p: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; p.len() + 1];
    for (k, v) in p.iter().enumerate() {
        if k > 0 {
            out[k - 1] += k as f64 * v;
        }
        out[k + 1] -= 2.0 * PI * v;
    }
    out
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Complex samples on the tensor grid axis^d, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub d: usize,
    pub axis: UniformGrid,
    pub values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(d: usize, axis: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        let expected = axis.len().pow(d as u32);
        if d == 0 || d > 2 {
            return Err(Error::DimensionMismatch { expected: 1, got: d });
        }
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        Ok(Self { d, axis, values })
    }

    /// Riemann-sum L² norm.
    pub fn l2_norm(&self) -> f64 {
        let mass: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        libm::sqrt(crate::sum::pairwise(&mass) * libm::pow(self.axis.spacing(), self.d as f64))
    }

    pub fn max_abs_diff(&self, other: &SampledSignal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn sample(f: impl Fn(f64) -> Complex64, axis: UniformGrid) -> SampledSignal {
    SampledSignal { d: 1, axis, values: axis.nodes().map(f).collect() }
}

/// Samples f₁(x₁) f₂(x₂) on axis².
pub fn sample_tensor(
    f1: impl Fn(f64) -> Complex64,
    f2: impl Fn(f64) -> Complex64,
    axis: UniformGrid,
) -> SampledSignal {
    let a: Vec<Complex64> = axis.nodes().map(f1).collect();
    let b: Vec<Complex64> = axis.nodes().map(f2).collect();
    let mut values = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            values.push(x * y);
        }
    }
    SampledSignal { d: 2, axis, values }
}

/// Discrete approximation of f̂ on the dual grid.
pub fn fourier(f: &SampledSignal) -> Result<SampledSignal> {
    transform(f, false)
}

/// Inverse of [`fourier`]: maps samples on a dual grid back to the primal one.
pub fn inverse_fourier(f: &SampledSignal) -> Result<SampledSignal> {
    transform(f, true)
}

// With n divisible by 4, e^{±2πi x_j ξ_k} = (-1)^{j+k} e^{±2πijk/n}, so both
// directions are a checkerboard-signed DFT scaled by the grid spacing.
fn transform(f: &SampledSignal, inverse: bool) -> Result<SampledSignal> {
    f.axis.require_fft()?;
    let n = f.axis.len();
    let h = f.axis.spacing();
    let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut values = f.values.clone();
    match f.d {
        1 => {
            for (j, v) in values.iter_mut().enumerate() {
                *v *= sign(j);
            }
            let fft = Fft::new(n)?;
            if inverse {
                fft.inverse(&mut values);
            } else {
                fft.forward(&mut values);
            }
            for (k, v) in values.iter_mut().enumerate() {
                *v *= sign(k) * h;
            }
        }
        2 => {
            for (idx, v) in values.iter_mut().enumerate() {
                *v *= sign(idx / n + idx % n);
            }
            let fft = Fft2::new(n, n)?;
            let mut scratch = Vec::new();
            if inverse {
                fft.inverse(&mut values, &mut scratch);
            } else {
                fft.forward(&mut values, &mut scratch);
            }
            for (idx, v) in values.iter_mut().enumerate() {
                *v *= sign(idx / n + idx % n) * h * h;
            }
        }
        d => return Err(Error::DimensionMismatch { expected: 2, got: d }),
    }
    Ok(SampledSignal { d: f.d, axis: f.axis.dual(), values })
}
