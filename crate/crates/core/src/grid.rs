use crate::error::{invalid, Error, Result};

/// Uniform axis on [-L, L) with `n` nodes x_j = -L + jΔ, Δ = 2L/n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    half_width: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("half_width", "must be positive and finite"));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGridSize(n));
        }
        Ok(Self { half_width, n })
    }

    /// Same construction, additionally requiring an FFT-compatible size.
    pub fn fft(half_width: f64, n: usize) -> Result<Self> {
        let g = Self::new(half_width, n)?;
        g.require_fft()?;
        Ok(g)
    }

    pub fn require_fft(&self) -> Result<()> {
        if self.n.is_power_of_two() {
            Ok(())
        } else {
            Err(Error::NotPowerOfTwo(self.n))
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Frequency grid of the discrete Fourier transform: spacing 1/(2L),
    /// half-width n/(4L). Taking the dual twice returns the original grid.
    pub fn dual(&self) -> Self {
        Self { half_width: self.n as f64 / (4.0 * self.half_width), n: self.n }
    }

    /// Twice the extent at the same spacing.
    pub fn doubled(&self) -> Self {
        Self { half_width: 2.0 * self.half_width, n: 2 * self.n }
    }

    /// Index of the node equal to `x` up to a relative 1e-9 of the spacing.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x + self.half_width) / self.spacing();
        let j = libm::round(t);
        if (t - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }
}
