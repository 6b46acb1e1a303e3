//! Iterative radix-2 FFT. Forward uses e^{-2πijk/n}; inverse is unnormalised.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let t = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(t), libm::sin(t))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        Ok(Self { n, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n, "fft length mismatch");
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Row-column 2-D transform of a row-major `rows x cols` array.
#[derive(Debug, Clone)]
pub struct Fft2 {
    rows: Fft,
    cols: Fft,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Ok(Self { rows: Fft::new(rows)?, cols: Fft::new(cols)? })
    }

    pub fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(data, scratch, false);
    }

    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.run(data, scratch, true);
    }

    fn run(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>, inverse: bool) {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        assert_eq!(data.len(), nr * nc, "fft2 length mismatch");
        for row in data.chunks_exact_mut(nc) {
            self.cols.run(row, inverse);
        }
        scratch.clear();
        scratch.resize(nr, Complex64::new(0.0, 0.0));
        for c in 0..nc {
            for r in 0..nr {
                scratch[r] = data[r * nc + c];
            }
            self.rows.run(scratch, inverse);
            for r in 0..nr {
                data[r * nc + c] = scratch[r];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                    let t = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex64::new(libm::cos(t), libm::sin(t))
                })
            })
            .collect()
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(Fft::new(12).unwrap_err(), Error::NotPowerOfTwo(12));
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new(libm::sin(j as f64 * 0.37), libm::cos(j as f64 * 1.3) - 0.2))
            .collect();
        let mut y = x.clone();
        Fft::new(64).unwrap().forward(&mut y);
        for (a, b) in y.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip() {
        let x: Vec<Complex64> = (0..256).map(|j| Complex64::new(j as f64, -(j as f64) / 3.0)).collect();
        let fft = Fft::new(256).unwrap();
        let mut y = x.clone();
        fft.forward(&mut y);
        fft.inverse(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 256.0 - b).norm() < 1e-10);
        }
    }

    #[test]
    fn two_dimensional_matches_separable_product() {
        let a: Vec<Complex64> = (0..8).map(|j| Complex64::new(j as f64 + 1.0, 0.5)).collect();
        let b: Vec<Complex64> = (0..16).map(|j| Complex64::new(0.0, j as f64 - 3.0)).collect();
        let mut grid = vec![Complex64::new(0.0, 0.0); 8 * 16];
        for r in 0..8 {
            for c in 0..16 {
                grid[r * 16 + c] = a[r] * b[c];
            }
        }
        let mut scratch = Vec::new();
        Fft2::new(8, 16).unwrap().forward(&mut grid, &mut scratch);
        let (fa, fb) = (naive_dft(&a), naive_dft(&b));
        for r in 0..8 {
            for c in 0..16 {
                assert!((grid[r * 16 + c] - fa[r] * fb[c]).norm() < 1e-9);
            }
        }
    }
}
