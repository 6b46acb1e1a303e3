//! Gauss–Legendre rules on composite panels.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::sum::{pairwise, pairwise_complex};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1] by Newton iteration on P_n.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > 512 {
            return Err(invalid("order", "must lie in 1..=512"));
        }
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Composite rule over `panels` equal panels of [a, b].
    pub fn integrate(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        let mut terms = Vec::with_capacity(panels * self.order());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                terms.push(0.5 * h * w * f(mid + 0.5 * h * x));
            }
        }
        pairwise(&terms)
    }

    pub fn integrate_complex(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Complex64 {
        let h = (b - a) / panels as f64;
        let mut terms = Vec::with_capacity(panels * self.order());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                terms.push(f(mid + 0.5 * h * x) * (0.5 * h * w));
            }
        }
        pairwise_complex(&terms)
    }

    /// Absolute nodes and weights of the composite rule, for callers that
    /// reuse the same abscissae across many integrands.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.order());
        let mut ws = Vec::with_capacity(panels * self.order());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(5).unwrap();
        let v = gl.integrate(-1.0, 1.0, 1, |x| x.powi(8) + 3.0 * x.powi(3));
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 20, 64] {
            let gl = GaussLegendre::new(n).unwrap();
            assert!((pairwise(gl.weights()) - 2.0).abs() < 1e-13, "{n}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let gl = GaussLegendre::new(20).unwrap();
        let v = gl.integrate(-10.0, 10.0, 8, |x| libm::exp(-PI * x * x));
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn composite_matches_integrate() {
        let gl = GaussLegendre::new(8).unwrap();
        let (xs, ws) = gl.composite(0.0, 2.0, 3);
        let direct: f64 = xs.iter().zip(&ws).map(|(x, w)| w * libm::sin(*x)).sum();
        assert!((direct - gl.integrate(0.0, 2.0, 3, libm::sin)).abs() < 1e-14);
        assert!((direct - (1.0 - libm::cos(2.0))).abs() < 1e-13);
    }

    #[test]
    fn rejects_zero_order() {
        assert!(GaussLegendre::new(0).is_err());
    }
}
