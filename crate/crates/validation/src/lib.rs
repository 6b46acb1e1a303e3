//! Reference computations that share no code paths with `modcomp-core`:
//! contour-integral derivatives, partition counts by recurrence, closed-form
//! conjugates and polynomial products.

use std::f64::consts::PI;

use modcomp_core::Complex64;

/// φ*(y) = sup_{t >= 0} (yt - e^{t/s}) for the Gevrey weight t^{1/s}.
pub fn gevrey_conjugate(s: f64, y: f64) -> f64 {
    let sy = s * y;
    if sy >= 1.0 {
        sy * (sy.ln() - 1.0)
    } else {
        -1.0
    }
}

/// f⁽ⁿ⁾(x) of an entire f by the trapezoidal rule on the circle |z - x| = r:
/// f⁽ⁿ⁾(x) = n!/rⁿ · mean_k f(x + r e^{iθ_k}) e^{-inθ_k}.
pub fn contour_derivative(f: impl Fn(Complex64) -> Complex64, x: f64, n: usize, r: f64, points: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let theta = 2.0 * PI * k as f64 / points as f64;
        let w = Complex64::from_polar(1.0, theta);
        acc += f(x + w * r) * Complex64::from_polar(1.0, -(n as f64) * theta);
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    acc / points as f64 * factorial / r.powi(n as i32)
}

/// n-th central difference (1/hⁿ) Σ_k (-1)^k C(n,k) f(x + (n/2 - k)h),
/// Richardson-extrapolated from steps h and h/2.
pub fn finite_difference(f: impl Fn(f64) -> Complex64, n: usize, x: f64, h: f64) -> Complex64 {
    let stencil = |h: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            let c = binomial(n as u64, k as u64) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += f(x + (n as f64 / 2.0 - k as f64) * h) * c;
        }
        acc / h.powi(n as i32)
    };
    (stencil(h / 2.0) * 4.0 - stencil(h)) / 3.0
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// p(0..=n_max) by Euler's pentagonal-number recurrence.
pub fn partition_counts(n_max: usize) -> Vec<u64> {
    let mut p = vec![0i64; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        let mut total = 0i64;
        for k in 1.. {
            let k = k as i64;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > n {
                break;
            }
            total += sign * p[n - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= n {
                total += sign * p[n - g2];
            }
        }
        p[n] = total;
    }
    p.into_iter().map(|v| v as u64).collect()
}

/// Coefficients of ∏_{k=1}^{K} (1 + z²/k^{2s}) in ascending powers.
pub fn product_coefficients(truncation: usize, s: f64) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..=truncation {
        let q = (k as f64).powf(-2.0 * s);
        let mut next = vec![0.0; c.len() + 2];
        for (i, ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 2] += ci * q;
        }
        c = next;
    }
    c
}

/// ∏_{k=1}^{K} (1 + x²/k^{2s}) at a real point.
pub fn product_value(truncation: usize, s: f64, x: f64) -> f64 {
    (1..=truncation).map(|k| 1.0 + x * x / (k as f64).powf(2.0 * s)).product()
}

/// Least-squares slope of y against x.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_partition_counts() {
        let p = partition_counts(25);
        assert_eq!(&p[..8], &[1, 1, 2, 3, 5, 7, 11, 15]);
        assert_eq!(p[25], 1958);
    }

    #[test]
    fn contour_derivative_of_exponential() {
        let f = |z: Complex64| (z * 2.0).exp();
        for n in 0..10 {
            let d = contour_derivative(f, 0.3, n, 1.0, 64);
            let exact = 2f64.powi(n as i32) * (0.6f64).exp();
            assert!((d.re - exact).abs() / exact < 1e-12 && d.im.abs() / exact < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn finite_difference_of_cosine() {
        let f = |t: f64| Complex64::new(t.cos(), 0.0);
        let d4 = finite_difference(f, 4, 0.4, 0.05);
        assert!((d4.re - 0.4f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn product_of_two_factors() {
        let c = product_coefficients(2, 1.0);
        assert_eq!(c, vec![1.0, 0.0, 1.25, 0.0, 0.25]);
        assert!((product_value(2, 1.0, 2.0) - 5.0 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn conjugate_matches_a_brute_force_supremum() {
        for (s, y) in [(2.0, 3.0), (1.5, 0.2), (3.0, 10.0)] {
            let brute = (0..200_000).map(|i| i as f64 * 1e-4).map(|t| y * t - (t / s).exp()).fold(f64::MIN, f64::max);
            assert!((brute - gevrey_conjugate(s, y)).abs() < 1e-6, "s = {s}, y = {y}");
        }
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 1.0).collect();
        assert!((regression_slope(&xs, &ys) - 0.5).abs() < 1e-15);
    }
}
