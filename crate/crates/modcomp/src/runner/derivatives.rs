use modcomp_core::symbol::symbol_eval;
use modcomp_core::ultradiff::{check_derivative_bound, symbol_nth_derivative, DerivativeGrid};
use modcomp_core::{Complex64, Error as CoreError};

use super::weights::bool_str;
use super::{Context, Produced};
use crate::config::{parse_weight, DerivativeBoundsParams};
use crate::error::RunError;
use crate::report::{float, CheckOutcome, Table};

/// Points (x, y) where the exact derivatives are compared with finite
/// differences.
const FD_POINTS: [(f64, f64); 3] = [(0.7, 1.3), (-1.9, 2.4), (3.1, -3.2)];

/// n-th derivative by Richardson-extrapolated central differences with base
/// step `h`; the error is O(h⁴).
pub fn central_difference(f: impl Fn(f64) -> Complex64, n: usize, x: f64, h: f64) -> Complex64 {
    let plain = |h: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += f(x + (n as f64 / 2.0 - k as f64) * h) * (sign * binom);
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        acc / h.powi(n as i32)
    };
    (plain(h / 2.0) * 4.0 - plain(h)) / 3.0
}

pub(super) fn run(p: &DerivativeBoundsParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let phi = p.map.perturbation(None)?;
    let w = parse_weight(&p.weight, "derivative_bounds.weight")?;
    let grid = DerivativeGrid { x_max: p.grid.x_max, y_max: p.grid.y_max, nx: p.grid.nx, ny: p.grid.ny };
    let mut out = Produced::default();
    let header = ["phi_id", "check", "n", "x", "y", "value", "reference", "margin", "passed"];
    let mut table = Table::create(ctx.path("derivatives.csv"), &header)?;
    let id = p.map.to_string();

    match check_derivative_bound(&phi, &w, p.ell, p.n_max, &grid, &p.m_candidates) {
        Ok(r) => {
            let (n, x, y) = &r.worst_at;
            table.row([
                id.as_str(),
                "bound",
                &n.to_string(),
                &float(x[0]),
                &float(y[0]),
                &float(r.m),
                &float(r.required),
                &float(r.worst_margin),
                "true",
            ])?;
            let detail = format!("smallest m = {} (required {:.4}), worst log margin {:.4e}", r.m, r.required, r.worst_margin);
            out.checks.push(CheckOutcome::new("derivative bound", true, detail));
        }
        Err(CoreError::NoCandidate(msg)) => {
            table.row([id.as_str(), "bound", "", "", "", "", "", "", "false"])?;
            out.checks.push(CheckOutcome::new("derivative bound", false, msg));
        }
        Err(e) => return Err(e.into()),
    }

    if p.fd_order > 0 {
        let mut worst = 0.0f64;
        let slope = phi.derivative_sup(1, grid.x_max, 257);
        for &(x, y) in &FD_POINTS {
            let h = 0.1 / (1.0 + slope * y.abs());
            let sigma = |t: f64| symbol_eval(&phi, &[t], &[y]);
            for n in 1..=p.fd_order {
                let exact = symbol_nth_derivative(&phi, n, x, &[y])?;
                let fd = central_difference(sigma, n, x, h);
                let rel = if exact.norm() > 0.0 { (fd - exact).norm() / exact.norm() } else { fd.norm() };
                worst = worst.max(rel);
                table.row([
                    id.as_str(),
                    "finite_difference",
                    &n.to_string(),
                    &float(x),
                    &float(y),
                    &float(exact.norm()),
                    &float(fd.norm()),
                    &float(rel),
                    bool_str(rel <= p.fd_tolerance),
                ])?;
            }
        }
        let passed = worst <= p.fd_tolerance;
        out.checks.push(CheckOutcome::new("finite differences", passed, format!("max rel err {worst:.3e}")));
    }
    out.files.push(table.finish()?);
    Ok(out)
}
