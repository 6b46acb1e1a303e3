use modcomp_core::signal::{sample, AnalyticSignal};
use modcomp_core::stft::{orthogonality_check, rihaczek_identity_sides, stft_sampled, IdentityQuadrature};

use super::weights::bool_str;
use super::{linspace, Context, Produced};
use crate::config::StftIdentitiesParams;
use crate::dump::Dump;
use crate::error::RunError;
use crate::report::{float, CheckOutcome, Table};

/// Ten (f₁, f₂, g₁, g₂) quadruples of Gaussians and Hermite functions.
pub fn standard_quadruples() -> Vec<[AnalyticSignal; 4]> {
    let g = |a: f64, x: f64, b: f64| AnalyticSignal::gaussian(1.0, a, x, b);
    let h = |n: u32| AnalyticSignal::hermite(n);
    vec![
        [g(1.0, 0.0, 0.0), g(1.0, 0.0, 0.0), g(1.0, 0.0, 0.0), g(1.0, 0.0, 0.0)],
        [g(1.0, 0.5, 0.0), g(2.0, -0.3, 1.0), g(1.0, 0.0, 0.0), g(0.5, 0.0, 0.0)],
        [h(1), h(1), g(1.0, 0.0, 0.0), g(1.0, 0.0, 0.0)],
        [h(2), h(0), g(1.0, 0.0, 0.0), g(2.0, 0.4, 0.0)],
        [h(3), g(1.0, 1.0, -1.0), h(0), h(2)],
        [g(0.5, -1.0, 2.0), g(0.5, -1.0, 2.0), h(1), h(1)],
        [h(4), h(4), g(1.5, 0.0, 0.5), g(1.5, 0.0, 0.5)],
        [g(2.0, 0.0, -0.5), h(2), h(3), g(1.0, 0.2, 0.0)],
        [h(0).tf_shift(0.7, 1.2), h(1).tf_shift(-0.4, 0.3), g(1.0, 0.0, 0.0), h(1)],
        [g(1.0, 2.0, 0.0), g(1.0, -2.0, 0.0), g(0.8, 0.0, 1.0), g(0.8, 0.0, -1.0)],
    ]
}

pub(super) fn run(p: &StftIdentitiesParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let grid = p.grid.fft_grid("stft_identities.grid")?;
    let mut out = Produced::default();
    let mut table = Table::create(ctx.path("identities.csv"), &["check", "index", "probe", "residual", "tolerance", "passed"])?;
    let quads = standard_quadruples();
    if p.orthogonality {
        let mut worst = 0.0f64;
        for (i, [f1, f2, g1, g2]) in quads.iter().enumerate() {
            let r = orthogonality_check(f1, f2, g1, g2, grid)?;
            worst = worst.max(r);
            table.row(["orthogonality", &i.to_string(), "", &float(r), &float(p.tolerance), bool_str(r <= p.tolerance)])?;
        }
        let passed = worst <= p.tolerance;
        out.checks.push(CheckOutcome::new("orthogonality", passed, format!("max residual {worst:.3e}")));
    }
    if p.rihaczek_points > 0 {
        let f = AnalyticSignal::gaussian(1.0, 1.0, 0.3, 0.5);
        let g = AnalyticSignal::gaussian(1.0, 0.8, -0.2, -0.4);
        let phi1 = AnalyticSignal::normalized_gaussian(1.0);
        let phi2 = AnalyticSignal::normalized_gaussian(1.5);
        let axis = linspace(-p.rihaczek_extent, p.rihaczek_extent, p.rihaczek_points);
        let mut probes = Vec::new();
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    for &d in &axis {
                        probes.push([a, b, c, d]);
                    }
                }
            }
        }
        let quad = IdentityQuadrature::default();
        let residuals = residuals(&probes, |probe| {
            let (l, r) = rihaczek_identity_sides(&f, &g, &phi1, &phi2, probe, &quad);
            (l - r).norm()
        });
        let mut worst = 0.0f64;
        for (i, (probe, r)) in probes.iter().zip(&residuals).enumerate() {
            worst = worst.max(*r);
            let label = probe.iter().map(|v| float(*v)).collect::<Vec<_>>().join(" ");
            table.row(["rihaczek", &i.to_string(), &label, &float(*r), &float(p.tolerance), bool_str(*r <= p.tolerance)])?;
        }
        let passed = worst <= p.tolerance;
        let detail = format!("max residual {worst:.3e} over {} probes", probes.len());
        out.checks.push(CheckOutcome::new("rihaczek", passed, detail));
    }
    out.files.push(table.finish()?);
    if p.dump_stft {
        let [f1, _, g1, _] = quads[0];
        let v = stft_sampled(&sample(|t| f1.eval(t), grid), &g1, grid)?;
        let path = ctx.path("stft.bin");
        Dump::from_tf_matrix(&v).write(&path)?;
        out.files.push(path);
    }
    Ok(out)
}

#[cfg(feature = "parallel")]
fn residuals(probes: &[[f64; 4]], f: impl Fn([f64; 4]) -> f64 + Sync) -> Vec<f64> {
    use rayon::prelude::*;
    probes.par_iter().map(|p| f(*p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn residuals(probes: &[[f64; 4]], f: impl Fn([f64; 4]) -> f64) -> Vec<f64> {
    probes.iter().map(|p| f(*p)).collect()
}

