use modcomp_core::grid::UniformGrid;
use modcomp_core::signal::AnalyticSignal;
use modcomp_core::ultradiff::{
    apply_operator, build_operator, check_cauchy_bound, default_c_candidates, product_expansion, EntireOperatorModel,
    DEFAULT_M0_CANDIDATES,
};
use modcomp_core::Complex64;

use super::{linspace, Context, Produced};
use crate::config::{ExpansionSpec, OperatorModelParams};
use crate::error::RunError;
use crate::report::{float, CheckOutcome, Table};

pub(super) fn run(p: &OperatorModelParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let model = build_operator(p.truncation, p.order)?;
    let axis = p.grid.grid("operator_model.grid")?;
    let id = format!("K={},s={}", p.truncation, p.order);
    let mut out = Produced::default();
    let mut table = Table::create(ctx.path("operator.csv"), &["model_id", "check", "n_or_k", "value", "bound", "margin"])?;

    let m = p.m.unwrap_or_else(|| model.growth_constant.ceil());
    let cauchy = check_cauchy_bound(&model, m, p.cauchy_n_max)?;
    for n in 0..=p.cauchy_n_max {
        let c = model.coefficient(n);
        let log_bound = m - m * model.weight.young_conjugate(n as f64 / m)?;
        let margin = log_bound - c.abs().ln();
        table.row([id.as_str(), "cauchy", &n.to_string(), &float(c), &float(log_bound.exp()), &float(margin)])?;
    }
    let detail = format!("m = {m}, m_G = {:.4}, worst log margin {:.4e} at n = {}", model.growth_constant, cauchy.worst_margin, cauchy.worst_n);
    out.checks.push(CheckOutcome::new("cauchy", cauchy.passed(), detail));

    let mut worst = 0.0f64;
    for (j, xi) in linspace(-p.eigen_extent, p.eigen_extent, p.eigen_count).into_iter().enumerate() {
        let r = eigen_residual(&model, xi, axis)?;
        worst = worst.max(r);
        table.row([id.as_str(), "eigen", &j.to_string(), &float(r), &float(p.eigen_tolerance), &float(p.eigen_tolerance - r)])?;
    }
    let passed = worst <= p.eigen_tolerance;
    out.checks.push(CheckOutcome::new("plane-wave eigenrelation", passed, format!("max residual {worst:.3e}")));

    if let Some(e) = &p.expansion {
        expansion(e, p.order, axis, &mut table, &mut out)?;
    }
    out.files.insert(0, table.finish()?);
    Ok(out)
}

/// max |G(D)e_ξ - G(-ξ)e_ξ| over the grid, e_ξ(x) = e^{iξx}.
pub(crate) fn eigen_residual(model: &EntireOperatorModel, xi: f64, axis: UniformGrid) -> Result<f64, RunError> {
    let wave = AnalyticSignal::plane_wave(xi);
    let applied = apply_operator(model, &wave, axis)?;
    let multiplier = model.eval(Complex64::new(-xi, 0.0));
    Ok(axis
        .nodes()
        .zip(&applied.signal.values)
        .map(|(x, v)| (v - multiplier * wave.eval(x)).norm())
        .fold(0.0, f64::max))
}

fn expansion(e: &ExpansionSpec, order: f64, axis: UniformGrid, table: &mut Table, out: &mut Produced) -> Result<(), RunError> {
    let model = build_operator(e.truncation, order)?;
    let id = format!("K={},s={}", e.truncation, order);
    let g = AnalyticSignal::gaussian(1.0, 1.0, 0.0, 0.0);
    let h = AnalyticSignal::plane_wave(e.frequency);
    let exp = product_expansion(&model, &g, e.k_max, e.r_max, axis)?;
    let residual = exp.reassembly_residual(&model, &g, &h)?;
    let passed = residual <= e.tolerance;
    table.row([id.as_str(), "reassembly", &e.k_max.to_string(), &float(residual), &float(e.tolerance), &float(e.tolerance - residual)])?;
    out.checks.push(CheckOutcome::new("reassembly", passed, format!("residual {residual:.3e}")));

    let report = exp.coefficient_bound(&model, e.ell, &DEFAULT_M0_CANDIDATES, &default_c_candidates())?;
    for row in report.rows.iter().chain(std::iter::once(&report.reference)) {
        table.row([id.as_str(), "coefficient_bound", &row.m0.to_string(), &float(row.required_c), "", ""])?;
    }
    let detail = match report.smallest {
        Some((m0, c)) => format!("smallest m0 = {m0} with C = {c}"),
        None => "no (m0, C) pair bounds the coefficients".to_string(),
    };
    out.checks.push(CheckOutcome::new("coefficient bound", report.passed(), detail));
    Ok(())
}
