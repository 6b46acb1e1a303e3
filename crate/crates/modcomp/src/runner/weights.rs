use modcomp_core::weights::{
    check_bmm, check_small_power, check_weight_conditions, check_young_inequality, ConditionGrid, LogGrid, WeightKind,
};

use super::{linspace, Context, Produced};
use crate::config::{parse_weight, WeightCheck, WeightsParams};
use crate::error::RunError;
use crate::report::{float, write_tsv, CheckOutcome, Table};

/// Upper end T of the integrability tail in condition (β).
const CONDITION_TAIL: f64 = 1e6;

pub(super) fn run(p: &WeightsParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let w = parse_weight(&p.weight, "weights.weight")?;
    let mut out = Produced::default();
    let mut table = Table::create(ctx.path("weights.csv"), &["weight", "check", "parameter", "value", "bound", "passed"])?;
    let id = w.to_string();
    for check in &p.checks {
        match check {
            WeightCheck::Young => {
                let r = check_young_inequality(&w, p.young_j_max, p.young_m_max)?;
                let param = format!("j<={},m<={}", p.young_j_max, p.young_m_max);
                table.row([id.as_str(), "young", &param, &float(r.worst_slack), &float(0.0), bool_str(r.passed())])?;
                let detail = format!("worst slack {:.6e} at (j,m) = {:?}", r.worst_slack, r.worst_at);
                out.checks.push(CheckOutcome::new("young", r.passed(), detail));
            }
            WeightCheck::Conjugate => {
                let y_min = match w.kind() {
                    WeightKind::Gevrey { s } => 1.0 / s,
                    WeightKind::Linear => 1.0,
                    WeightKind::LogPower { .. } => {
                        return Err(RunError::config("weights.checks: conjugate needs a closed form (gevrey or linear)"))
                    }
                };
                let mut worst = 0.0f64;
                let mut rows = Vec::with_capacity(p.conjugate_samples);
                for y in linspace(y_min, 100.0, p.conjugate_samples) {
                    let closed = w.young_closed_form(y).expect("closed form exists");
                    let numeric = w.young_conjugate_numeric(y)?;
                    let rel = (numeric - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
                    worst = worst.max(rel);
                    rows.push(vec![y, closed, numeric, rel]);
                }
                out.files.push(write_tsv(&ctx.path("conjugate.tsv"), &["y", "closed_form", "numeric", "rel_err"], &rows)?);
                let passed = worst <= p.conjugate_tolerance;
                let param = format!("{} samples", p.conjugate_samples);
                table.row([id.as_str(), "conjugate", &param, &float(worst), &float(p.conjugate_tolerance), bool_str(passed)])?;
                out.checks.push(CheckOutcome::new("conjugate", passed, format!("max rel err {worst:.3e}")));
            }
            WeightCheck::Conditions => {
                let r = check_weight_conditions(&w, &ConditionGrid::default(), CONDITION_TAIL)?;
                for (name, c) in [("alpha", &r.alpha), ("beta", &r.beta), ("gamma", &r.gamma), ("delta", &r.delta)] {
                    let param = format!("at={}", float(c.at));
                    table.row([id.as_str(), name, &param, &float(c.value), "", bool_str(c.passed)])?;
                }
                let failed = r.failed();
                let detail = if failed.is_empty() { "all hold".to_string() } else { format!("failed: {}", failed.join(", ")) };
                out.checks.push(CheckOutcome::new("conditions", failed.is_empty(), detail));
            }
            WeightCheck::Bmm => {
                let h = check_bmm(&w, &p.bmm_candidates, &LogGrid::default());
                let value = h.unwrap_or(f64::NAN);
                table.row([id.as_str(), "bmm", "H", &float(value), "", bool_str(h.is_some())])?;
                out.checks.push(CheckOutcome::new("bmm", h.is_some(), format!("smallest H = {value}")));
            }
            WeightCheck::SmallPower => {
                let r = check_small_power(&w, p.small_power_exponent, &LogGrid::default())?;
                let last = r.table.last().map(|t| t.1).unwrap_or(f64::NAN);
                let param = format!("a={}", p.small_power_exponent);
                table.row([id.as_str(), "small_power", &param, &float(last), "", bool_str(r.passed)])?;
                let rows: Vec<Vec<f64>> = r.table.iter().map(|(u, v)| vec![*u, *v]).collect();
                out.files.push(write_tsv(&ctx.path("small_power.tsv"), &["log_x", "ratio"], &rows)?);
                out.checks.push(CheckOutcome::new("small_power", r.passed, format!("final ratio {last:.6e}")));
            }
        }
    }
    out.files.insert(0, table.finish()?);
    Ok(out)
}

pub(super) fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}
