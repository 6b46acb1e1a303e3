use modcomp_core::signal::AnalyticSignal;
use modcomp_core::symbol::{decay_stability, symbol_stft_4d, DecayMode, DecayProbe, SymbolGrid};

use super::weights::bool_str;
use super::{Context, Produced};
use crate::config::{parse_weight, SymbolDecayParams};
use crate::dump::Dump;
use crate::error::RunError;
use crate::report::{float, write_tsv, CheckOutcome, Table};

pub(super) fn run(p: &SymbolDecayParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let phi = p.map.perturbation(p.declared_b)?;
    let b = phi.growth_exponent;
    let g = AnalyticSignal::normalized_gaussian(p.window_width);
    let grid = SymbolGrid::new(
        p.grid.z1.grid("symbol_decay.grid.z1")?,
        p.grid.z2.grid("symbol_decay.grid.z2")?,
        p.grid.patch.fft_grid("symbol_decay.grid.patch")?,
    )
    .map_err(|e| RunError::config(format!("symbol_decay.grid: {e}")))?;

    let mut probes: Vec<DecayProbe> = p
        .poly_orders
        .iter()
        .map(|&n| DecayProbe::Poly { n: n as f64, mode: p.poly_mode.into(), b })
        .collect();
    let mut ks = Vec::new();
    if let Some(exp) = &p.exp {
        let omega = parse_weight(&exp.weight, "symbol_decay.exp.weight")?;
        ks = exp.k_candidates.clone();
        ks.sort_by(f64::total_cmp);
        let mode: DecayMode = exp.mode.into();
        probes.extend(ks.iter().map(|&k| DecayProbe::Exp { omega, n: exp.order as f64, k, mode, b }));
    }
    let reports = decay_stability(&phi, &g, &grid, &probes)?;

    let mut out = Produced::default();
    let header = ["phi_id", "mode", "N", "k", "sup_ratio", "doubled", "stability", "stable"];
    let mut table = Table::create(ctx.path("decay.csv"), &header)?;
    let id = p.map.to_string();
    let mut plot = Vec::with_capacity(probes.len());
    for (probe, r) in probes.iter().zip(&reports) {
        let k = probe.k().map(|k| k.to_string()).unwrap_or_default();
        table.row([
            id.as_str(),
            &probe.mode().to_string(),
            &probe.order().to_string(),
            &k,
            &float(r.base),
            &float(r.doubled),
            &float(r.relative_change),
            bool_str(r.stable),
        ])?;
        plot.push(vec![probe.order(), probe.k().unwrap_or(f64::NAN), r.base, r.doubled]);
    }
    out.files.push(table.finish()?);
    out.files.push(write_tsv(&ctx.path("decay.tsv"), &["N", "k", "sup_base", "sup_doubled"], &plot)?);

    let n_poly = p.poly_orders.len();
    for (n, r) in p.poly_orders.iter().zip(&reports[..n_poly]) {
        let detail = format!("sup {:.6e}, change {:+.3}%", r.base, 100.0 * r.relative_change);
        out.checks.push(CheckOutcome::new(format!("poly N={n}"), r.stable, detail));
    }
    if !ks.is_empty() {
        let smallest = ks.iter().zip(&reports[n_poly..]).find(|(_, r)| r.stable);
        let detail = match smallest {
            Some((k, r)) => format!("smallest stable k = {k}, sup {:.6e}", r.base),
            None => "no candidate k is stable".to_string(),
        };
        out.checks.push(CheckOutcome::new("exp smallest k", smallest.is_some(), detail));
    }
    if p.dump {
        let v = symbol_stft_4d(&phi, &g, &grid, ctx.budget)?;
        let path = ctx.path("symbol.bin");
        Dump::from_symbol_stft(&v).write(&path)?;
        out.files.push(path);
    }
    Ok(out)
}
