use modcomp_core::operators::{
    describe_probe, norm_ratio_probe, norm_ratio_probe_tensor, shifted_gaussian_family, tensor_gaussian_family,
    CompositionMap, KnQuadrature, ProbeOperator, ProbeSettings, RatioProbe,
};
use modcomp_core::signal::AnalyticSignal;
use modcomp_core::symbol::{Coupling, PerturbationMap};

use super::{Context, Produced};
use crate::config::{MapSpec, NormProbeParams, OperatorSpec};
use crate::error::RunError;
use crate::report::{float, CheckOutcome, Table};

pub(super) fn run(p: &NormProbeParams, ctx: &Context<'_>) -> Result<Produced, RunError> {
    let settings = ProbeSettings {
        window: AnalyticSignal::normalized_gaussian(p.window_width),
        grid: p.grid.build("norm_probe.grid")?,
        p: p.p,
        cap: p.cap,
        slope_max: p.slope_max,
    };
    let base = AnalyticSignal::normalized_gaussian(p.family.width);
    let target = p.target.build();
    let sources: Vec<(Option<f64>, _)> = match &p.k_candidates {
        Some(ks) => {
            let mut ks = ks.clone();
            ks.sort_by(f64::total_cmp);
            ks.into_iter()
                .map(|k| {
                    let spec = p.source.with_k(k).ok_or_else(|| RunError::config("norm_probe.k_candidates: source must be a loss weight"))?;
                    Ok((Some(k), spec.build()))
                })
                .collect::<Result<_, RunError>>()?
        }
        None => vec![(None, p.source.build())],
    };

    let probes: Vec<(Option<f64>, RatioProbe)> = match p.dimension {
        1 => {
            let op = match p.operator {
                OperatorSpec::Identity => ProbeOperator::Identity,
                OperatorSpec::Compose => ProbeOperator::Compose(p.map.composition()?),
                OperatorSpec::KohnNirenberg => ProbeOperator::KohnNirenberg(p.map.composition()?, KnQuadrature::default()),
            };
            let family = shifted_gaussian_family(&base, p.family.extent, p.family.points);
            sources
                .iter()
                .map(|(k, src)| Ok((*k, norm_ratio_probe(&op, &family, src, &target, &settings)?)))
                .collect::<Result<_, RunError>>()?
        }
        2 => {
            if p.operator != OperatorSpec::Compose {
                return Err(RunError::config("norm_probe.operator: dimension 2 supports compose only"));
            }
            let psi = tensor_map(&p.map)?;
            let family = tensor_gaussian_family(&base, p.family.extent, p.family.points);
            sources
                .iter()
                .map(|(k, src)| Ok((*k, norm_ratio_probe_tensor(&psi, &family, src, &target, &settings)?)))
                .collect::<Result<_, RunError>>()?
        }
        d => return Err(RunError::config(format!("norm_probe.dimension: {d} is not 1 or 2"))),
    };

    let mut out = Produced::default();
    let header = ["k", "family_param_a", "family_param_beta", "ratio", "source_norm", "target_norm", "flags"];
    let mut table = Table::create(ctx.path("ratios.csv"), &header)?;
    let summary_header = ["k", "max", "median", "cap_ratio", "slope", "slope_stderr", "flagged_rows", "bounded"];
    let mut summary = Table::create(ctx.path("summary.csv"), &summary_header)?;
    for (k, probe) in &probes {
        let k = k.map(|k| k.to_string()).unwrap_or_default();
        for row in &probe.rows {
            table.row([
                k.as_str(),
                &float(row.a),
                &float(row.beta),
                &float(row.ratio),
                &float(row.source.norm),
                &float(row.target.norm),
                &row_flags(probe, row.ratio, row.flagged),
            ])?;
        }
        summary.row([
            k.as_str(),
            &float(probe.max),
            &float(probe.median),
            &float(probe.cap_ratio),
            &float(probe.slope),
            &float(probe.slope_stderr),
            &probe.flagged_rows().to_string(),
            if accepted(probe) { "true" } else { "false" },
        ])?;
    }
    out.files.push(table.finish()?);
    out.files.push(summary.finish()?);

    match &p.k_candidates {
        Some(_) => {
            let smallest = probes.iter().find(|(_, pr)| accepted(pr));
            let detail = match smallest {
                Some((k, pr)) => format!("smallest bounded k = {}, {}", k.unwrap_or(0.0), describe_probe(pr)),
                None => {
                    let parts: Vec<String> = probes
                        .iter()
                        .map(|(k, pr)| {
                            let k = k.unwrap_or(0.0);
                            format!("k={k}: cap {:.3}, slope {:.4}, flagged {}", pr.cap_ratio, pr.slope, pr.flagged_rows())
                        })
                        .collect();
                    format!("no bounded k; {}", parts.join("; "))
                }
            };
            out.checks.push(CheckOutcome::new("k sweep", smallest.is_some(), detail));
        }
        None => {
            let probe = &probes[0].1;
            out.checks.push(CheckOutcome::new("bounded", accepted(probe), describe_probe(probe)));
        }
    }
    Ok(out)
}

/// Bounded with every norm free of truncation warnings.
fn accepted(probe: &RatioProbe) -> bool {
    probe.bounded() && probe.flagged_rows() == 0
}

/// `tail` when a norm's truncation warning fired, `over_cap` when the ratio
/// exceeds cap times the median.
fn row_flags(probe: &RatioProbe, ratio: f64, tail: bool) -> String {
    let mut flags = Vec::new();
    if tail {
        flags.push("tail");
    }
    if ratio.is_nan() || ratio > probe.cap * probe.median {
        flags.push("over_cap");
    }
    flags.join("|")
}

/// The map acting separately on both coordinates.
fn tensor_map(map: &MapSpec) -> Result<CompositionMap, RunError> {
    let one = map.composition()?;
    let phi = &one.perturbation;
    let perturbation = PerturbationMap::new(
        vec![phi.components[0]; 2],
        Coupling::Tensor,
        phi.growth_exponent,
        phi.growth_constant,
        phi.class,
    )?;
    Ok(CompositionMap::new(vec![1.0, 0.0, 0.0, 1.0], vec![one.shift[0]; 2], perturbation)?)
}
