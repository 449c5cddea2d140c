//! One function per subcommand. Each builds its rows (in parallel when the
//! sweep is large — order is restored at collection, so output bytes do not
//! depend on the worker count), assembles the JSON report and returns the
//! overall verdict.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

use supershift_core::bernstein::{bernstein_eval, newton_form_eval, BernsteinParams};
use supershift_core::evolve::{
    free_limit, free_psi_n, harmonic_limit, harmonic_psi_n, EvolutionPoint, Potential,
};
use supershift_core::kantorovich::{make_target, two_limit_experiment, PASS_FINAL_ERROR};
use supershift_core::numkernel::{FunctionSpec, NumCtx};
use supershift_core::regions::{
    classify, lemniscate_value, wa_contains, AnalyticityDomain, LoopClass,
};
use supershift_core::report::{ConvergenceReport, REDUCTION_THRESHOLD};
use supershift_core::superosc::{distance, eval_closed};
use supershift_core::supershift::{
    convolve, multiply_by_identity, primitive, tcsp_check, DomainA,
};
use supershift_core::Error;

use crate::emit::{emit, envelope, fmt_float, fmt_hex, Table};
use crate::opts::{
    parse_complex, parse_eps_families, parse_float_list, parse_interval, parse_range,
    parse_single_family, parse_window, BernsteinArgs, EvolveArgs, KantorovichArgs,
    PotentialArg, RegionsCmd, SuperoscArgs, SupershiftCmd,
};
use crate::{CliError, RunCtx};

pub const NEWTON_RESIDUAL_GUARD_BITS: i32 = 16;

fn load_spec(path: &Path) -> Result<FunctionSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: FunctionSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad function spec {}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

fn ladder_verdicts(report: &ConvergenceReport) -> bool {
    report.verdict
}

#[derive(Serialize)]
struct FamilyLadder {
    family: String,
    report: ConvergenceReport,
}

pub fn superosc(rc: &RunCtx, args: &SuperoscArgs) -> Result<bool, CliError> {
    let xs = parse_range(&args.x)?;
    let families = parse_eps_families(&args.eps)?;
    if args.n.is_empty() {
        return Err(CliError::usage("--n requires at least one degree"));
    }
    let policy = rc.policy;
    let mut table = Table::new(vec![
        "family", "N", "x", "re_TN", "im_TN", "abs_err", "re_TN_hex", "im_TN_hex",
    ]);
    let mut ladders = Vec::new();
    let mut bits_used = 0usize;
    for family in &families {
        let mut sup_errors = Vec::new();
        for &n in &args.n {
            let eps_n = family.eps_at(n)?;
            let rows: Vec<Result<(f64, f64, f64, usize), Error>> = xs
                .par_iter()
                .map(|&x| {
                    let mut ctx = NumCtx::new();
                    let (v, p) = eval_closed(n, eps_n, args.a, (x, 0.0), &policy, &mut ctx)?;
                    let target = free_limit(args.a, 0.0, x, p, &mut ctx)?;
                    let (re, im) = v.to_f64_pair();
                    Ok((re, im, distance(&v, &target, p), p))
                })
                .collect();
            let mut sup = 0.0f64;
            for (x, row) in xs.iter().zip(rows) {
                let (re, im, err, p) = row?;
                sup = sup.max(err);
                bits_used = bits_used.max(p);
                table.rows.push(vec![
                    family.label().to_string(),
                    n.to_string(),
                    fmt_float(*x),
                    fmt_float(re),
                    fmt_float(im),
                    fmt_float(err),
                    fmt_hex(re),
                    fmt_hex(im),
                ]);
            }
            sup_errors.push(sup);
        }
        let report = ConvergenceReport::assemble(
            args.n.clone(),
            sup_errors,
            format!("{} x-samples in {}", xs.len(), args.x),
            bits_used,
        )?;
        ladders.push(FamilyLadder {
            family: family.label().to_string(),
            report,
        });
    }
    let verdict = ladders.iter().all(|l| ladder_verdicts(&l.report));
    #[derive(Serialize)]
    struct Report {
        a: f64,
        verdict: bool,
        ladders: Vec<FamilyLadder>,
    }
    emit(
        rc.format,
        rc.out,
        &envelope(
            rc.argv,
            bits_used,
            format!("strict decrease; reduction >= {REDUCTION_THRESHOLD} per 8x degree span"),
            Report {
                a: args.a,
                verdict,
                ladders,
            },
        ),
        Some(&table),
    )?;
    Ok(verdict)
}

pub fn bernstein(rc: &RunCtx, args: &BernsteinArgs) -> Result<bool, CliError> {
    let psi = load_spec(&args.psi)?;
    let bs = parse_range(&args.b)?;
    let family = parse_single_family(&args.eps)?;
    if args.n.is_empty() {
        return Err(CliError::usage("--n requires at least one degree"));
    }
    let policy = rc.policy;
    let mut table = Table::new(vec![
        "N",
        "b_re",
        "b_im",
        "value_re",
        "value_im",
        "newton_residual",
        "value_re_hex",
        "value_im_hex",
    ]);
    let mut bits_used = 0usize;
    let mut max_rel_residual = 0.0f64;
    let mut verdict = true;
    for &n in &args.n {
        let eps_n = family.eps_at(n)?;
        let rows: Vec<Result<(f64, f64, f64, f64, usize), Error>> = bs
            .par_iter()
            .map(|&b| {
                let mut ctx = NumCtx::new();
                let params = BernsteinParams::new(n, eps_n, args.bprime)?;
                let (v, p) = bernstein_eval(&psi, &params, (b, 0.0), &policy, &mut ctx)?;
                let (w, _) = newton_form_eval(&psi, &params, (b, 0.0), &policy, &mut ctx)?;
                let (re, im) = v.to_f64_pair();
                let residual = distance(&v, &w, p);
                let scale = v.abs_f64(p).max(1.0);
                Ok((re, im, residual, residual / scale, p))
            })
            .collect();
        for (b, row) in bs.iter().zip(rows) {
            let (re, im, residual, rel, p) = row?;
            bits_used = bits_used.max(p);
            max_rel_residual = max_rel_residual.max(rel);
            if rel > ((NEWTON_RESIDUAL_GUARD_BITS - p as i32) as f64).exp2() {
                verdict = false;
            }
            table.rows.push(vec![
                n.to_string(),
                fmt_float(*b),
                fmt_float(0.0),
                fmt_float(re),
                fmt_float(im),
                fmt_float(residual),
                fmt_hex(re),
                fmt_hex(im),
            ]);
        }
    }
    #[derive(Serialize)]
    struct Report {
        b_prime: f64,
        family: String,
        max_relative_newton_residual: f64,
        verdict: bool,
    }
    emit(
        rc.format,
        rc.out,
        &envelope(
            rc.argv,
            bits_used,
            format!("newton residual <= 2^({NEWTON_RESIDUAL_GUARD_BITS} - bits), relative"),
            Report {
                b_prime: args.bprime,
                family: family.label().to_string(),
                max_relative_newton_residual: max_rel_residual,
                verdict,
            },
        ),
        Some(&table),
    )?;
    Ok(verdict)
}

fn class_label(class: Option<LoopClass>) -> &'static str {
    match class {
        Some(LoopClass::LeftLoop) => "left",
        Some(LoopClass::RightLoop) => "right",
        Some(LoopClass::Outside) => "outside",
        Some(LoopClass::Boundary) => "boundary",
        None => "ambiguous",
    }
}

pub fn regions(rc: &RunCtx, cmd: &RegionsCmd) -> Result<bool, CliError> {
    match cmd {
        RegionsCmd::Lemniscate { c, grid, resolution } => {
            let (res, ims) = parse_window(grid)?;
            let points: Vec<(f64, f64)> = ims
                .iter()
                .flat_map(|&y| res.iter().map(move |&x| (x, y)))
                .collect();
            let rows: Vec<Result<(f64, &'static str), Error>> = points
                .par_iter()
                .map(|&z| {
                    let phi = lemniscate_value(*c, z)?;
                    let class = match classify(*c, z, *resolution) {
                        Ok(cl) => Some(cl),
                        Err(Error::Ambiguous(_)) => None,
                        Err(e) => return Err(e),
                    };
                    Ok((phi, class_label(class)))
                })
                .collect();
            let mut table = Table::new(vec!["re", "im", "phi", "class"]);
            let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
            for (z, row) in points.iter().zip(rows) {
                let (phi, label) = row?;
                *counts.entry(label).or_insert(0) += 1;
                table.rows.push(vec![
                    fmt_float(z.0),
                    fmt_float(z.1),
                    fmt_float(phi),
                    label.to_string(),
                ]);
            }
            #[derive(Serialize)]
            struct Report {
                c: f64,
                points: usize,
                class_counts: BTreeMap<&'static str, usize>,
            }
            emit(
                rc.format,
                rc.out,
                &envelope(
                    rc.argv,
                    0,
                    "classification sweep; no pass/fail threshold",
                    Report {
                        c: *c,
                        points: points.len(),
                        class_counts: counts,
                    },
                ),
                Some(&table),
            )?;
            Ok(true)
        }
        RegionsCmd::Wa { interval, z, resolution } => {
            let (lo, hi) = parse_interval(interval)?;
            let zz = parse_complex(z)?;
            let domain = AnalyticityDomain::new(lo, hi)?;
            let contains = wa_contains(&domain, zz, *resolution)?;
            #[derive(Serialize)]
            struct Report {
                interval: (f64, f64),
                z: (f64, f64),
                contains: bool,
            }
            emit(
                rc.format,
                rc.out,
                &envelope(
                    rc.argv,
                    0,
                    "membership query; no pass/fail threshold",
                    Report { interval: (lo, hi), z: zz, contains },
                ),
                None,
            )?;
            Ok(true)
        }
    }
}

pub fn kantorovich(rc: &RunCtx, args: &KantorovichArgs) -> Result<bool, CliError> {
    let g_minus = parse_float_list(&args.gminus)?;
    let g_plus = parse_float_list(&args.gplus)?;
    let z_minus = parse_complex(&args.zminus)?;
    let z_plus = parse_complex(&args.zplus)?;
    let family = parse_single_family(&args.eps)?;
    if args.n.is_empty() {
        return Err(CliError::usage("--n requires at least one degree"));
    }
    let target = make_target(&g_minus, &g_plus)?;
    let mut ctx = NumCtx::new();
    let report = two_limit_experiment(
        &target,
        z_minus,
        z_plus,
        args.bprime,
        &args.n,
        &family,
        &rc.policy,
        &mut ctx,
    )?;
    let verdict = report.verdict;
    let bits = report.minus.bits_used.max(report.plus.bits_used);
    emit(
        rc.format,
        rc.out,
        &envelope(
            rc.argv,
            bits,
            format!("both ladders strictly decreasing with final error <= {PASS_FINAL_ERROR}"),
            report,
        ),
        None,
    )?;
    Ok(verdict)
}

pub fn supershift(rc: &RunCtx, cmd: &SupershiftCmd) -> Result<bool, CliError> {
    match cmd {
        SupershiftCmd::Check { psi, interval, grid_step, n, eps } => {
            let spec = load_spec(psi)?;
            let (lo, hi) = parse_interval(interval)?;
            let families = parse_eps_families(eps)?;
            if n.is_empty() {
                return Err(CliError::usage("--n requires at least one degree"));
            }
            let dom = DomainA::new(lo, hi)?;
            let grid = dom.grid(*grid_step)?;
            let mut ctx = NumCtx::new();
            let report = tcsp_check(&spec, &dom, &grid, n, &families, &rc.policy, &mut ctx)?;
            let verdict = report.verdict;
            let bits = report.bits_used;
            let thresholds = report.thresholds.clone();
            emit(rc.format, rc.out, &envelope(rc.argv, bits, thresholds, report), None)?;
            Ok(verdict)
        }
        SupershiftCmd::Convolve { psi, interval, support, nodes } => {
            let spec = load_spec(psi)?;
            let (lo, hi) = parse_interval(interval)?;
            let dom = DomainA::new(lo, hi)?;
            let out_spec = convolve(&spec, &dom, *support, *nodes)?;
            emit_spec(rc, &out_spec)
        }
        SupershiftCmd::Primitive { psi, interval, a0 } => {
            let spec = load_spec(psi)?;
            let (lo, hi) = parse_interval(interval)?;
            let dom = DomainA::new(lo, hi)?;
            let out_spec = primitive(&spec, &dom, *a0)?;
            emit_spec(rc, &out_spec)
        }
        SupershiftCmd::Multiply { psi } => {
            let spec = load_spec(psi)?;
            let out_spec = multiply_by_identity(&spec);
            emit_spec(rc, &out_spec)
        }
    }
}

/// Derived specs are emitted bare (not enveloped) so they can be fed back
/// into `--psi` directly.
fn emit_spec(rc: &RunCtx, spec: &FunctionSpec) -> Result<bool, CliError> {
    let json = serde_json::to_string_pretty(spec)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?
        + "\n";
    match rc.out {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(true)
}

pub fn evolve(rc: &RunCtx, args: &EvolveArgs) -> Result<bool, CliError> {
    let ts = parse_range(&args.t)?;
    let xs = parse_range(&args.x)?;
    if args.n.is_empty() {
        return Err(CliError::usage("--n requires at least one degree"));
    }
    let potential = match args.potential {
        PotentialArg::Free => Potential::Free,
        PotentialArg::Harmonic => Potential::Harmonic,
    };
    let policy = rc.policy;
    let name = match potential {
        Potential::Free => "free",
        Potential::Harmonic => "harmonic",
    };
    let mut table = Table::new(vec![
        "potential",
        "N",
        "t",
        "x",
        "re",
        "im",
        "abs_err_vs_limit",
        "re_hex",
        "im_hex",
    ]);
    let mut sup_errors = Vec::new();
    let mut bits_used = 0usize;
    for &n in &args.n {
        let points: Vec<(f64, f64)> = ts
            .iter()
            .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
            .collect();
        let rows: Vec<Result<(f64, f64, f64, usize), Error>> = points
            .par_iter()
            .map(|&(t, x)| {
                let mut ctx = NumCtx::new();
                let pt = EvolutionPoint { t, x, a: args.a, n };
                let (v, p) = match potential {
                    Potential::Free => free_psi_n(&pt, &policy, &mut ctx)?,
                    Potential::Harmonic => harmonic_psi_n(&pt, &policy, &mut ctx)?,
                };
                let lim = match potential {
                    Potential::Free => free_limit(args.a, t, x, p, &mut ctx)?,
                    Potential::Harmonic => harmonic_limit(args.a, t, x, p, &mut ctx)?,
                };
                let (re, im) = v.to_f64_pair();
                Ok((re, im, distance(&v, &lim, p), p))
            })
            .collect();
        let mut sup = 0.0f64;
        for ((t, x), row) in points.iter().zip(rows) {
            let (re, im, err, p) = row?;
            sup = sup.max(err);
            bits_used = bits_used.max(p);
            table.rows.push(vec![
                name.to_string(),
                n.to_string(),
                fmt_float(*t),
                fmt_float(*x),
                fmt_float(re),
                fmt_float(im),
                fmt_float(err),
                fmt_hex(re),
                fmt_hex(im),
            ]);
        }
        sup_errors.push(sup);
    }
    let report = ConvergenceReport::assemble(
        args.n.clone(),
        sup_errors,
        format!("{name} potential, a={}, {} t x {} x samples", args.a, ts.len(), xs.len()),
        bits_used,
    )?;
    let verdict = report.verdict;
    emit(
        rc.format,
        rc.out,
        &envelope(
            rc.argv,
            bits_used,
            format!("strict decrease; reduction >= {REDUCTION_THRESHOLD} per 8x degree span"),
            report,
        ),
        Some(&table),
    )?;
    Ok(verdict)
}
