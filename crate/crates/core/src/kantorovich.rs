//! Two-limit experiment: a continuous target glued from two polynomials at
//! 1/2 is fed to the shifted Bernstein operators at complex points inside
//! the two loops of the level curve; the approximants converge to the left
//! polynomial in the left loop and to the right polynomial in the right
//! loop, so no single analytic limit exists.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::bernstein::{bernstein_eval, BernsteinParams};
use crate::numkernel::{
    eval_function, CVal, Error, FunctionSpec, NumCtx, Piece, PrecisionPolicy, Result,
};
use crate::regions::{classify, LoopClass};
use crate::report::ConvergenceReport;
use crate::sampling::EpsilonSpec;
use crate::superosc::distance;

/// Half-width of the curve-parameter interval guarded by the experiment.
pub const DEFAULT_ETA: f64 = 0.05;
/// A ladder passes when its errors decrease strictly and end at or below
/// this threshold.
pub const PASS_FINAL_ERROR: f64 = 0.05;

const GLUE_TOL: f64 = 1e-12;

/// Continuous non-analytic target: polynomial `G^-` left of 1/2, `G^+` from
/// 1/2 on, equal values but different slopes at the glue point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTarget {
    pub g_minus: Vec<f64>,
    pub g_plus: Vec<f64>,
    /// The glued piecewise spec, switching piece at 1/2.
    pub glued: FunctionSpec,
}

fn poly_val_and_deriv(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for c in coeffs.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

/// Validated glued target. Mismatched values at 1/2 and equal one-sided
/// slopes are both rejected: the first breaks continuity, the second leaves
/// no non-analyticity point to exhibit.
pub fn make_target(g_minus: &[f64], g_plus: &[f64]) -> Result<PiecewiseTarget> {
    if g_minus.is_empty() || g_plus.is_empty() {
        return Err(Error::domain("both polynomials need at least one coefficient"));
    }
    let (vm, dm) = poly_val_and_deriv(g_minus, 0.5);
    let (vp, dp) = poly_val_and_deriv(g_plus, 0.5);
    if (vm - vp).abs() > GLUE_TOL {
        return Err(Error::Glue { left: vm, right: vp });
    }
    if (dm - dp).abs() <= GLUE_TOL {
        return Err(Error::Degenerate);
    }
    let piece = |coeffs: &[f64], end: Option<f64>| Piece {
        end,
        coeffs: coeffs.iter().map(|c| (*c, 0.0)).collect(),
    };
    let glued = FunctionSpec::PiecewisePoly {
        pieces: alloc::vec![piece(g_minus, Some(0.5)), piece(g_plus, None)],
    };
    glued.validate()?;
    Ok(PiecewiseTarget {
        g_minus: g_minus.to_vec(),
        g_plus: g_plus.to_vec(),
        glued,
    })
}

impl PiecewiseTarget {
    pub fn minus_spec(&self) -> FunctionSpec {
        FunctionSpec::poly(&self.g_minus)
    }

    pub fn plus_spec(&self) -> FunctionSpec {
        FunctionSpec::poly(&self.g_plus)
    }
}

/// Paired ladder reports for the two test points; the joint verdict demands
/// strict decrease and a final error at most [`PASS_FINAL_ERROR`] on both
/// sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLimitReport {
    pub minus: ConvergenceReport,
    pub plus: ConvergenceReport,
    pub verdict: bool,
}

fn guarded_classify(z: (f64, f64), want: LoopClass, label: &str) -> Result<()> {
    for c in [0.5 - DEFAULT_ETA, 0.5, 0.5 + DEFAULT_ETA] {
        let got = classify(c, z, 64)?;
        if got != want {
            return Err(Error::domain(format!(
                "{label} point ({}, {}) classifies as {got:?} at c={c}, need {want:?}",
                z.0, z.1
            )));
        }
    }
    Ok(())
}

fn ladder_report(
    target: &PiecewiseTarget,
    limit: &FunctionSpec,
    z: (f64, f64),
    b_prime: f64,
    n_ladder: &[u32],
    eps: &EpsilonSpec,
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<ConvergenceReport> {
    let mut sup_errors = Vec::with_capacity(n_ladder.len());
    let mut bits_used = 0usize;
    // The error decays like Phi(z)^N, so the working width must grow with N
    // or the ladder bottoms out on the rounding floor and stops decreasing.
    let mut q: f64 = 0.0;
    for c in [0.5 - DEFAULT_ETA, 0.5, 0.5 + DEFAULT_ETA] {
        q = q.max(crate::regions::lemniscate_value(c, z)?);
    }
    let decay = (-libm::log2(q.clamp(1e-3, 0.99))).max(0.0);
    for &n in n_ladder {
        let widened = match policy.mode {
            crate::numkernel::PrecisionMode::Fixed => *policy,
            crate::numkernel::PrecisionMode::Automatic => PrecisionPolicy {
                guard_bits: policy.guard_bits + libm::ceil(n as f64 * decay) as usize + 64,
                ..*policy
            },
        };
        let params = BernsteinParams::new(n, eps.eps_at(n)?, b_prime)?;
        let (approx, p) = bernstein_eval(&target.glued, &params, z, &widened, ctx)?;
        bits_used = bits_used.max(p);
        let shifted = CVal::from_f64(z.0 + b_prime, z.1, p);
        let lim = eval_function(ctx, limit, &shifted, p)?;
        sup_errors.push(distance(&approx, &lim, p));
    }
    let decreasing = sup_errors.windows(2).all(|w| w[1] < w[0]);
    let passed = decreasing && *sup_errors.last().unwrap() <= PASS_FINAL_ERROR;
    let mut report = ConvergenceReport::assemble(
        n_ladder.to_vec(),
        sup_errors,
        format!("single point ({}, {}), shift {b_prime}", z.0, z.1),
        bits_used,
    )?;
    report.verdict = passed;
    Ok(report)
}

/// Runs the experiment at one point per loop: the left-loop approximants are
/// compared against the left polynomial, the right-loop ones against the
/// right polynomial, each evaluated at `z + b_prime`.
#[allow(clippy::too_many_arguments)]
pub fn two_limit_experiment(
    target: &PiecewiseTarget,
    z_minus: (f64, f64),
    z_plus: (f64, f64),
    b_prime: f64,
    n_ladder: &[u32],
    eps: &EpsilonSpec,
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<TwoLimitReport> {
    if n_ladder.is_empty() {
        return Err(Error::domain("ladder must be nonempty"));
    }
    if b_prime.abs() > DEFAULT_ETA {
        return Err(Error::domain(format!(
            "shift {b_prime} exceeds the guarded band [-{DEFAULT_ETA}, {DEFAULT_ETA}]"
        )));
    }
    guarded_classify(z_minus, LoopClass::LeftLoop, "left")?;
    guarded_classify(z_plus, LoopClass::RightLoop, "right")?;
    let minus = ladder_report(
        target,
        &target.minus_spec(),
        z_minus,
        b_prime,
        n_ladder,
        eps,
        policy,
        ctx,
    )?;
    let plus = ladder_report(
        target,
        &target.plus_spec(),
        z_plus,
        b_prime,
        n_ladder,
        eps,
        policy,
        ctx,
    )?;
    let verdict = minus.verdict && plus.verdict;
    Ok(TwoLimitReport { minus, plus, verdict })
}

/// Human-readable label of the target for reports.
pub fn target_label(t: &PiecewiseTarget) -> String {
    format!("left {:?} / right {:?} glued at 1/2", t.g_minus, t.g_plus)
}
