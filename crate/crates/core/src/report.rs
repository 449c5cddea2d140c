//! Convergence bookkeeping shared by the ladder experiments: sup errors per
//! degree over a fixed grid, a reduction factor, and a pass/fail verdict.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::numkernel::{Error, Result};

/// Minimum degree growth (last/first) for the reduction criterion to apply.
pub const LADDER_SPAN_FOR_REDUCTION: f64 = 8.0;
/// Required drop of the sup error across a qualifying ladder.
pub const REDUCTION_THRESHOLD: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_ladder: Vec<u32>,
    /// Per-degree sup of the pointwise error over the grid.
    pub sup_errors: Vec<f64>,
    pub grid: String,
    pub reduction_factor: f64,
    pub verdict: bool,
    pub bits_used: usize,
}

impl ConvergenceReport {
    /// Assemble a report from a finished ladder run. The verdict requires
    /// strictly decreasing sup errors, and additionally a reduction of at
    /// least [`REDUCTION_THRESHOLD`] whenever the ladder spans at least an
    /// [`LADDER_SPAN_FOR_REDUCTION`]-fold degree increase.
    pub fn assemble(
        n_ladder: Vec<u32>,
        sup_errors: Vec<f64>,
        grid: String,
        bits_used: usize,
    ) -> Result<ConvergenceReport> {
        if n_ladder.is_empty() || n_ladder.len() != sup_errors.len() {
            return Err(Error::domain("ladder and error lists must match and be nonempty"));
        }
        let first = sup_errors[0];
        let last = *sup_errors.last().unwrap();
        let reduction_factor = if last > 0.0 { first / last } else { f64::INFINITY };
        let decreasing = sup_errors.windows(2).all(|w| w[1] < w[0]);
        let span = *n_ladder.last().unwrap() as f64 / n_ladder[0] as f64;
        let verdict = decreasing
            && (span < LADDER_SPAN_FOR_REDUCTION || reduction_factor >= REDUCTION_THRESHOLD);
        Ok(ConvergenceReport {
            n_ladder,
            sup_errors,
            grid,
            reduction_factor,
            verdict,
            bits_used,
        })
    }
}
