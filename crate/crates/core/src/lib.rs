//! Numerical kernels for superoscillating sequences, perturbed Bernstein
//! operators, lemniscate convergence domains, supershift verification and
//! closed-form Schrodinger evolutions.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure and
//! deterministic for fixed inputs and precision, so values can be moved
//! freely across threads. IO, file formats and the command line front end
//! live in the companion `supershift-lab` crate.

#![no_std]

extern crate alloc;

pub mod bernstein;
pub mod evolve;
pub mod kantorovich;
pub mod numkernel;
pub mod regions;
pub mod report;
pub mod sampling;
pub mod superosc;
pub mod supershift;

pub use numkernel::{
    binomial, eval_function, required_bits, CVal, Error, FunctionSpec, NumCtx, PrecisionPolicy,
    Result,
};
pub use report::ConvergenceReport;
