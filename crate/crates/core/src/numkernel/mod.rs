//! Adaptive-precision arithmetic contract: precision policies, exact
//! binomial coefficients, extended-precision complex values and pointwise
//! evaluation of [`FunctionSpec`] targets.
//!
//! Superoscillating sums cancel catastrophically (terms of size roughly
//! `((1+|a|)/2)^N` add up to `O(1)`), so every downstream module routes its
//! mantissa-width decisions through [`required_bits`] and performs the
//! cancellation-critical arithmetic on [`CVal`] at that width.

mod complex;
mod error;
mod funcspec;
mod precision;
pub mod quadrature;
mod real;

pub use complex::{cis, CVal};
pub use error::{Error, Result};
pub use funcspec::{eval_function, named_name, FunctionSpec, NamedFunction, Piece};
pub use precision::{check_bits, required_bits, PrecisionMode, PrecisionPolicy, BITS_CAP};
pub use real::{biguint_to_bigfloat, ensure_finite, rf, to_f64, NumCtx, RM};

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;

/// Exact binomial coefficient `C(n, k)` of arbitrary size.
///
/// Errors when `k > n`. No floating binomials are used anywhere in the
/// crate; exactness here removes one cancellation source from the sums.
pub fn binomial(n: u32, k: u32) -> Result<BigUint> {
    if k > n {
        return Err(Error::domain(alloc::format!(
            "binomial: k = {k} exceeds n = {n}"
        )));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for j in 0..k {
        // Exact at every step: the running product of j+1 consecutive
        // integers is divisible by (j+1)!.
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    Ok(acc)
}

/// A full Pascal row `C(n, 0..=n)` computed by the multiplicative recurrence.
pub fn binomial_row(n: u32) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for k in 0..n {
        let next = &row[k as usize] * BigUint::from(n - k) / BigUint::from(k + 1);
        row.push(next);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(5, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(binomial(5, 2).unwrap(), BigUint::from(10u32));
        assert!(binomial(3, 4).is_err());
    }

    #[test]
    fn binomial_row_matches_single() {
        let row = binomial_row(12);
        for k in 0..=12u32 {
            assert_eq!(row[k as usize], binomial(12, k).unwrap());
        }
    }
}
