use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::BigUint;

use super::error::{Error, Result};

/// Rounding mode used throughout; results are then bitwise independent of
/// evaluation order at fixed precision.
pub const RM: RoundingMode = RoundingMode::ToEven;

/// Per-thread numeric context: the transcendental-constants cache plus a
/// cache of bump-function quadrature data keyed by (support, nodes, bits).
///
/// Contexts are cheap to create; concurrent sweeps give one to each worker.
pub struct NumCtx {
    pub cc: Consts,
    pub(crate) bump_cache: BTreeMap<(u64, u32, u64, u64, usize), Vec<BigFloat>>,
}

impl NumCtx {
    pub fn new() -> Self {
        NumCtx {
            cc: Consts::new().expect("constants cache allocation"),
            bump_cache: BTreeMap::new(),
        }
    }
}

impl Default for NumCtx {
    fn default() -> Self {
        Self::new()
    }
}

/// f64 to `BigFloat` at `p` bits (always exact: f64 has 53 mantissa bits).
pub fn rf(v: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(v, p)
}

/// Round-toward-zero conversion back to f64 using the top two mantissa words.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite number has raw parts");
    // Mantissa words are little-endian; the value is 0.m * 2^e.
    let mut frac = 0.0f64;
    for (i, w) in words.iter().rev().take(2).enumerate() {
        frac += (*w as f64) * libm::exp2(-(WORD_BIT_SIZE as f64) * (i as f64 + 1.0));
    }
    let v = frac * libm::exp2(e as f64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Exact conversion of an arbitrary-size nonnegative integer, provided `p`
/// covers its bit length.
pub fn biguint_to_bigfloat(u: &BigUint, p: usize) -> BigFloat {
    let digits = u.to_u64_digits();
    let mut acc = BigFloat::from_f64(0.0, p);
    let shift = BigFloat::from_u64(1u64 << 32, p);
    // Horner over 64-bit digits, most significant first; every step is exact
    // at width p >= bits(u).
    for d in digits.iter().rev() {
        acc = acc.mul(&shift, p, RM).mul(&shift, p, RM);
        acc = acc.add(&BigFloat::from_u64(*d, p), p, RM);
    }
    acc
}

/// Returns an error if `x` is NaN or infinite.
pub fn ensure_finite(x: &BigFloat, what: &str) -> Result<()> {
    if x.is_nan() || x.is_inf() {
        Err(Error::non_finite(alloc::format!("{what}")))
    } else {
        Ok(())
    }
}
