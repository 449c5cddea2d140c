use super::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard cap on mantissa width; asking for more is a precision overflow.
pub const BITS_CAP: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    Automatic,
    Fixed,
}

/// Rule mapping a computation's cancellation budget to a working mantissa
/// width.
///
/// In automatic mode a sum whose terms exceed its result by
/// `log2_term_scale` bits per summand index is given
/// `ceil(N * log2_term_scale) + guard_bits` bits, floored at 53.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub mode: PrecisionMode,
    pub fixed_bits: usize,
    pub guard_bits: usize,
}

impl PrecisionPolicy {
    pub fn automatic() -> Self {
        PrecisionPolicy {
            mode: PrecisionMode::Automatic,
            fixed_bits: 256,
            guard_bits: 64,
        }
    }

    pub fn fixed(bits: usize) -> Result<Self> {
        let p = PrecisionPolicy {
            mode: PrecisionMode::Fixed,
            fixed_bits: bits,
            guard_bits: 64,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fixed_bits < 53 {
            return Err(Error::domain("fixed_bits must be at least 53"));
        }
        if self.guard_bits < 32 {
            return Err(Error::domain("guard_bits must be at least 32"));
        }
        Ok(())
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy::automatic()
    }
}

/// Mantissa width for a length-`n` computation with the given per-index
/// cancellation budget (in bits).
///
/// Monotone nondecreasing in both `n` and `log2_term_scale`.
pub fn required_bits(n: u32, log2_term_scale: f64, policy: &PrecisionPolicy) -> usize {
    debug_assert!(n >= 1);
    match policy.mode {
        PrecisionMode::Fixed => policy.fixed_bits,
        PrecisionMode::Automatic => {
            let budget = libm::ceil(n as f64 * log2_term_scale.max(0.0)) as usize;
            (budget + policy.guard_bits).max(53)
        }
    }
}

/// Errors out with the deficit when the requested width exceeds [`BITS_CAP`].
pub fn check_bits(bits: usize) -> Result<usize> {
    if bits > BITS_CAP {
        Err(Error::PrecisionOverflow {
            required: bits,
            cap: BITS_CAP,
        })
    } else {
        Ok(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automatic_examples() {
        let p = PrecisionPolicy::automatic();
        let b = required_bits(100, libm::log2(1.5), &p);
        assert_eq!(b, 123);
        assert_eq!(required_bits(1, 0.0, &p), 64);
    }

    #[test]
    fn fixed_passthrough() {
        let p = PrecisionPolicy::fixed(256).unwrap();
        assert_eq!(required_bits(1000, 10.0, &p), 256);
        assert!(PrecisionPolicy::fixed(52).is_err());
    }

    #[test]
    fn monotone() {
        let p = PrecisionPolicy::automatic();
        let mut last = 0;
        for n in [1u32, 2, 4, 8, 64, 500] {
            let b = required_bits(n, 0.7, &p);
            assert!(b >= last);
            last = b;
        }
        let mut last = 0;
        for s in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let b = required_bits(32, s, &p);
            assert!(b >= last);
            last = b;
        }
    }
}
