//! Randomized structural invariants: exact identities that must hold for
//! every admissible input, independent of any convergence behavior.

use proptest::prelude::*;
use supershift_core::numkernel::{binomial_row, biguint_to_bigfloat, rf, to_f64, CVal, RM};
use supershift_core::regions::{classify, lemniscate_value, LoopClass};
use supershift_core::sampling::{frequencies, upsilon, upsilon_inv};
use supershift_core::superosc::coeff;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(1000))]

    /// The binomial-weight coefficients sum to one for every frequency.
    #[test]
    fn coefficient_sum_is_one(n in 1u32..64, a in -4.0f64..4.0) {
        let p = 96 + 3 * n as usize;
        let mut sum = rf(0.0, p);
        for nu in 0..=n {
            sum = sum.add(&coeff(n, nu, a, p).unwrap(), p, RM);
        }
        let err = (to_f64(&sum) - 1.0).abs();
        prop_assert!(err < 1e-20, "sum deviates by {err:e}");
    }

    /// Bernstein weights partition unity at arbitrary complex arguments.
    #[test]
    fn partition_of_unity(n in 1u32..48, bre in -2.0f64..2.0, bim in -2.0f64..2.0) {
        let p = 96 + 2 * n as usize;
        let b = CVal::from_f64(bre, bim, p);
        let mb = CVal::one(p).sub(&b, p);
        let binoms = binomial_row(n);
        let mut acc = CVal::zero(p);
        for nu in 0..=n as usize {
            let w = b
                .powi(nu as u32, p)
                .mul(&mb.powi((n as usize - nu) as u32, p), p)
                .mul_real(&biguint_to_bigfloat(&binoms[nu], p), p);
            acc = acc.add(&w, p);
        }
        let err = acc.sub(&CVal::one(p), p).abs_f64(p);
        prop_assert!(err < 1e-18, "partition deviates by {err:e}");
    }

    /// Frequency rows start at 1 - 2*eps, end at -1 and are equispaced.
    #[test]
    fn frequency_row_shape(n in 1u32..512, eps in 0.0f64..0.999) {
        let row = frequencies(n, eps).unwrap();
        prop_assert_eq!(row.h.len(), n as usize + 1);
        prop_assert!((row.h[0] - (1.0 - 2.0 * eps)).abs() < 1e-12);
        prop_assert!((row.h[n as usize] + 1.0).abs() < 1e-12);
        let gap = 2.0 * (1.0 - eps) / n as f64;
        for w in row.h.windows(2) {
            prop_assert!((w[0] - w[1] - gap).abs() < 1e-12);
        }
    }

    /// The level-curve value is symmetric under (c, z) -> (1-c, 1-z).
    #[test]
    fn lemniscate_symmetry(
        c in 0.05f64..0.95,
        x in -2.0f64..3.0,
        y in -2.0f64..2.0,
    ) {
        let phi = lemniscate_value(c, (x, y)).unwrap();
        let mirrored = lemniscate_value(1.0 - c, (1.0 - x, -y)).unwrap();
        prop_assert!((phi - mirrored).abs() <= 1e-12 * phi.max(1.0));
    }

    /// The curve centers always classify trivially: 0 left, 1 right,
    /// far points outside.
    #[test]
    fn trivial_classifications(c in 0.2f64..0.8, angle in 0.0f64..6.28) {
        prop_assert_eq!(classify(c, (0.0, 0.0), 32).unwrap(), LoopClass::LeftLoop);
        prop_assert_eq!(classify(c, (1.0, 0.0), 32).unwrap(), LoopClass::RightLoop);
        let far = (0.5 + 6.0 * libm::cos(angle), 6.0 * libm::sin(angle));
        prop_assert_eq!(classify(c, far, 32).unwrap(), LoopClass::Outside);
    }

    /// The interval identification is an exact involution pair.
    #[test]
    fn upsilon_roundtrip(x in -8.0f64..8.0) {
        prop_assert_eq!(upsilon_inv(upsilon(upsilon_inv(x))), upsilon_inv(x));
        let b = upsilon_inv(x);
        prop_assert!((upsilon(b) - x).abs() < 1e-12);
    }
}
