//! Perturbed equispaced frequency grids and the affine change of variables
//! between the frequency interval `[-1, 1]` and the unit interval.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::numkernel::{Error, Result};

/// Highest allowed perturbation; generated values are clamped below one so
/// the grid never degenerates.
pub const EPS_CLAMP: f64 = 0.999;

/// A family of per-degree grid perturbations `eps_N`, each in `[0, 1)` and
/// tending to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EpsilonSpec {
    Zero,
    COverN { c: f64 },
    COverSqrtN { c: f64 },
    COverLogN { c: f64 },
    List { values: Vec<f64> },
}

impl EpsilonSpec {
    fn constant(&self) -> Option<f64> {
        match self {
            EpsilonSpec::Zero | EpsilonSpec::List { .. } => None,
            EpsilonSpec::COverN { c }
            | EpsilonSpec::COverSqrtN { c }
            | EpsilonSpec::COverLogN { c } => Some(*c),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.constant() {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::domain("family constant must be a nonnegative real"));
            }
        }
        if let EpsilonSpec::List { values } = self {
            for v in values {
                if !(*v >= 0.0 && *v < 1.0) {
                    return Err(Error::domain("explicit perturbations must lie in [0, 1)"));
                }
            }
        }
        Ok(())
    }

    /// Perturbation for a single degree `n >= 1`, clamped into `[0, 0.999]`.
    pub fn eps_at(&self, n: u32) -> Result<f64> {
        self.validate()?;
        if n == 0 {
            return Err(Error::domain("degree must be at least 1"));
        }
        let raw = match self {
            EpsilonSpec::Zero => 0.0,
            EpsilonSpec::COverN { c } => c / n as f64,
            EpsilonSpec::COverSqrtN { c } => c / libm::sqrt(n as f64),
            // The logarithm vanishes at n = 1; the clamp absorbs the blowup.
            EpsilonSpec::COverLogN { c } => c / libm::log(n as f64),
            EpsilonSpec::List { values } => *values
                .get(n as usize - 1)
                .ok_or_else(|| Error::domain("explicit list shorter than requested degree"))?,
        };
        Ok(raw.clamp(0.0, EPS_CLAMP))
    }
}

/// Perturbations for degrees `1..=n_max`.
pub fn make_epsilons(spec: &EpsilonSpec, n_max: u32) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    (1..=n_max).map(|n| spec.eps_at(n)).collect()
}

/// The degree-`N` frequency grid `h_nu = 1 - 2(nu + eps_N(N - nu))/N`,
/// equispaced with gap `2(1 - eps_N)/N`, running from `1 - 2 eps_N` down to
/// exactly `-1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub n: u32,
    pub eps_n: f64,
    pub h: Vec<f64>,
}

pub fn frequencies(n: u32, eps_n: f64) -> Result<FrequencyRow> {
    if n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    if !(eps_n >= 0.0 && eps_n < 1.0) {
        return Err(Error::domain("perturbation must lie in [0, 1)"));
    }
    let h = (0..=n)
        .map(|nu| {
            let nu = nu as f64;
            let nf = n as f64;
            1.0 - 2.0 * (nu + eps_n * (nf - nu)) / nf
        })
        .collect();
    Ok(FrequencyRow { n, eps_n, h })
}

/// Affine identification of `[0, 1]` with `[-1, 1]`.
pub fn upsilon(a: f64) -> f64 {
    2.0 * a - 1.0
}

pub fn upsilon_inv(b: f64) -> f64 {
    (1.0 + b) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn family_formulas() {
        assert_eq!(
            make_epsilons(&EpsilonSpec::Zero, 3).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        let e = make_epsilons(&EpsilonSpec::COverN { c: 1.0 }, 4).unwrap();
        assert_eq!(e[3], 0.25);
        let e = make_epsilons(&EpsilonSpec::COverSqrtN { c: 1.0 }, 1).unwrap();
        assert_eq!(e[0], EPS_CLAMP);
        assert!(EpsilonSpec::COverN { c: -0.5 }.eps_at(3).is_err());
    }

    #[test]
    fn families_decay() {
        for spec in [
            EpsilonSpec::COverN { c: 2.0 },
            EpsilonSpec::COverSqrtN { c: 2.0 },
            EpsilonSpec::COverLogN { c: 0.1 },
        ] {
            let e = make_epsilons(&spec, 100_000).unwrap();
            for w in e[2..].windows(2) {
                assert!(w[1] <= w[0]);
            }
            assert!(e.last().unwrap() < &0.01);
        }
    }

    #[test]
    fn frequency_rows() {
        assert_eq!(frequencies(2, 0.0).unwrap().h, vec![1.0, 0.0, -1.0]);
        assert_eq!(frequencies(2, 0.5).unwrap().h, vec![0.0, -0.5, -1.0]);
        assert_eq!(frequencies(1, 0.0).unwrap().h, vec![1.0, -1.0]);
    }

    #[test]
    fn row_invariants() {
        for (n, eps) in [(1u32, 0.0), (7, 0.3), (40, 0.05), (200, 0.001)] {
            let row = frequencies(n, eps).unwrap();
            assert_eq!(row.h.len() as u32, n + 1);
            assert_eq!(*row.h.last().unwrap(), -1.0);
            let gap = 2.0 * (1.0 - eps) / n as f64;
            for w in row.h.windows(2) {
                assert!((w[0] - w[1] - gap).abs() < 1e-14);
                assert!(w[0] > w[1]);
            }
            for v in &row.h {
                assert!((-1.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn upsilon_pair() {
        assert_eq!(upsilon(0.0), -1.0);
        assert_eq!(upsilon(1.0), 1.0);
        assert_eq!(upsilon(0.5), 0.0);
        assert_eq!(upsilon_inv(upsilon(0.37)), 0.37);
    }
}
