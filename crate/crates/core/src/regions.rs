//! Geometry of the convergence domains: the two-looped level curve
//! `(|z|/c)^c (|1-z|/(1-c))^(1-c) = 1` with loop classification, the worst
//! contraction constant over compact subsets, and the disk-union analyticity
//! domain attached to an open interval of length greater than two.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::numkernel::{Error, Result};

/// Classification tolerance around the level curve.
pub const BOUNDARY_TOL: f64 = 9.5367431640625e-7; // 2^-20

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopClass {
    LeftLoop,
    RightLoop,
    Outside,
    Boundary,
}

/// Parameters of one loop experiment: curve parameter `c`, half-width `eta`
/// of the parameter interval for intersection regions, and the segment
/// sampling resolution used by [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopRegion {
    pub c: f64,
    pub eta: f64,
    pub resolution: u32,
}

impl LoopRegion {
    pub fn new(c: f64, eta: f64, resolution: u32) -> Result<Self> {
        let r = LoopRegion { c, eta, resolution };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::domain("curve parameter must lie in (0, 1)"));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::domain("eta must be nonnegative"));
        }
        if self.c - self.eta <= 0.0 || self.c + self.eta >= 1.0 {
            return Err(Error::domain("parameter interval must stay inside (0, 1)"));
        }
        if self.resolution < 16 {
            return Err(Error::domain("resolution must be at least 16"));
        }
        Ok(())
    }

    /// The sampled parameter interval `[c - eta, c + eta]`.
    pub fn c_range(&self, samples: u32) -> Vec<f64> {
        if self.eta == 0.0 || samples <= 1 {
            return alloc::vec![self.c];
        }
        (0..samples)
            .map(|i| self.c - self.eta + 2.0 * self.eta * i as f64 / (samples - 1) as f64)
            .collect()
    }
}

/// Level function `Phi_c(z) = (|z|/c)^c (|1-z|/(1-c))^(1-c)`: equal to one
/// on the curve, below one strictly inside either loop.
pub fn lemniscate_value(c: f64, z: (f64, f64)) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain("curve parameter must lie in (0, 1)"));
    }
    let r0 = libm::hypot(z.0, z.1);
    let r1 = libm::hypot(1.0 - z.0, -z.1);
    if r0 == 0.0 || r1 == 0.0 {
        return Ok(0.0);
    }
    Ok(libm::exp(
        c * libm::log(r0 / c) + (1.0 - c) * libm::log(r1 / (1.0 - c)),
    ))
}

/// Loop membership by segment sampling: a sub-level point belongs to the
/// left loop when the straight segment to 0 stays below the level, to the
/// right loop when the segment to 1 does. Both or neither succeeding at the
/// given resolution is reported as ambiguous rather than guessed.
pub fn classify(c: f64, z: (f64, f64), resolution: u32) -> Result<LoopClass> {
    if resolution < 16 {
        return Err(Error::domain("resolution must be at least 16"));
    }
    let phi = lemniscate_value(c, z)?;
    if (phi - 1.0).abs() <= BOUNDARY_TOL {
        return Ok(LoopClass::Boundary);
    }
    if phi > 1.0 {
        return Ok(LoopClass::Outside);
    }
    // Estimated sup of the level along the segment: coarse argmax followed
    // by bracket refinement. Pure strict sampling would miss the touching
    // point of the two loops (a single-point violation on the segment).
    let below = |target: (f64, f64)| -> Result<bool> {
        let at = |t: f64| {
            lemniscate_value(c, (z.0 + t * (target.0 - z.0), z.1 + t * (target.1 - z.1)))
        };
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut sup = 0.0f64;
        for _ in 0..4 {
            let mut best = lo;
            let mut best_v = at(lo)?;
            for i in 1..=resolution {
                let t = lo + (hi - lo) * i as f64 / resolution as f64;
                let v = at(t)?;
                if v > best_v {
                    best_v = v;
                    best = t;
                }
            }
            sup = sup.max(best_v);
            if sup >= 1.0 - BOUNDARY_TOL {
                return Ok(false);
            }
            let step = (hi - lo) / resolution as f64;
            lo = (best - step).max(0.0);
            hi = (best + step).min(1.0);
        }
        Ok(true)
    };
    let left = below((0.0, 0.0))?;
    let right = below((1.0, 0.0))?;
    match (left, right) {
        (true, false) => Ok(LoopClass::LeftLoop),
        (false, true) => Ok(LoopClass::RightLoop),
        _ => Err(Error::Ambiguous(format!(
            "loop membership of ({}, {}) undecided at resolution {resolution}",
            z.0, z.1
        ))),
    }
}

/// Maximum of the level function over a compact sample set, for parameters
/// swept over `c_range`. Every point must classify strictly inside a loop
/// for every parameter; offenders are reported, not guessed around.
pub fn q_constant(c_range: &[f64], k_points: &[(f64, f64)], resolution: u32) -> Result<f64> {
    if c_range.is_empty() || k_points.is_empty() {
        return Err(Error::domain("parameter range and sample set must be nonempty"));
    }
    let mut q = 0.0f64;
    let mut offenders: Vec<String> = Vec::new();
    for &c in c_range {
        for &z in k_points {
            match classify(c, z, resolution)? {
                LoopClass::LeftLoop | LoopClass::RightLoop => {
                    q = q.max(lemniscate_value(c, z)?);
                }
                other => offenders.push(format!("({}, {}) at c={c}: {other:?}", z.0, z.1)),
            }
        }
    }
    if !offenders.is_empty() {
        return Err(Error::domain(format!(
            "points outside the loops: {}",
            offenders.join("; ")
        )));
    }
    Ok(q)
}

/// Open real interval of length greater than two, carrying the disk-union
/// domain swept by admissible shifts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityDomain {
    pub lo: f64,
    pub hi: f64,
}

impl AnalyticityDomain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(hi - lo > 2.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain("interval length must exceed 2"));
        }
        Ok(AnalyticityDomain { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Disk center offset for shift `a'`: `C(a') = 1 - 2(a' - 1 - lo)/(R-2)`,
    /// in `(-1, 1)` for admissible `a'` in `(lo + 1, hi - 1)`.
    pub fn center_offset(&self, a_prime: f64) -> f64 {
        1.0 - 2.0 * (a_prime - 1.0 - self.lo) / (self.length() - 2.0)
    }

    /// Disk around shift `a'`: center `a' + C(a')`, radius the distance from
    /// the center to the complement of the interval.
    pub fn disk(&self, a_prime: f64) -> (f64, f64) {
        let center = a_prime + self.center_offset(a_prime);
        let radius = (center - self.lo).min(self.hi - center);
        (center, radius)
    }
}

/// Membership in the union of shift disks, decided by sweeping the
/// admissible shifts at the given resolution and testing each disk exactly.
pub fn wa_contains(domain: &AnalyticityDomain, z: (f64, f64), resolution: u32) -> Result<bool> {
    if resolution < 2 {
        return Err(Error::domain("resolution must be at least 2"));
    }
    let (lo, hi) = (domain.lo + 1.0, domain.hi - 1.0);
    for i in 0..=resolution {
        // Open-interval sweep: stay strictly inside the admissible range.
        let t = (i as f64 + 0.5) / (resolution as f64 + 1.0);
        let a_prime = lo + t * (hi - lo);
        let (center, radius) = domain.disk(a_prime);
        if radius <= 0.0 {
            continue;
        }
        if libm::hypot(z.0 - center, z.1) <= radius {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_examples() {
        for c in [0.3, 0.5, 0.8] {
            assert!((lemniscate_value(c, (c, 0.0)).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(lemniscate_value(0.4, (0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(lemniscate_value(0.4, (1.0, 0.0)).unwrap(), 0.0);
        let v = lemniscate_value(0.5, (0.5, 0.5)).unwrap();
        assert!((v - core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((lemniscate_value(0.5, (0.9, 0.0)).unwrap() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn conjugation_and_reflection_symmetry() {
        for (c, z) in [
            (0.37, (0.2, 0.3)),
            (0.5, (-0.1, 0.05)),
            (0.71, (1.2, -0.4)),
        ] {
            let a = lemniscate_value(c, z).unwrap();
            let b = lemniscate_value(c, (z.0, -z.1)).unwrap();
            assert!((a - b).abs() < 1e-14);
            // At c = 1/2 the curve is symmetric about Re z = 1/2.
            let d = lemniscate_value(0.5, (1.0 - z.0, z.1)).unwrap();
            let e = lemniscate_value(0.5, z).unwrap();
            assert!((d - e).abs() < 1e-13);
        }
    }

    #[test]
    fn classify_anchor_points() {
        assert_eq!(classify(0.5, (0.0, 0.0), 64).unwrap(), LoopClass::LeftLoop);
        assert_eq!(classify(0.5, (1.0, 0.0), 64).unwrap(), LoopClass::RightLoop);
        assert_eq!(classify(0.5, (0.5, 0.0), 64).unwrap(), LoopClass::Boundary);
        assert_eq!(classify(0.5, (0.5, 0.5), 64).unwrap(), LoopClass::Outside);
        assert_eq!(classify(0.5, (0.9, 0.0), 64).unwrap(), LoopClass::RightLoop);
        assert_eq!(classify(0.5, (-0.1, 0.0), 64).unwrap(), LoopClass::LeftLoop);
    }

    #[test]
    fn classify_is_stable_under_small_shifts() {
        let base = (-0.05, 0.02);
        let cls = classify(0.5, base, 64).unwrap();
        for d in [(1e-6, 0.0), (-1e-6, 0.0), (0.0, 1e-6), (0.0, -1e-6)] {
            let moved = (base.0 + d.0, base.1 + d.1);
            assert_eq!(classify(0.5, moved, 64).unwrap(), cls);
        }
    }

    #[test]
    fn q_constant_examples() {
        let q = q_constant(&[0.5], &[(0.9, 0.0)], 64).unwrap();
        assert!((q - 0.6).abs() < 1e-14);
        assert!(q_constant(&[0.5], &[(0.5, 0.0)], 64).is_err());

        // Small disk of samples around 0.9 for nearby parameters.
        let mut pts = Vec::new();
        for i in 0..16 {
            let th = core::f64::consts::TAU * i as f64 / 16.0;
            pts.push((0.9 + 0.03 * libm::cos(th), 0.03 * libm::sin(th)));
        }
        let q = q_constant(&[0.45, 0.5, 0.55], &pts, 64).unwrap();
        assert!(q < 1.0);
    }

    #[test]
    fn loop_region_validation() {
        assert!(LoopRegion::new(0.5, 0.1, 64).is_ok());
        assert!(LoopRegion::new(0.5, 0.5, 64).is_err());
        assert!(LoopRegion::new(1.2, 0.0, 64).is_err());
        assert!(LoopRegion::new(0.5, 0.0, 8).is_err());
        let r = LoopRegion::new(0.5, 0.1, 64).unwrap();
        let cs = r.c_range(5);
        assert!((cs.first().unwrap() - 0.4).abs() < 1e-12);
        assert!((cs.last().unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn domain_membership() {
        let a = AnalyticityDomain::new(-2.0, 2.0).unwrap();
        // Symmetric interval of length 4: every admissible shift yields the
        // centered disk of radius 2.
        let (center, radius) = a.disk(0.0);
        assert!((center - 0.0).abs() < 1e-14 && (radius - 2.0).abs() < 1e-14);
        assert!(wa_contains(&a, (-1.0, 0.0), 4096).unwrap());
        assert!(wa_contains(&a, (0.0, 1.9), 4096).unwrap());
        assert!(!wa_contains(&a, (0.0, 5.0), 4096).unwrap());
        // Real interior points are covered.
        for x in [-1.9, -0.3, 0.0, 1.2, 1.9] {
            assert!(wa_contains(&a, (x, 0.0), 4096).unwrap());
        }
        assert!(AnalyticityDomain::new(0.0, 2.0).is_err());
    }

    #[test]
    fn contained_points_satisfy_outer_bound() {
        let a = AnalyticityDomain::new(-1.5, 1.5).unwrap();
        let bound = 2.0f64.max(a.length() - 2.0);
        for ix in -40..=40 {
            for iy in -40..=40 {
                let z = (ix as f64 * 0.1, iy as f64 * 0.1);
                if wa_contains(&a, z, 512).unwrap() {
                    let dist_re = (z.0 - a.hi).max(a.lo - z.0).max(0.0);
                    let dist = libm::hypot(dist_re, z.1);
                    assert!(dist <= bound + 1e-12);
                }
            }
        }
    }

    #[test]
    fn center_offset_stays_admissible() {
        let a = AnalyticityDomain::new(0.0, 5.0).unwrap();
        for i in 1..100 {
            let ap = 1.0 + 3.0 * i as f64 / 100.0;
            let c = a.center_offset(ap);
            assert!(c > -1.0 && c < 1.0, "offset {c} at {ap}");
            let (_, radius) = a.disk(ap);
            assert!(radius > 0.0);
        }
    }
}
