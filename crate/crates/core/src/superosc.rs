//! Band-limited sums that oscillate faster than their fastest Fourier mode:
//! the binomial coefficient family, two algebraically identical evaluation
//! forms (term sum and closed product), a Lagrange interpolator on the
//! unperturbed grid with its factorial remainder bound, and ladder
//! convergence reports toward `e^{iaz}`.

use alloc::format;
use alloc::vec::Vec;
use astro_float::BigFloat;
use num_bigint::Sign;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::numkernel::{
    binomial_row, biguint_to_bigfloat, check_bits, required_bits, rf, CVal, Error, NumCtx,
    PrecisionMode, PrecisionPolicy, Result, RM,
};
use crate::report::ConvergenceReport;
use crate::sampling::{EpsilonSpec, FrequencyRow};

/// Explicit finite exponential sum `sum_k c_k e^{i h_k z}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    pub nodes: Vec<f64>,
    /// Complex coefficients as `(re, im)` pairs, one per node.
    pub coefficients: Vec<(f64, f64)>,
}

impl TrigPolynomial {
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.coefficients.len() || self.nodes.is_empty() {
            return Err(Error::domain("nodes and coefficients must match and be nonempty"));
        }
        Ok(())
    }

    pub fn eval(&self, z: (f64, f64), p: usize, ctx: &mut NumCtx) -> Result<CVal> {
        self.validate()?;
        let mut acc = CVal::zero(p);
        for (h, (cr, ci)) in self.nodes.iter().zip(&self.coefficients) {
            let e = node_exponential(&rf(*h, p), z, p, ctx);
            acc = acc.add(&e.mul(&CVal::from_f64(*cr, *ci, p), p), p);
        }
        acc.check_finite("trig polynomial")
    }
}

/// `e^{i h z}` for real `h` held at working precision.
fn node_exponential(h: &BigFloat, z: (f64, f64), p: usize, ctx: &mut NumCtx) -> CVal {
    let mut re = h.mul(&rf(z.1, p), p, RM);
    re.inv_sign();
    let im = h.mul(&rf(z.0, p), p, RM);
    CVal::new(re, im).exp(p, ctx)
}

/// Coefficient `C(N, nu) ((1+a)/2)^{N-nu} ((1-a)/2)^{nu}`; the binomial
/// factor is exact, the two bases are rounded once at width `p`.
pub fn coeff(n: u32, nu: u32, a: f64, p: usize) -> Result<BigFloat> {
    if nu > n {
        return Err(Error::domain(format!("index {nu} exceeds degree {n}")));
    }
    let binom = biguint_to_bigfloat(&crate::numkernel::binomial(n, nu)?, p);
    let half = rf(0.5, p);
    let one = rf(1.0, p);
    let b1 = one.add(&rf(a, p), p, RM).mul(&half, p, RM);
    let b2 = one.sub(&rf(a, p), p, RM).mul(&half, p, RM);
    Ok(binom
        .mul(&b1.powi((n - nu) as usize, p, RM), p, RM)
        .mul(&b2.powi(nu as usize, p, RM), p, RM))
}

/// Base-2 magnitude of the closed product at `z`, estimated in f64. Used to
/// widen the mantissa when the target itself is tiny, so that the relative
/// agreement of the two evaluation forms survives the cancellation.
fn closed_log2_magnitude(n: u32, eps_n: f64, a: f64, z: (f64, f64)) -> f64 {
    let (zx, zy) = z;
    let s = (1.0 - eps_n) / n as f64;
    let (wx, wy) = (zx * s, zy * s);
    let (cwr, cwi) = (
        libm::cos(wx) * libm::cosh(wy),
        -libm::sin(wx) * libm::sinh(wy),
    );
    let (swr, swi) = (
        libm::sin(wx) * libm::cosh(wy),
        libm::cos(wx) * libm::sinh(wy),
    );
    // cos w + i a sin w
    let br = cwr - a * swi;
    let bi = cwi + a * swr;
    let base = libm::hypot(br, bi);
    n as f64 * libm::log2(base) + eps_n * zy * core::f64::consts::LOG2_E
}

/// Mantissa width for the degree-`N` sum at `z`: binomial-sum cancellation
/// (`N log2 max(1,|a|)`), exponential growth off the real axis, and a
/// deficit term when the result itself is far below unit size.
fn sum_bits(n: u32, eps_n: f64, a: f64, z: (f64, f64), policy: &PrecisionPolicy) -> Result<usize> {
    policy.validate()?;
    let bits = match policy.mode {
        PrecisionMode::Fixed => policy.fixed_bits,
        PrecisionMode::Automatic => {
            let scale =
                libm::log2(a.abs().max(1.0)) + z.1.abs() * core::f64::consts::LOG2_E / n as f64;
            let base = required_bits(n, scale, policy);
            let log_mag = closed_log2_magnitude(n, eps_n, a, z);
            let deficit = if log_mag.is_finite() {
                libm::ceil((-log_mag).max(0.0)).min(2048.0) as usize
            } else {
                64
            };
            base + deficit
        }
    };
    check_bits(bits)
}

fn check_eps(eps_n: f64) -> Result<()> {
    if eps_n >= 0.0 && eps_n < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("perturbation must lie in [0, 1)"))
    }
}

/// Term-by-term evaluation `sum_nu coeff(N,nu,a) e^{i h_nu z}` with the grid
/// values recomputed at working precision. Returns the value and the
/// mantissa width used.
pub fn eval_sum(
    n: u32,
    eps_n: f64,
    a: f64,
    z: (f64, f64),
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    check_eps(eps_n)?;
    if n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let p = sum_bits(n, eps_n, a, z, policy)?;
    if z == (0.0, 0.0) {
        // Coefficient sum: the binomial theorem gives exactly one.
        return Ok((CVal::one(p), p));
    }
    let one = rf(1.0, p);
    let half = rf(0.5, p);
    let two = rf(2.0, p);
    let nb = rf(n as f64, p);
    let eb = rf(eps_n, p);
    let b1 = one.add(&rf(a, p), p, RM).mul(&half, p, RM);
    let b2 = one.sub(&rf(a, p), p, RM).mul(&half, p, RM);
    let binoms = binomial_row(n);
    let mut pow1 = Vec::with_capacity(n as usize + 1);
    pow1.push(one.clone());
    for k in 1..=n as usize {
        pow1.push(pow1[k - 1].mul(&b1, p, RM));
    }
    let mut pow2 = one.clone();
    let mut acc = CVal::zero(p);
    for nu in 0..=n {
        let c = biguint_to_bigfloat(&binoms[nu as usize], p)
            .mul(&pow1[(n - nu) as usize], p, RM)
            .mul(&pow2, p, RM);
        let nub = rf(nu as f64, p);
        let t = eb.mul(&nb.sub(&nub, p, RM), p, RM).add(&nub, p, RM);
        let h = one.sub(&t.mul(&two, p, RM).div(&nb, p, RM), p, RM);
        let e = node_exponential(&h, z, p, ctx);
        acc = acc.add(&e.mul_real(&c, p), p);
        if nu < n {
            pow2 = pow2.mul(&b2, p, RM);
        }
    }
    Ok((acc.check_finite("term sum")?, p))
}

/// Closed product `e^{-i eps z} (cos(z(1-eps)/N) + i a sin(z(1-eps)/N))^N`,
/// algebraically identical to [`eval_sum`] and evaluated at the same width.
/// (The grid value `h_nu` splits as `-eps + (1-eps)(1 - 2nu/N)`, which fixes
/// the sign of the prefactor exponent.)
pub fn eval_closed(
    n: u32,
    eps_n: f64,
    a: f64,
    z: (f64, f64),
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    check_eps(eps_n)?;
    if n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let p = sum_bits(n, eps_n, a, z, policy)?;
    let one = rf(1.0, p);
    let eb = rf(eps_n, p);
    let s = one.sub(&eb, p, RM).div(&rf(n as f64, p), p, RM);
    let w = CVal::new(rf(z.0, p).mul(&s, p, RM), rf(z.1, p).mul(&s, p, RM));
    let ia = CVal::new(rf(0.0, p), rf(a, p));
    let base = w.cos(p, ctx).add(&ia.mul(&w.sin(p, ctx), p), p);
    let pw = base.powi(n, p);
    let mut neg_eb = eb.clone();
    neg_eb.inv_sign();
    let pre = node_exponential(&neg_eb, z, p, ctx);
    Ok((pre.mul(&pw, p).check_finite("closed product")?, p))
}

fn ratio_to_bigfloat(r: &BigRational, p: usize) -> BigFloat {
    let num = biguint_to_bigfloat(r.numer().magnitude(), p);
    let den = biguint_to_bigfloat(r.denom().magnitude(), p);
    let mut v = num.div(&den, p, RM);
    if r.numer().sign() == Sign::Minus {
        v.inv_sign();
    }
    v
}

/// Interpolation weights `prod_{k != nu} (a - h_k)/(h_nu - h_k)`, exact.
///
/// Every f64 is a dyadic rational, so the node-difference products carry no
/// rounding at all; each weight is rounded once at the working width.
fn lagrange_weights(nodes: &[f64], a: f64) -> Result<Vec<BigRational>> {
    let rat = |v: f64| {
        BigRational::from_float(v).ok_or_else(|| Error::domain("nodes must be finite"))
    };
    let a_r = rat(a)?;
    let node_r: Vec<BigRational> = nodes.iter().map(|h| rat(*h)).collect::<Result<_>>()?;
    let mut weights = Vec::with_capacity(nodes.len());
    for (nu, h_nu) in node_r.iter().enumerate() {
        let mut w = BigRational::from_float(1.0).unwrap();
        for (k, h_k) in node_r.iter().enumerate() {
            if k == nu {
                continue;
            }
            let d = h_nu - h_k;
            if d == BigRational::from_float(0.0).unwrap() {
                return Err(Error::domain("interpolation nodes must be distinct"));
            }
            w *= (&a_r - h_k) / d;
        }
        weights.push(w);
    }
    Ok(weights)
}

/// Lagrange interpolation of `t -> e^{i t z}` at the row's nodes, evaluated
/// at frequency `a`.
pub fn lagrange_eval(
    row: &FrequencyRow,
    a: f64,
    z: (f64, f64),
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    let weights = lagrange_weights(&row.h, a)?;
    let sum_abs: f64 = weights
        .iter()
        .map(|w| w.to_f64().map(f64::abs).unwrap_or(f64::INFINITY))
        .sum();
    let bits = match policy.mode {
        PrecisionMode::Fixed => policy.fixed_bits,
        PrecisionMode::Automatic => {
            let budget = libm::ceil(
                libm::log2(sum_abs.max(1.0)) + z.1.abs() * core::f64::consts::LOG2_E,
            ) as usize;
            (budget + policy.guard_bits).max(53)
        }
    };
    let p = check_bits(bits)?;
    let mut acc = CVal::zero(p);
    for (w, h) in weights.iter().zip(&row.h) {
        let e = node_exponential(&rf(*h, p), z, p, ctx);
        acc = acc.add(&e.mul_real(&ratio_to_bigfloat(w, p), p), p);
    }
    Ok((acc.check_finite("interpolator")?, p))
}

/// Factorial remainder bound `((|a|+1)|x|)^{N+1}/(N+1)!` for the
/// interpolation error at real `x`.
pub fn lagrange_bound(n: u32, a: f64, x: f64) -> f64 {
    let base = (a.abs() + 1.0) * x.abs();
    let mut prod = 1.0f64;
    for k in 1..=(n + 1) {
        prod *= base / k as f64;
    }
    prod
}

/// Ladder experiment: sup over the real grid of the distance between the
/// degree-`N` closed product and `e^{iax}`, one sup per ladder entry.
pub fn superosc_convergence(
    a: f64,
    x_grid: &[f64],
    n_ladder: &[u32],
    eps: &EpsilonSpec,
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<ConvergenceReport> {
    if x_grid.is_empty() || n_ladder.is_empty() {
        return Err(Error::domain("grid and ladder must be nonempty"));
    }
    let mut sup_errors = Vec::with_capacity(n_ladder.len());
    let mut bits_used = 0usize;
    for &n in n_ladder {
        let eps_n = eps.eps_at(n)?;
        let mut sup = 0.0f64;
        for &x in x_grid {
            let (v, p) = eval_closed(n, eps_n, a, (x, 0.0), policy, ctx)?;
            bits_used = bits_used.max(p);
            let phase = rf(a, p).mul(&rf(x, p), p, RM);
            let target = crate::numkernel::cis(&phase, p, ctx);
            let err = v.sub(&target, p).abs_f64(p);
            sup = sup.max(err);
        }
        sup_errors.push(sup);
    }
    let lo = x_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let grid = format!("x in [{lo}, {hi}], {} points", x_grid.len());
    ConvergenceReport::assemble(n_ladder.to_vec(), sup_errors, grid, bits_used)
}

/// Convenience: `|u - v|` at width `p` as f64.
pub fn distance(u: &CVal, v: &CVal, p: usize) -> f64 {
    u.sub(v, p).abs_f64(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::to_f64;
    use crate::sampling::frequencies;
    use alloc::vec;

    fn auto() -> PrecisionPolicy {
        PrecisionPolicy::automatic()
    }

    #[test]
    fn coeff_examples() {
        assert_eq!(to_f64(&coeff(1, 0, 1.0, 64).unwrap()), 1.0);
        assert_eq!(to_f64(&coeff(2, 1, 0.0, 64).unwrap()), 0.5);
        let mut s = rf(0.0, 96);
        for nu in 0..=3 {
            s = s.add(&coeff(3, nu, 2.5, 96).unwrap(), 96, RM);
        }
        assert!((to_f64(&s) - 1.0).abs() < 1e-25);
        assert!(coeff(3, 4, 1.0, 64).is_err());
    }

    #[test]
    fn sum_small_cases() {
        let mut ctx = NumCtx::new();
        let (v, p) = eval_sum(1, 0.0, 2.0, (core::f64::consts::FRAC_PI_2, 0.0), &auto(), &mut ctx)
            .unwrap();
        let (re, im) = v.to_f64_pair();
        assert!(re.abs() < 1e-15 && (im - 2.0).abs() < 1e-15, "got {re} {im} at {p} bits");

        let (v, _) = eval_sum(7, 0.0, 1.0, (1.0, 0.0), &auto(), &mut ctx).unwrap();
        let (re, im) = v.to_f64_pair();
        assert!((re - libm::cos(1.0)).abs() < 1e-15);
        assert!((im - libm::sin(1.0)).abs() < 1e-15);
    }

    #[test]
    fn normalization_is_exact() {
        let mut ctx = NumCtx::new();
        for (n, a) in [(1u32, 0.3), (17, -2.5), (40, 4.0)] {
            let (v, p) = eval_sum(n, 0.01, a, (0.0, 0.0), &auto(), &mut ctx).unwrap();
            assert_eq!(v.to_f64_pair(), (1.0, 0.0));
            let d = v.sub(&CVal::one(p), p);
            assert!(d.re.is_zero() && d.im.is_zero());
        }
    }

    #[test]
    fn dual_forms_agree() {
        let mut ctx = NumCtx::new();
        for (n, eps, a, z) in [
            (20u32, 0.05, 3.0, (2.0, 0.0)),
            (50, 0.02, 2.0, (1.5, 0.0)),
            (16, 0.0, 4.0, (-3.0, 1.0)),
        ] {
            let (s, p) = eval_sum(n, eps, a, z, &auto(), &mut ctx).unwrap();
            let (c, p2) = eval_closed(n, eps, a, z, &auto(), &mut ctx).unwrap();
            assert_eq!(p, p2);
            let rel = distance(&s, &c, p) / c.abs_f64(p);
            assert!(rel <= libm::exp2(-64.0), "rel {rel:e} at N={n}");
        }
    }

    #[test]
    fn closed_collapses_at_a_one() {
        let mut ctx = NumCtx::new();
        let (v, p) = eval_closed(23, 0.0, 1.0, (0.7, 0.0), &auto(), &mut ctx).unwrap();
        let target = crate::numkernel::cis(&rf(0.7, p), p, &mut ctx);
        assert!(distance(&v, &target, p) < 1e-15);
    }

    #[test]
    fn interpolation_at_nodes() {
        let mut ctx = NumCtx::new();
        let row = frequencies(5, 0.0).unwrap();
        let z = (1.3, 0.0);
        for &h in &row.h {
            let (v, p) = lagrange_eval(&row, h, z, &auto(), &mut ctx).unwrap();
            let e = node_exponential(&rf(h, p), z, p, &mut ctx);
            assert!(distance(&v, &e, p) < 1e-14);
        }

        let row1 = frequencies(1, 0.0).unwrap();
        let (v, p) = lagrange_eval(&row1, 0.0, (0.9, 0.0), &auto(), &mut ctx).unwrap();
        let (re, im) = v.to_f64_pair();
        assert!((re - libm::cos(0.9)).abs() < 1e-15 && im.abs() < 1e-15, "{re} {im} {p}");
    }

    #[test]
    fn interpolation_error_within_bound() {
        let mut ctx = NumCtx::new();
        let row = frequencies(5, 0.0).unwrap();
        let (v, p) = lagrange_eval(&row, 2.0, (1.0, 0.0), &auto(), &mut ctx).unwrap();
        let target = crate::numkernel::cis(&rf(2.0, p), p, &mut ctx);
        let err = distance(&v, &target, p);
        assert!(err <= lagrange_bound(5, 2.0, 1.0));
    }

    #[test]
    fn bound_examples() {
        assert!((lagrange_bound(5, 2.0, 1.0) - 1.0125).abs() < 1e-12);
        assert_eq!(lagrange_bound(12, 3.0, 0.0), 0.0);
        let expect = 2048.0 / 39916800.0;
        assert!((lagrange_bound(10, 1.0, 1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn short_ladder_report() {
        let mut ctx = NumCtx::new();
        let grid: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
        let r = superosc_convergence(
            0.0,
            &grid,
            &[10, 20],
            &EpsilonSpec::Zero,
            &auto(),
            &mut ctx,
        )
        .unwrap();
        assert!(r.verdict, "sup errors {:?}", r.sup_errors);
    }

    #[test]
    fn trig_polynomial_at_zero_sums_coefficients() {
        let mut ctx = NumCtx::new();
        let t = TrigPolynomial {
            nodes: vec![1.0, -0.25, -1.0],
            coefficients: vec![(0.5, 0.0), (0.25, 1.0), (-0.5, 0.125)],
        };
        let v = t.eval((0.0, 0.0), 96, &mut ctx).unwrap();
        assert_eq!(v.to_f64_pair(), (0.25, 1.125));
    }
}
