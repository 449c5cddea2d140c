//! Bernstein operators with a shrunken sample rate `(1-eps_N)/N` and a real
//! shift, their Newton (forward-difference) form, and the centered moment
//! polynomials with the coefficient inequality behind the complex-domain
//! convergence bound.

use alloc::format;
use alloc::vec::Vec;
use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::numkernel::{
    binomial_row, biguint_to_bigfloat, check_bits, eval_function, required_bits, rf, CVal, Error,
    FunctionSpec, NumCtx, PrecisionPolicy, Result, RM,
};

/// Degree, perturbation and shift of one operator instance. The sample rate
/// `(1 - eps_N)/N` is derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub n: u32,
    pub eps_n: f64,
    pub b_prime: f64,
}

impl BernsteinParams {
    pub fn new(n: u32, eps_n: f64, b_prime: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("degree must be at least 1"));
        }
        if !(eps_n >= 0.0 && eps_n < 1.0) {
            return Err(Error::domain("perturbation must lie in [0, 1)"));
        }
        if !b_prime.is_finite() {
            return Err(Error::domain("shift must be finite"));
        }
        Ok(BernsteinParams { n, eps_n, b_prime })
    }

    /// Distance between consecutive sample points, in `(0, 1/N]`.
    pub fn rate(&self) -> f64 {
        (1.0 - self.eps_n) / self.n as f64
    }
}

/// Mantissa width for a degree-`n` weight sum at complex `b`: the weights
/// total `(|b| + |1-b|)^N` while the value stays bounded, so that exponent
/// is the per-index cancellation budget. Real `b` in `[0, 1]` has
/// nonnegative weights and needs no widening beyond the guard.
fn weight_bits(n: u32, b: (f64, f64), policy: &PrecisionPolicy) -> Result<usize> {
    policy.validate()?;
    let scale = libm::log2(libm::hypot(b.0, b.1) + libm::hypot(1.0 - b.0, -b.1)).max(0.0);
    check_bits(required_bits(n, scale, policy))
}

fn powers_ascending(base: &CVal, n: u32, p: usize) -> Vec<CVal> {
    let mut pows = Vec::with_capacity(n as usize + 1);
    pows.push(CVal::one(p));
    for k in 1..=n as usize {
        pows.push(pows[k - 1].mul(base, p));
    }
    pows
}

/// Sample point `b' + j * rate` at width `p` for an explicit f64 step.
fn sample_point(b_prime: f64, rate: f64, j: u32, p: usize) -> BigFloat {
    rf(b_prime, p).add(&rf(j as f64, p).mul(&rf(rate, p), p, RM), p, RM)
}

/// Sample point `b' + j (1 - eps_N)/N` with the rate formed at width `p`;
/// shared by both evaluation forms so their identity is exact up to
/// summation rounding, and free of the f64 bias a rounded rate would add.
fn sample_point_exact(params: &BernsteinParams, j: u32, p: usize) -> BigFloat {
    let rate = rf(1.0, p)
        .sub(&rf(params.eps_n, p), p, RM)
        .div(&rf(params.n as f64, p), p, RM);
    rf(params.b_prime, p).add(&rf(j as f64, p).mul(&rate, p, RM), p, RM)
}

/// Forward-difference table from consecutive sample values.
fn diff_table(mut row: Vec<CVal>, p: usize) -> Vec<CVal> {
    let mut out = Vec::with_capacity(row.len());
    for _ in 0..row.len() {
        out.push(row[0].clone());
        for i in 0..row.len() - 1 {
            row[i] = row[i + 1].sub(&row[i], p);
        }
        row.pop();
    }
    out
}

/// Weight-sum form `sum_nu C(N,nu) b^nu (1-b)^(N-nu) Psi(b' + nu rate)`.
pub fn bernstein_eval(
    psi: &FunctionSpec,
    params: &BernsteinParams,
    b: (f64, f64),
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    let p = weight_bits(params.n, b, policy)?;
    let n = params.n;
    let bb = CVal::from_f64(b.0, b.1, p);
    let one_minus = CVal::one(p).sub(&bb, p);
    let pow_b = powers_ascending(&bb, n, p);
    let pow_m = powers_ascending(&one_minus, n, p);
    let binoms = binomial_row(n);
    let mut acc = CVal::zero(p);
    for nu in 0..=n {
        let x = sample_point_exact(params, nu, p);
        let v = eval_function(ctx, psi, &CVal::real(x, p), p)?;
        let w = pow_b[nu as usize]
            .mul(&pow_m[(n - nu) as usize], p)
            .mul_real(&biguint_to_bigfloat(&binoms[nu as usize], p), p);
        acc = acc.add(&w.mul(&v, p), p);
    }
    Ok((acc.check_finite("weight sum")?, p))
}

/// Forward differences `(D^0 Psi, ..., D^K Psi)` at `b_prime` with step
/// `rate`, by the recursive definition `D^k f(x) = D^{k-1} f(x + rate) -
/// D^{k-1} f(x)`.
pub fn forward_differences(
    psi: &FunctionSpec,
    b_prime: f64,
    rate: f64,
    k_max: u32,
    bits: usize,
    ctx: &mut NumCtx,
) -> Result<Vec<CVal>> {
    let p = check_bits(bits.max(53))?;
    let row: Vec<CVal> = (0..=k_max)
        .map(|j| {
            let x = sample_point(b_prime, rate, j, p);
            eval_function(ctx, psi, &CVal::real(x, p), p)
        })
        .collect::<Result<_>>()?;
    Ok(diff_table(row, p))
}

/// Newton form `sum_k C(N,k) D^k Psi(b') b^k`, algebraically equal to
/// [`bernstein_eval`]; the falling factorial `N!/(N-k)!` divided by `k!` is
/// exactly the binomial coefficient.
pub fn newton_form_eval(
    psi: &FunctionSpec,
    params: &BernsteinParams,
    b: (f64, f64),
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    let p = weight_bits(params.n, b, policy)?;
    let n = params.n;
    let row: Vec<CVal> = (0..=n)
        .map(|j| {
            let x = sample_point_exact(params, j, p);
            eval_function(ctx, psi, &CVal::real(x, p), p)
        })
        .collect::<Result<_>>()?;
    let diffs = diff_table(row, p);
    let bb = CVal::from_f64(b.0, b.1, p);
    let pow_b = powers_ascending(&bb, n, p);
    let binoms = binomial_row(n);
    let mut acc = CVal::zero(p);
    for k in 0..=n {
        let term = diffs[k as usize]
            .mul(&pow_b[k as usize], p)
            .mul_real(&biguint_to_bigfloat(&binoms[k as usize], p), p);
        acc = acc.add(&term, p);
    }
    Ok((acc.check_finite("difference form")?, p))
}

/// Centered moment polynomial
/// `sum_nu C(N,nu) (nu (1-eps_N)/N - c)^kappa z^nu (1-z)^(N-nu)`.
pub fn moment_poly(
    n: u32,
    kappa: u32,
    c: f64,
    eps_n: f64,
    z: (f64, f64),
    policy: &PrecisionPolicy,
) -> Result<(CVal, usize)> {
    if n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let p = weight_bits(n, z, policy)?;
    let rate = (1.0 - eps_n) / n as f64;
    let zz = CVal::from_f64(z.0, z.1, p);
    let one_minus = CVal::one(p).sub(&zz, p);
    let pow_z = powers_ascending(&zz, n, p);
    let pow_m = powers_ascending(&one_minus, n, p);
    let binoms = binomial_row(n);
    let cb = rf(c, p);
    let mut acc = CVal::zero(p);
    for nu in 0..=n {
        let centered = rf(nu as f64, p).mul(&rf(rate, p), p, RM).sub(&cb, p, RM);
        let moment = CVal::real(centered, p).powi(kappa, p);
        let w = pow_z[nu as usize]
            .mul(&pow_m[(n - nu) as usize], p)
            .mul_real(&biguint_to_bigfloat(&binoms[nu as usize], p), p);
        acc = acc.add(&w.mul(&moment, p), p);
    }
    Ok((acc.check_finite("moment polynomial")?, p))
}

/// One verdict of the coefficient inequality
/// `|z (1-c)^k + (1-z)(-c)^k| <= |z-c|^k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub z: (f64, f64),
    pub kappa: u32,
    /// Whether `|z - c| >= min(c, 1-c)` held for this sample.
    pub precondition_ok: bool,
    pub holds: bool,
}

/// Sweep of the coefficient inequality over samples and exponents
/// `1..=kappa_max`. Precondition violations are flagged per sample rather
/// than failing the sweep.
pub fn coefficient_bound_check(
    c: f64,
    kappa_max: u32,
    z_samples: &[(f64, f64)],
) -> Result<Vec<BoundSample>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain(format!("center {c} must lie in (0, 1)")));
    }
    let inner = c.min(1.0 - c);
    let mut out = Vec::new();
    for &(zx, zy) in z_samples {
        let dist = libm::hypot(zx - c, zy);
        let precondition_ok = dist >= inner * (1.0 - 1e-12);
        for kappa in 1..=kappa_max {
            // z (1-c)^k + (1-z)(-c)^k in f64 complex arithmetic.
            let pk = libm::pow(1.0 - c, kappa as f64);
            let mk = libm::pow(-c, kappa as f64);
            let lr = zx * pk + (1.0 - zx) * mk;
            let li = zy * pk - zy * mk;
            let lhs = libm::hypot(lr, li);
            let rhs = libm::pow(dist, kappa as f64);
            out.push(BoundSample {
                z: (zx, zy),
                kappa,
                precondition_ok,
                holds: lhs <= rhs * (1.0 + 1e-12),
            });
        }
    }
    Ok(out)
}
