//! Closed-form time evolution of the band-limited initial data under the
//! free-particle and harmonic-oscillator Schrödinger equations, together
//! with the large-degree limit waves and ladder diagnostics for the
//! convergence of the evolved sums to those limits.

use alloc::format;
use alloc::vec::Vec;
use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::numkernel::{
    check_bits, cis, required_bits, rf, CVal, Error, NumCtx, PrecisionMode, PrecisionPolicy,
    Result, RM,
};
use crate::report::ConvergenceReport;
use crate::superosc::{coeff, distance};

/// The harmonic closed form degenerates when `|cos t|` drops below this.
pub const SINGULAR_COS_GUARD: f64 = 1e-6;

/// One spacetime sample of the degree-`N` evolved wave.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPoint {
    pub t: f64,
    pub x: f64,
    pub a: f64,
    pub n: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Potential {
    Free,
    Harmonic,
}

fn working_bits(n: u32, a: f64, policy: &PrecisionPolicy) -> Result<usize> {
    policy.validate()?;
    let bits = match policy.mode {
        PrecisionMode::Fixed => policy.fixed_bits,
        PrecisionMode::Automatic => required_bits(n, libm::log2(a.abs().max(1.0)), policy),
    };
    check_bits(bits)
}

/// Unperturbed frequency `1 - 2k/N` at width `p`.
fn freq(n: u32, k: u32, p: usize) -> BigFloat {
    rf(1.0, p).sub(
        &rf(2.0 * k as f64, p).div(&rf(n as f64, p), p, RM),
        p,
        RM,
    )
}

/// Free evolution: `sum_k C_k(N,a) e^{i h_k x} e^{-i h_k^2 t}` with
/// `h_k = 1 - 2k/N`. All phases are real, so each term is unimodular and the
/// only cancellation source is the binomial weights.
pub fn free_psi_n(
    pt: &EvolutionPoint,
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    if pt.n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let p = working_bits(pt.n, pt.a, policy)?;
    let xb = rf(pt.x, p);
    let tb = rf(pt.t, p);
    let mut acc = CVal::zero(p);
    for k in 0..=pt.n {
        let h = freq(pt.n, k, p);
        let phase = h
            .mul(&xb, p, RM)
            .sub(&h.mul(&h, p, RM).mul(&tb, p, RM), p, RM);
        let term = cis(&phase, p, ctx).mul_real(&coeff(pt.n, k, pt.a, p)?, p);
        acc = acc.add(&term, p);
    }
    Ok((acc.check_finite("free evolution")?, p))
}

/// Limit of the free evolution: `e^{i(ax - a^2 t)}`.
pub fn free_limit(a: f64, t: f64, x: f64, bits: usize, ctx: &mut NumCtx) -> Result<CVal> {
    let p = check_bits(bits.max(53))?;
    let phase = rf(a, p).mul(&rf(x, p), p, RM).sub(
        &rf(a, p).mul(&rf(a, p), p, RM).mul(&rf(t, p), p, RM),
        p,
        RM,
    );
    cis(&phase, p, ctx).check_finite("free limit")
}

/// `(cos t, tan t)` at width `p`, guarded against singular times.
fn guarded_cos_tan(t: f64, p: usize, ctx: &mut NumCtx) -> Result<(BigFloat, BigFloat)> {
    if libm::cos(t).abs() <= SINGULAR_COS_GUARD {
        return Err(Error::SingularTime { t });
    }
    let tb = rf(t, p);
    let c = tb.cos(p, RM, &mut ctx.cc);
    let s = tb.sin(p, RM, &mut ctx.cc);
    Ok((c.clone(), s.div(&c, p, RM)))
}

/// Principal-branch `(cos t)^(-1/2)`: real for `cos t > 0`, `-i/sqrt|cos t|`
/// otherwise.
fn inv_sqrt_cos(c: &BigFloat, p: usize) -> CVal {
    let pos = c.is_positive();
    let root = c.abs().sqrt(p, RM);
    let inv = rf(1.0, p).div(&root, p, RM);
    if pos {
        CVal::real(inv, p)
    } else {
        CVal {
            re: rf(0.0, p),
            im: inv.neg(),
        }
    }
}

/// Harmonic-oscillator evolution:
/// `(cos t)^(-1/2) e^{-(i/2)x^2 tan t} sum_k C_k(N,a)
///  e^{i x h_k / cos t - (i/2) h_k^2 tan t}`.
pub fn harmonic_psi_n(
    pt: &EvolutionPoint,
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<(CVal, usize)> {
    if pt.n < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let p = working_bits(pt.n, pt.a, policy)?;
    let (cos_t, tan_t) = guarded_cos_tan(pt.t, p, ctx)?;
    let xb = rf(pt.x, p);
    let half = rf(0.5, p);
    let mut acc = CVal::zero(p);
    for k in 0..=pt.n {
        let h = freq(pt.n, k, p);
        let phase = xb.mul(&h, p, RM).div(&cos_t, p, RM).sub(
            &half.mul(&h, p, RM).mul(&h, p, RM).mul(&tan_t, p, RM),
            p,
            RM,
        );
        let term = cis(&phase, p, ctx).mul_real(&coeff(pt.n, k, pt.a, p)?, p);
        acc = acc.add(&term, p);
    }
    let pre_phase = half.mul(&xb, p, RM).mul(&xb, p, RM).mul(&tan_t, p, RM).neg();
    let prefactor = inv_sqrt_cos(&cos_t, p).mul(&cis(&pre_phase, p, ctx), p);
    Ok((acc.mul(&prefactor, p).check_finite("harmonic evolution")?, p))
}

/// Limit of the harmonic evolution:
/// `(cos t)^(-1/2) e^{-(i/2)x^2 tan t} e^{-(i/2)a^2 tan t + i a x / cos t}`.
pub fn harmonic_limit(a: f64, t: f64, x: f64, bits: usize, ctx: &mut NumCtx) -> Result<CVal> {
    let p = check_bits(bits.max(53))?;
    let (cos_t, tan_t) = guarded_cos_tan(t, p, ctx)?;
    let half = rf(0.5, p);
    let xb = rf(x, p);
    let ab = rf(a, p);
    let phase = ab
        .mul(&xb, p, RM)
        .div(&cos_t, p, RM)
        .sub(&half.mul(&ab, p, RM).mul(&ab, p, RM).mul(&tan_t, p, RM), p, RM)
        .sub(&half.mul(&xb, p, RM).mul(&xb, p, RM).mul(&tan_t, p, RM), p, RM);
    inv_sqrt_cos(&cos_t, p)
        .mul(&cis(&phase, p, ctx), p)
        .check_finite("harmonic limit")
}

/// Ladder experiment: sup over the `(t, x)` grid of the distance between the
/// degree-`N` evolved wave and the limit wave.
pub fn evolution_convergence(
    potential: Potential,
    a: f64,
    t_grid: &[f64],
    x_grid: &[f64],
    n_ladder: &[u32],
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<ConvergenceReport> {
    if t_grid.is_empty() || x_grid.is_empty() || n_ladder.is_empty() {
        return Err(Error::domain("grids and ladder must be nonempty"));
    }
    let mut sup_errors = Vec::with_capacity(n_ladder.len());
    let mut bits_used = 0usize;
    for &n in n_ladder {
        let mut sup = 0.0f64;
        for &t in t_grid {
            for &x in x_grid {
                let pt = EvolutionPoint { t, x, a, n };
                let (v, p) = match potential {
                    Potential::Free => free_psi_n(&pt, policy, ctx)?,
                    Potential::Harmonic => harmonic_psi_n(&pt, policy, ctx)?,
                };
                bits_used = bits_used.max(p);
                let lim = match potential {
                    Potential::Free => free_limit(a, t, x, p, ctx)?,
                    Potential::Harmonic => harmonic_limit(a, t, x, p, ctx)?,
                };
                sup = sup.max(distance(&v, &lim, p));
            }
        }
        sup_errors.push(sup);
    }
    ConvergenceReport::assemble(
        n_ladder.to_vec(),
        sup_errors,
        format!(
            "{potential:?} potential, a={a}, {} x {} (t, x) samples",
            t_grid.len(),
            x_grid.len()
        ),
        bits_used,
    )
}
