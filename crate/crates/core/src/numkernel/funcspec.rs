use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::complex::CVal;
use super::error::{Error, Result};
use super::quadrature::gauss_legendre_on;
use super::real::{rf, to_f64, NumCtx, RM};

/// Symbolic description of a target function, evaluable at any mantissa
/// width. Serialized as a single JSON object; complex coefficients are
/// `[re, im]` pairs in ascending degree, `"end": null` means plus infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    PiecewisePoly {
        pieces: Vec<Piece>,
    },
    /// `a -> e^{lambda a}` with complex `lambda`.
    ExpLinear {
        lambda: (f64, f64),
    },
    Named {
        name: NamedFunction,
    },
    /// Fixed-node smoothing `a -> (psi * theta)(a)` against a bump supported
    /// in `[0, eps_support]`, normalized so that the discrete integral of the
    /// bump equals one under the same quadrature rule.
    Convolved {
        inner: Box<FunctionSpec>,
        eps_support: f64,
        quadrature_nodes: u32,
    },
    /// `a -> integral of the inner spec from a0 to a`.
    Primitive {
        inner: Box<FunctionSpec>,
        a0: f64,
    },
    /// `a -> a * psi(a)`.
    ProductWithIdentity {
        inner: Box<FunctionSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    /// Right endpoint of the piece (exclusive); `None` is unbounded.
    pub end: Option<f64>,
    /// Polynomial coefficients `[re, im]`, ascending degree.
    pub coeffs: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedFunction {
    Exp,
    Sin,
    Cos,
}

pub fn named_name(n: NamedFunction) -> &'static str {
    match n {
        NamedFunction::Exp => "exp",
        NamedFunction::Sin => "sin",
        NamedFunction::Cos => "cos",
    }
}

impl FunctionSpec {
    /// Single polynomial on all of the real line, real coefficients.
    pub fn poly(coeffs: &[f64]) -> FunctionSpec {
        FunctionSpec::PiecewisePoly {
            pieces: alloc::vec![Piece {
                end: None,
                coeffs: coeffs.iter().map(|c| (*c, 0.0)).collect(),
            }],
        }
    }

    pub fn constant(c: f64) -> FunctionSpec {
        FunctionSpec::poly(&[c])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::PiecewisePoly { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::domain("piecewise_poly needs at least one piece"));
                }
                let mut last: Option<f64> = None;
                for (i, piece) in pieces.iter().enumerate() {
                    if piece.coeffs.is_empty() {
                        return Err(Error::domain("every piece needs at least one coefficient"));
                    }
                    match piece.end {
                        Some(e) => {
                            if !e.is_finite() {
                                return Err(Error::domain("piece breakpoints must be finite"));
                            }
                            if let Some(prev) = last {
                                if e <= prev {
                                    return Err(Error::domain(
                                        "breakpoints must be strictly increasing",
                                    ));
                                }
                            }
                            last = Some(e);
                        }
                        None => {
                            if i + 1 != pieces.len() {
                                return Err(Error::domain(
                                    "only the last piece may be unbounded",
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
            FunctionSpec::ExpLinear { lambda } => {
                if !lambda.0.is_finite() || !lambda.1.is_finite() {
                    return Err(Error::domain("lambda must be finite"));
                }
                Ok(())
            }
            FunctionSpec::Named { .. } => Ok(()),
            FunctionSpec::Convolved {
                inner,
                eps_support,
                quadrature_nodes,
            } => {
                if !(*eps_support > 0.0) {
                    return Err(Error::domain("eps_support must be positive"));
                }
                if *quadrature_nodes < 8 {
                    return Err(Error::domain("quadrature_nodes must be at least 8"));
                }
                inner.validate()
            }
            FunctionSpec::Primitive { inner, a0 } => {
                if !a0.is_finite() {
                    return Err(Error::domain("a0 must be finite"));
                }
                inner.validate()
            }
            FunctionSpec::ProductWithIdentity { inner } => inner.validate(),
        }
    }

    /// Multiplication by the identity map, folded into the piecewise
    /// representation when possible so that iterating it on a constant
    /// yields plain monomials.
    pub fn times_identity(&self) -> FunctionSpec {
        match self {
            FunctionSpec::PiecewisePoly { pieces } => FunctionSpec::PiecewisePoly {
                pieces: pieces
                    .iter()
                    .map(|piece| {
                        let mut coeffs = Vec::with_capacity(piece.coeffs.len() + 1);
                        coeffs.push((0.0, 0.0));
                        coeffs.extend_from_slice(&piece.coeffs);
                        Piece {
                            end: piece.end,
                            coeffs,
                        }
                    })
                    .collect(),
            },
            other => FunctionSpec::ProductWithIdentity {
                inner: Box::new(other.clone()),
            },
        }
    }
}

/// Pointwise evaluation of a spec at complex `x` with `bits` of precision.
///
/// Piecewise polynomials select the piece by `Re(x)` and use Horner
/// evaluation; the perturbed sample points of the approximation operators
/// are always real, so the complex branch is exercised only by diagnostics.
pub fn eval_function(ctx: &mut NumCtx, f: &FunctionSpec, x: &CVal, bits: usize) -> Result<CVal> {
    let p = bits.max(53);
    let v = match f {
        FunctionSpec::PiecewisePoly { pieces } => {
            let piece = select_piece(pieces, to_f64(&x.re))?;
            horner(&piece.coeffs, x, p)
        }
        FunctionSpec::ExpLinear { lambda } => {
            let l = CVal::from_f64(lambda.0, lambda.1, p);
            l.mul(x, p).exp(p, ctx)
        }
        FunctionSpec::Named { name } => match name {
            NamedFunction::Exp => x.exp(p, ctx),
            NamedFunction::Sin => x.sin(p, ctx),
            NamedFunction::Cos => x.cos(p, ctx),
        },
        FunctionSpec::Convolved {
            inner,
            eps_support,
            quadrature_nodes,
        } => {
            // The shift axis is cut wherever the inner target switches
            // pieces, so each panel integrates a smooth function and the
            // smoothed value inherits the full regularity of the true
            // convolution instead of the breakpoints of a fixed-node rule.
            let cuts = shift_cuts(inner, *eps_support, to_f64(&x.re));
            let mut num = CVal::zero(p);
            let mut den = rf(0.0, p);
            for pair in cuts.windows(2) {
                let (alphas, wtheta) =
                    bump_rule(ctx, *eps_support, *quadrature_nodes, pair[0], pair[1], p);
                for (alpha, wt) in alphas.iter().zip(wtheta.iter()) {
                    let shifted = x.sub(&CVal::from_f64(*alpha, 0.0, p), p);
                    let v = eval_function(ctx, inner, &shifted, p)?;
                    num = num.add(&v.mul_real(wt, p), p);
                    den = den.add(wt, p, RM);
                }
            }
            num.div(&CVal::real(den, p), p)
        }
        FunctionSpec::Primitive { inner, a0 } => eval_primitive(ctx, inner, *a0, x, p)?,
        FunctionSpec::ProductWithIdentity { inner } => {
            let v = eval_function(ctx, inner, x, p)?;
            x.mul(&v, p)
        }
    };
    v.check_finite("eval_function")
}

fn select_piece(pieces: &[Piece], re: f64) -> Result<&Piece> {
    for piece in pieces {
        match piece.end {
            None => return Ok(piece),
            Some(e) if re < e => return Ok(piece),
            _ => {}
        }
    }
    Err(Error::domain(format!(
        "argument with real part {re} is past the last breakpoint"
    )))
}

fn horner(coeffs: &[(f64, f64)], x: &CVal, p: usize) -> CVal {
    let mut acc = CVal::zero(p);
    for (re, im) in coeffs.iter().rev() {
        acc = acc.mul(x, p).add(&CVal::from_f64(*re, *im, p), p);
    }
    acc
}

/// Breakpoints the spec is glued at, recursing through the wrapper kinds;
/// the entire-line kinds contribute none.
fn inner_breakpoints(f: &FunctionSpec) -> Vec<f64> {
    match f {
        FunctionSpec::PiecewisePoly { pieces } => pieces.iter().filter_map(|p| p.end).collect(),
        FunctionSpec::ProductWithIdentity { inner }
        | FunctionSpec::Primitive { inner, .. }
        | FunctionSpec::Convolved { inner, .. } => inner_breakpoints(inner),
        FunctionSpec::ExpLinear { .. } | FunctionSpec::Named { .. } => Vec::new(),
    }
}

/// Panel boundaries for the shift integral over `[0, eps]`: 0, eps and
/// every interior point where `alpha -> inner(x - alpha)` changes pieces.
fn shift_cuts(inner: &FunctionSpec, eps: f64, xr: f64) -> Vec<f64> {
    let mut cuts = alloc::vec![0.0];
    for e in inner_breakpoints(inner) {
        let t = xr - e;
        if t > 0.0 && t < eps {
            cuts.push(t);
        }
    }
    cuts.push(eps);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts
}

/// Quadrature data of the bump `theta(alpha) = exp(-1/(alpha(eps-alpha)))`
/// on the panel `[lo, hi]` of `[0, eps]`: nodes and weighted bump values at
/// width `p`. Cached per `(eps, nodes, panel, p)`.
fn bump_rule(
    ctx: &mut NumCtx,
    eps: f64,
    nodes: u32,
    lo: f64,
    hi: f64,
    p: usize,
) -> (Vec<f64>, Vec<astro_float::BigFloat>) {
    let key = (eps.to_bits(), nodes, lo.to_bits(), hi.to_bits(), p);
    if !ctx.bump_cache.contains_key(&key) {
        let (alphas, weights) = gauss_legendre_on(nodes as usize, lo, hi);
        let mut wtheta = Vec::with_capacity(alphas.len());
        let eps_b = rf(eps, p);
        for (alpha, w) in alphas.iter().zip(weights.iter()) {
            let a = rf(*alpha, p);
            let t = a.mul(&eps_b.sub(&a, p, RM), p, RM);
            let mut arg = rf(1.0, p).div(&t, p, RM);
            arg.inv_sign();
            let theta = arg.exp(p, RM, &mut ctx.cc);
            wtheta.push(theta.mul(&rf(*w, p), p, RM));
        }
        ctx.bump_cache.insert(key, wtheta);
    }
    let (alphas, _) = gauss_legendre_on(nodes as usize, lo, hi);
    (alphas, ctx.bump_cache.get(&key).unwrap().clone())
}

/// `integral of inner from a0 to x`, analytic where the inner kind admits an
/// exact antiderivative and by refined quadrature otherwise.
fn eval_primitive(
    ctx: &mut NumCtx,
    inner: &FunctionSpec,
    a0: f64,
    x: &CVal,
    p: usize,
) -> Result<CVal> {
    match inner {
        FunctionSpec::PiecewisePoly { pieces } => {
            let anti = piecewise_antiderivative(pieces);
            let upper = eval_function(ctx, &anti, x, p)?;
            let lower = eval_function(ctx, &anti, &CVal::from_f64(a0, 0.0, p), p)?;
            Ok(upper.sub(&lower, p))
        }
        FunctionSpec::ExpLinear { lambda } => {
            if lambda.0 == 0.0 && lambda.1 == 0.0 {
                return Ok(x.sub(&CVal::from_f64(a0, 0.0, p), p));
            }
            let l = CVal::from_f64(lambda.0, lambda.1, p);
            let upper = l.mul(x, p).exp(p, ctx);
            let lower = l.mul(&CVal::from_f64(a0, 0.0, p), p).exp(p, ctx);
            Ok(upper.sub(&lower, p).div(&l, p))
        }
        FunctionSpec::Named { name } => {
            let lo = CVal::from_f64(a0, 0.0, p);
            Ok(match name {
                NamedFunction::Exp => x.exp(p, ctx).sub(&lo.exp(p, ctx), p),
                NamedFunction::Sin => lo.cos(p, ctx).sub(&x.cos(p, ctx), p),
                NamedFunction::Cos => x.sin(p, ctx).sub(&lo.sin(p, ctx), p),
            })
        }
        FunctionSpec::ProductWithIdentity { inner: g } => {
            if let FunctionSpec::PiecewisePoly { .. } = **g {
                let folded = g.times_identity();
                eval_primitive(ctx, &folded, a0, x, p)
            } else {
                quadrature_primitive(ctx, inner, a0, x, p)
            }
        }
        FunctionSpec::Convolved {
            inner: g,
            eps_support,
            quadrature_nodes,
        } => {
            // Swap the convolution and the primitive: the integral of the
            // smoothed function is the same bump average of shifted inner
            // primitives, which keeps the evaluation exact in depth.
            let cuts = shift_cuts(g, *eps_support, to_f64(&x.re));
            let mut num = CVal::zero(p);
            let mut den = rf(0.0, p);
            for pair in cuts.windows(2) {
                let (alphas, wtheta) =
                    bump_rule(ctx, *eps_support, *quadrature_nodes, pair[0], pair[1], p);
                for (alpha, wt) in alphas.iter().zip(wtheta.iter()) {
                    let shifted = x.sub(&CVal::from_f64(*alpha, 0.0, p), p);
                    let v = eval_primitive(ctx, g, a0 - alpha, &shifted, p)?;
                    num = num.add(&v.mul_real(wt, p), p);
                    den = den.add(wt, p, RM);
                }
            }
            Ok(num.div(&CVal::real(den, p), p))
        }
        FunctionSpec::Primitive { .. } => quadrature_primitive(ctx, inner, a0, x, p),
    }
}

/// Composite Gauss-Legendre along the straight segment from `a0` to `x`,
/// refined by doubling until two successive levels agree.
fn quadrature_primitive(
    ctx: &mut NumCtx,
    f: &FunctionSpec,
    a0: f64,
    x: &CVal,
    p: usize,
) -> Result<CVal> {
    let delta = x.sub(&CVal::from_f64(a0, 0.0, p), p);
    let mut prev: Option<CVal> = None;
    let mut segments = 4usize;
    loop {
        let mut acc = CVal::zero(p);
        let (nodes, weights) = gauss_legendre_on(16, 0.0, 1.0);
        for s in 0..segments {
            let lo = s as f64 / segments as f64;
            let width = 1.0 / segments as f64;
            for (t, w) in nodes.iter().zip(weights.iter()) {
                let u = lo + width * t;
                let point = CVal::from_f64(a0, 0.0, p).add(&delta.mul_real(&rf(u, p), p), p);
                let v = eval_function(ctx, f, &point, p)?;
                acc = acc.add(&v.mul_real(&rf(w * width, p), p), p);
            }
        }
        let integral = acc.mul(&delta, p);
        if let Some(prev) = &prev {
            let diff = integral.sub(prev, p).abs_f64(p);
            let scale = integral.abs_f64(p).max(1.0);
            if diff <= 1e-24 * scale || segments >= 256 {
                return Ok(integral);
            }
        }
        prev = Some(integral);
        segments *= 2;
    }
}

/// Continuous antiderivative of a piecewise polynomial (additive constant
/// fixed by zero at the leading piece).
fn piecewise_antiderivative(pieces: &[Piece]) -> FunctionSpec {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    let mut constant = (0.0f64, 0.0f64);
    for (i, piece) in pieces.iter().enumerate() {
        let mut coeffs = Vec::with_capacity(piece.coeffs.len() + 1);
        coeffs.push(constant);
        for (k, (re, im)) in piece.coeffs.iter().enumerate() {
            let d = (k + 1) as f64;
            coeffs.push((re / d, im / d));
        }
        if let Some(e) = piece.end {
            // Choose the next constant so the antiderivative is continuous
            // across the breakpoint.
            let here = poly_eval_f64(&coeffs, e);
            if i + 1 < pieces.len() {
                let next = &pieces[i + 1];
                let mut raw = alloc::vec![(0.0, 0.0)];
                for (k, (re, im)) in next.coeffs.iter().enumerate() {
                    let d = (k + 1) as f64;
                    raw.push((re / d, im / d));
                }
                let there = poly_eval_f64(&raw, e);
                constant = (here.0 - there.0, here.1 - there.1);
            }
        }
        out.push(Piece {
            end: piece.end,
            coeffs,
        });
    }
    FunctionSpec::PiecewisePoly { pieces: out }
}

fn poly_eval_f64(coeffs: &[(f64, f64)], x: f64) -> (f64, f64) {
    let mut acc = (0.0f64, 0.0f64);
    for (re, im) in coeffs.iter().rev() {
        acc = (acc.0 * x + re, acc.1 * x + im);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_real(ctx: &mut NumCtx, f: &FunctionSpec, x: f64) -> f64 {
        let v = eval_function(ctx, f, &CVal::from_f64(x, 0.0, 96), 96).unwrap();
        v.to_f64_pair().0
    }

    #[test]
    fn kantorovich_pieces() {
        let f = FunctionSpec::PiecewisePoly {
            pieces: alloc::vec![
                Piece {
                    end: Some(0.5),
                    coeffs: alloc::vec![(1.0, 0.0), (-2.0, 0.0)],
                },
                Piece {
                    end: None,
                    coeffs: alloc::vec![(-1.0, 0.0), (2.0, 0.0)],
                },
            ],
        };
        f.validate().unwrap();
        let mut ctx = NumCtx::new();
        assert_eq!(eval_real(&mut ctx, &f, 0.25), 0.5);
        assert_eq!(eval_real(&mut ctx, &f, 0.5), 0.0);
    }

    #[test]
    fn exp_linear_at_zero() {
        let f = FunctionSpec::ExpLinear { lambda: (0.0, 1.0) };
        let mut ctx = NumCtx::new();
        let v = eval_function(&mut ctx, &f, &CVal::zero(96), 96).unwrap();
        assert_eq!(v.to_f64_pair(), (1.0, 0.0));
    }

    #[test]
    fn primitive_of_linear() {
        let f = FunctionSpec::Primitive {
            inner: Box::new(FunctionSpec::poly(&[0.0, 2.0])),
            a0: 0.0,
        };
        let mut ctx = NumCtx::new();
        let v = eval_real(&mut ctx, &f, 1.5);
        assert!((v - 2.25).abs() < 1e-15);
    }

    #[test]
    fn json_schema_round_trip() {
        let f = FunctionSpec::PiecewisePoly {
            pieces: alloc::vec![
                Piece {
                    end: Some(0.5),
                    coeffs: alloc::vec![(1.0, 0.0), (-2.0, 0.0)],
                },
                Piece {
                    end: None,
                    coeffs: alloc::vec![(-1.0, 0.0), (2.0, 0.0)],
                },
            ],
        };
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"kind\":\"piecewise_poly\""));
        assert!(s.contains("\"end\":null"));
        assert!(s.contains("[1.0,0.0]"));
        let back: FunctionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
