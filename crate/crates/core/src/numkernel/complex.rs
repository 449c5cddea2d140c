use astro_float::BigFloat;

use super::error::Result;
use super::real::{ensure_finite, rf, to_f64, NumCtx, RM};

/// Extended-precision complex value at a policy-determined width.
///
/// All operations are pure; the precision argument `p` is the mantissa width
/// of the result. Finiteness is checked at operation boundaries via
/// [`CVal::check_finite`].
#[derive(Debug, Clone)]
pub struct CVal {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl CVal {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        CVal { re, im }
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        CVal::new(rf(re, p), rf(im, p))
    }

    pub fn zero(p: usize) -> Self {
        CVal::from_f64(0.0, 0.0, p)
    }

    pub fn one(p: usize) -> Self {
        CVal::from_f64(1.0, 0.0, p)
    }

    pub fn real(re: BigFloat, p: usize) -> Self {
        CVal::new(re, rf(0.0, p))
    }

    pub fn add(&self, o: &CVal, p: usize) -> CVal {
        CVal::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM))
    }

    pub fn sub(&self, o: &CVal, p: usize) -> CVal {
        CVal::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM))
    }

    pub fn mul(&self, o: &CVal, p: usize) -> CVal {
        let re = self
            .re
            .mul(&o.re, p, RM)
            .sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self
            .re
            .mul(&o.im, p, RM)
            .add(&self.im.mul(&o.re, p, RM), p, RM);
        CVal::new(re, im)
    }

    pub fn mul_real(&self, s: &BigFloat, p: usize) -> CVal {
        CVal::new(self.re.mul(s, p, RM), self.im.mul(s, p, RM))
    }

    pub fn div(&self, o: &CVal, p: usize) -> CVal {
        let d = o
            .re
            .mul(&o.re, p, RM)
            .add(&o.im.mul(&o.im, p, RM), p, RM);
        let re = self
            .re
            .mul(&o.re, p, RM)
            .add(&self.im.mul(&o.im, p, RM), p, RM)
            .div(&d, p, RM);
        let im = self
            .im
            .mul(&o.re, p, RM)
            .sub(&self.re.mul(&o.im, p, RM), p, RM)
            .div(&d, p, RM);
        CVal::new(re, im)
    }

    pub fn neg(&self) -> CVal {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.inv_sign();
        im.inv_sign();
        CVal::new(re, im)
    }

    pub fn conj(&self) -> CVal {
        let mut im = self.im.clone();
        im.inv_sign();
        CVal::new(self.re.clone(), im)
    }

    /// Integer power by binary exponentiation at full width.
    pub fn powi(&self, mut n: u32, p: usize) -> CVal {
        let mut base = self.clone();
        let mut acc = CVal::one(p);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    /// Complex exponential: `e^{re} (cos im + i sin im)`.
    pub fn exp(&self, p: usize, ctx: &mut NumCtx) -> CVal {
        let r = self.re.exp(p, RM, &mut ctx.cc);
        let c = self.im.cos(p, RM, &mut ctx.cc);
        let s = self.im.sin(p, RM, &mut ctx.cc);
        CVal::new(r.mul(&c, p, RM), r.mul(&s, p, RM))
    }

    /// Complex cosine: `cos x cosh y - i sin x sinh y` for `x + iy`.
    pub fn cos(&self, p: usize, ctx: &mut NumCtx) -> CVal {
        let re = self
            .re
            .cos(p, RM, &mut ctx.cc)
            .mul(&self.im.cosh(p, RM, &mut ctx.cc), p, RM);
        let mut im = self
            .re
            .sin(p, RM, &mut ctx.cc)
            .mul(&self.im.sinh(p, RM, &mut ctx.cc), p, RM);
        im.inv_sign();
        CVal::new(re, im)
    }

    /// Complex sine: `sin x cosh y + i cos x sinh y` for `x + iy`.
    pub fn sin(&self, p: usize, ctx: &mut NumCtx) -> CVal {
        let re = self
            .re
            .sin(p, RM, &mut ctx.cc)
            .mul(&self.im.cosh(p, RM, &mut ctx.cc), p, RM);
        let im = self
            .re
            .cos(p, RM, &mut ctx.cc)
            .mul(&self.im.sinh(p, RM, &mut ctx.cc), p, RM);
        CVal::new(re, im)
    }

    /// `|self|` as a real.
    pub fn abs(&self, p: usize) -> BigFloat {
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
            .sqrt(p, RM)
    }

    pub fn abs_f64(&self, p: usize) -> f64 {
        to_f64(&self.abs(p))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }

    pub fn check_finite(self, what: &str) -> Result<CVal> {
        ensure_finite(&self.re, what)?;
        ensure_finite(&self.im, what)?;
        Ok(self)
    }
}

/// `e^{i theta}` for real `theta`.
pub fn cis(theta: &BigFloat, p: usize, ctx: &mut NumCtx) -> CVal {
    CVal::new(theta.cos(p, RM, &mut ctx.cc), theta.sin(p, RM, &mut ctx.cc))
}
