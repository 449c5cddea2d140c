//! Verification harness for the translation-commuting limit property: the
//! weighted sums `sum_nu C_nu(N,a) psi(a' + h_nu)` must converge to
//! `psi(a + a')` over a two-parameter grid, uniformly across perturbation
//! families. Also the three property-preserving constructions (bump
//! smoothing, multiplication by the identity map, primitivization) together
//! with their exact recursion identities as computable residuals, and a
//! polynomial-extrapolation probe separating analytic from merely smooth
//! targets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::numkernel::quadrature::gauss_legendre_on;
use crate::numkernel::{
    binomial_row, biguint_to_bigfloat, check_bits, eval_function, required_bits, rf,
    CVal, Error, FunctionSpec, NumCtx, PrecisionMode, PrecisionPolicy, Result, RM,
};
use crate::sampling::EpsilonSpec;

/// Grid points closer than this to the boundary of the admissible set are
/// dropped: the limit statements hold on compact subsets of the open set.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// Open interval of length greater than two carrying the two-parameter
/// admissible set `{(a, a'): a' + [-1, 1] inside, a + a' inside}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainA {
    pub lo: f64,
    pub hi: f64,
}

impl DomainA {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(hi - lo > 2.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain("interval length must exceed 2"));
        }
        Ok(DomainA { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo + BOUNDARY_MARGIN && x < self.hi - BOUNDARY_MARGIN
    }

    /// Shift admissibility: `a' + [-1, 1]` must stay inside the interval.
    pub fn admissible_shift(&self, a_prime: f64) -> bool {
        self.contains(a_prime - 1.0) && self.contains(a_prime + 1.0)
    }

    pub fn contains_pair(&self, a: f64, a_prime: f64) -> bool {
        self.admissible_shift(a_prime) && self.contains(a + a_prime)
    }

    /// Axis-aligned grid of admissible `(a, a')` pairs at integer multiples
    /// of `step`.
    pub fn grid(&self, step: f64) -> Result<Vec<(f64, f64)>> {
        if !(step > 0.0) {
            return Err(Error::domain("grid step must be positive"));
        }
        let mut pts = Vec::new();
        let ks = |lo: f64, hi: f64| {
            let k0 = libm::ceil(lo / step) as i64;
            let k1 = libm::floor(hi / step) as i64;
            k0..=k1
        };
        for kp in ks(self.lo + 1.0, self.hi - 1.0) {
            let a_prime = kp as f64 * step;
            if !self.admissible_shift(a_prime) {
                continue;
            }
            for ka in ks(self.lo - a_prime, self.hi - a_prime) {
                let a = ka as f64 * step;
                if self.contains_pair(a, a_prime) {
                    pts.push((a, a_prime));
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::domain("step too coarse: empty grid"));
        }
        Ok(pts)
    }
}

impl EpsilonSpec {
    /// Stable report label matching the command-line syntax.
    pub fn label(&self) -> String {
        match self {
            EpsilonSpec::Zero => String::from("zero"),
            EpsilonSpec::COverN { c } => format!("c_over_N:{c}"),
            EpsilonSpec::COverSqrtN { c } => format!("c_over_sqrtN:{c}"),
            EpsilonSpec::COverLogN { c } => format!("c_over_logN:{c}"),
            EpsilonSpec::List { values } => format!("list({} values)", values.len()),
        }
    }
}

/// One ladder rung: sup errors per perturbation family and their maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub n: u32,
    pub per_family: BTreeMap<String, f64>,
    pub family_max: f64,
}

/// Full report of one harness run. The verdict applies the shared ladder
/// policy (strict decrease of `family_max`, reduction at least 4 across an
/// 8-fold degree span) to the worst family at each degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupershiftReport {
    pub domain: (f64, f64),
    pub grid: String,
    pub ladder: Vec<LadderEntry>,
    pub verdict: bool,
    pub thresholds: String,
    pub bits_used: usize,
    /// The certification covers exactly the listed families, nothing more.
    pub families: Vec<String>,
}

/// Working width for one `(N, family)` block over the whole grid: binomial
/// cancellation grows like `max(1,|a|)^N`, plus the shared guard.
fn block_bits(n: u32, max_abs_a: f64, policy: &PrecisionPolicy) -> Result<usize> {
    policy.validate()?;
    let bits = match policy.mode {
        PrecisionMode::Fixed => policy.fixed_bits,
        PrecisionMode::Automatic => required_bits(n, libm::log2(max_abs_a.max(1.0)), policy),
    };
    check_bits(bits)
}

/// Binomial-weight coefficients `C(N, nu) ((1+a)/2)^(N-nu) ((1-a)/2)^nu`
/// for all `nu` at width `p`.
fn coeff_row(n: u32, a: f64, p: usize) -> Vec<BigFloat> {
    let one = rf(1.0, p);
    let half = rf(0.5, p);
    let b1 = one.add(&rf(a, p), p, RM).mul(&half, p, RM);
    let b2 = one.sub(&rf(a, p), p, RM).mul(&half, p, RM);
    let binoms = binomial_row(n);
    let mut pow1 = Vec::with_capacity(n as usize + 1);
    pow1.push(one.clone());
    for k in 1..=n as usize {
        pow1.push(pow1[k - 1].mul(&b1, p, RM));
    }
    let mut pow2 = one;
    let mut out = Vec::with_capacity(n as usize + 1);
    for nu in 0..=n {
        out.push(
            biguint_to_bigfloat(&binoms[nu as usize], p)
                .mul(&pow1[(n - nu) as usize], p, RM)
                .mul(&pow2, p, RM),
        );
        if nu < n {
            pow2 = pow2.mul(&b2, p, RM);
        }
    }
    out
}

/// Grid frequencies `a' + h_nu` with `h_nu` formed at width `p`.
fn shifted_nodes(n: u32, eps_n: f64, a_prime: f64, p: usize) -> Vec<BigFloat> {
    let one = rf(1.0, p);
    let two = rf(2.0, p);
    let nb = rf(n as f64, p);
    let eb = rf(eps_n, p);
    let ap = rf(a_prime, p);
    (0..=n)
        .map(|nu| {
            let nub = rf(nu as f64, p);
            let t = eb.mul(&nb.sub(&nub, p, RM), p, RM).add(&nub, p, RM);
            let h = one.sub(&t.mul(&two, p, RM).div(&nb, p, RM), p, RM);
            ap.add(&h, p, RM)
        })
        .collect()
}

/// Harness run: for every degree in the ladder and every family, the sup
/// over the grid of `|sum_nu C_nu(N,a) psi(a' + h_nu) - psi(a + a')|`.
pub fn tcsp_check(
    psi: &FunctionSpec,
    dom: &DomainA,
    grid: &[(f64, f64)],
    n_ladder: &[u32],
    families: &[EpsilonSpec],
    policy: &PrecisionPolicy,
    ctx: &mut NumCtx,
) -> Result<SupershiftReport> {
    psi.validate()?;
    if grid.is_empty() || n_ladder.is_empty() || families.is_empty() {
        return Err(Error::domain("grid, ladder and families must be nonempty"));
    }
    for &(a, a_prime) in grid {
        if !dom.contains_pair(a, a_prime) {
            return Err(Error::domain(format!(
                "grid point (a={a}, a'={a_prime}) outside the admissible set"
            )));
        }
    }
    let max_abs_a = grid.iter().map(|(a, _)| a.abs()).fold(0.0, f64::max);
    let mut ladder = Vec::with_capacity(n_ladder.len());
    let mut bits_used = 0usize;
    for &n in n_ladder {
        let p = block_bits(n, max_abs_a, policy)?;
        bits_used = bits_used.max(p);
        let mut per_family = BTreeMap::new();
        let mut family_max = 0.0f64;
        for family in families {
            let eps_n = family.eps_at(n)?;
            // Values of psi at the shifted nodes depend only on a', the
            // coefficients only on a; cache both across the grid.
            let mut psi_cache: BTreeMap<u64, Vec<CVal>> = BTreeMap::new();
            let mut coeff_cache: BTreeMap<u64, Vec<BigFloat>> = BTreeMap::new();
            let mut sup = 0.0f64;
            for &(a, a_prime) in grid {
                if !psi_cache.contains_key(&a_prime.to_bits()) {
                    let vals = shifted_nodes(n, eps_n, a_prime, p)
                        .into_iter()
                        .map(|x| eval_function(ctx, psi, &CVal::real(x, p), p))
                        .collect::<Result<Vec<_>>>()?;
                    psi_cache.insert(a_prime.to_bits(), vals);
                }
                let coeffs = coeff_cache
                    .entry(a.to_bits())
                    .or_insert_with(|| coeff_row(n, a, p));
                let vals = psi_cache.get(&a_prime.to_bits()).unwrap();
                let mut acc = CVal::zero(p);
                for (c, v) in coeffs.iter().zip(vals.iter()) {
                    acc = acc.add(&v.mul_real(c, p), p);
                }
                let target =
                    eval_function(ctx, psi, &CVal::from_f64(a + a_prime, 0.0, p), p)?;
                sup = sup.max(acc.sub(&target, p).abs_f64(p));
            }
            family_max = family_max.max(sup);
            per_family.insert(family.label(), sup);
        }
        ladder.push(LadderEntry {
            n,
            per_family,
            family_max,
        });
    }
    let maxima: Vec<f64> = ladder.iter().map(|e| e.family_max).collect();
    let decreasing = maxima.windows(2).all(|w| w[1] < w[0]);
    let span = *n_ladder.last().unwrap() as f64 / n_ladder[0] as f64;
    let reduction = if *maxima.last().unwrap() > 0.0 {
        maxima[0] / maxima.last().unwrap()
    } else {
        f64::INFINITY
    };
    let verdict = decreasing && (span < 8.0 || reduction >= 4.0);
    Ok(SupershiftReport {
        domain: (dom.lo, dom.hi),
        grid: format!("{} admissible (a, a') pairs", grid.len()),
        ladder,
        verdict,
        thresholds: String::from(
            "strict decrease of family_max; reduction >= 4 across an 8x degree span; \
             certification restricted to the listed families",
        ),
        bits_used,
        families: families.iter().map(|f| f.label()).collect(),
    })
}

/// Bump smoothing `a -> (psi * theta)(a)` with the bump supported in
/// `[0, eps_support]`; the support must fit inside the domain slack.
pub fn convolve(
    psi: &FunctionSpec,
    dom: &DomainA,
    eps_support: f64,
    quadrature_nodes: u32,
) -> Result<FunctionSpec> {
    if !(eps_support > 0.0 && eps_support < dom.length() - 2.0) {
        return Err(Error::domain(format!(
            "support {eps_support} must lie in (0, {})",
            dom.length() - 2.0
        )));
    }
    let spec = FunctionSpec::Convolved {
        inner: alloc::boxed::Box::new(psi.clone()),
        eps_support,
        quadrature_nodes,
    };
    spec.validate()?;
    Ok(spec)
}

/// `a -> a psi(a)`, folded into the piecewise representation when possible.
pub fn multiply_by_identity(psi: &FunctionSpec) -> FunctionSpec {
    psi.times_identity()
}

/// `a -> integral of psi from a0 to a`; the base point must lie in the
/// domain.
pub fn primitive(psi: &FunctionSpec, dom: &DomainA, a0: f64) -> Result<FunctionSpec> {
    if !dom.contains(a0) {
        return Err(Error::domain(format!("base point {a0} outside the domain")));
    }
    let spec = FunctionSpec::Primitive {
        inner: alloc::boxed::Box::new(psi.clone()),
        a0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Weight sum `sum C(N,nu) b^nu (1-b)^(N-nu) f(points[nu])` for real `b`.
fn weighted_sum(
    f: &FunctionSpec,
    n: u32,
    b: f64,
    points: &[BigFloat],
    p: usize,
    ctx: &mut NumCtx,
) -> Result<CVal> {
    let bb = rf(b, p);
    let mb = rf(1.0, p).sub(&bb, p, RM);
    let binoms = binomial_row(n);
    let mut pow_b = Vec::with_capacity(n as usize + 1);
    pow_b.push(rf(1.0, p));
    for k in 1..=n as usize {
        pow_b.push(pow_b[k - 1].mul(&bb, p, RM));
    }
    let mut pow_m = Vec::with_capacity(n as usize + 1);
    pow_m.push(rf(1.0, p));
    for k in 1..=n as usize {
        pow_m.push(pow_m[k - 1].mul(&mb, p, RM));
    }
    let mut acc = CVal::zero(p);
    for nu in 0..=n as usize {
        let w = biguint_to_bigfloat(&binoms[nu], p)
            .mul(&pow_b[nu], p, RM)
            .mul(&pow_m[n as usize - nu], p, RM);
        let v = eval_function(ctx, f, &CVal::real(points[nu].clone(), p), p)?;
        acc = acc.add(&v.mul_real(&w, p), p);
    }
    Ok(acc)
}

/// Equally spaced points `start + j * rate` for `j = 0..=n`, with `rate =
/// (1 - eps_n)/n` formed at width `p` and `start = b_prime + offset * rate`.
fn rate_points(n: u32, eps_n: f64, b_prime: f64, offset: u32, count: u32, p: usize) -> Vec<BigFloat> {
    let rate = rf(1.0, p)
        .sub(&rf(eps_n, p), p, RM)
        .div(&rf(n as f64, p), p, RM);
    let start = rf(b_prime, p);
    (0..=count)
        .map(|j| {
            let steps = rf((offset + j) as f64, p);
            start.add(&steps.mul(&rate, p, RM), p, RM)
        })
        .collect()
}

/// Residual of the multiplication recursion: the level-`N` sum of
/// `x psi(x)` equals `(1-eps_N) b` times the level-`(N-1)` sum of `psi`
/// started one rate step later, plus `b'` times the level-`N` sum of `psi`.
/// Exact identity; the return value is rounding noise.
pub fn multiplication_recursion_residual(
    psi: &FunctionSpec,
    n: u32,
    eps_n: f64,
    b: f64,
    b_prime: f64,
    bits: usize,
    ctx: &mut NumCtx,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("degree must be at least 2"));
    }
    let p = check_bits(bits.max(53))?;
    let phi = multiply_by_identity(psi);
    let points_n = rate_points(n, eps_n, b_prime, 0, n, p);
    let lhs = weighted_sum(&phi, n, b, &points_n, p, ctx)?;
    // Level N-1 with the same absolute step, starting at b' + rate.
    let shifted = rate_points(n, eps_n, b_prime, 1, n - 1, p);
    let lower = weighted_sum(psi, n - 1, b, &shifted, p, ctx)?;
    let same = weighted_sum(psi, n, b, &points_n, p, ctx)?;
    let factor = rf(1.0, p).sub(&rf(eps_n, p), p, RM).mul(&rf(b, p), p, RM);
    let rhs = lower
        .mul_real(&factor, p)
        .add(&same.mul_real(&rf(b_prime, p), p), p);
    Ok(lhs.sub(&rhs, p).abs_f64(p))
}

/// Residual of the primitivization identity: the `b`-derivative of the
/// level-`N` sum of `phi` (any primitive of `psi`) equals `(1-eps_N)` times
/// the unit-interval integral (in the offset `xi`) of the level-`(N-1)` sum
/// of `psi` started at `b'0 + xi * rate`. The derivative is taken through
/// the exact polynomial weights; the integral uses a fixed 16-node rule, so
/// the residual bottoms out at the rule's native accuracy, not at the
/// working width.
#[allow(clippy::too_many_arguments)]
pub fn primitive_derivative_residual(
    psi: &FunctionSpec,
    phi: &FunctionSpec,
    n: u32,
    eps_n: f64,
    b: f64,
    b_prime0: f64,
    bits: usize,
    ctx: &mut NumCtx,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("degree must be at least 2"));
    }
    let p = check_bits(bits.max(53))?;
    let points_n = rate_points(n, eps_n, b_prime0, 0, n, p);
    // d/db of sum C(N,nu) b^nu (1-b)^(N-nu) Phi_nu via the difference form:
    // N sum C(N-1,nu) b^nu (1-b)^(N-1-nu) (Phi_{nu+1} - Phi_nu).
    let m = n - 1;
    let bb = rf(b, p);
    let mb = rf(1.0, p).sub(&bb, p, RM);
    let binoms = binomial_row(m);
    let phi_vals: Vec<CVal> = points_n
        .iter()
        .map(|x| eval_function(ctx, phi, &CVal::real(x.clone(), p), p))
        .collect::<Result<_>>()?;
    let mut pow_b = Vec::with_capacity(m as usize + 1);
    pow_b.push(rf(1.0, p));
    for k in 1..=m as usize {
        pow_b.push(pow_b[k - 1].mul(&bb, p, RM));
    }
    let mut pow_m = Vec::with_capacity(m as usize + 1);
    pow_m.push(rf(1.0, p));
    for k in 1..=m as usize {
        pow_m.push(pow_m[k - 1].mul(&mb, p, RM));
    }
    let mut lhs = CVal::zero(p);
    for nu in 0..=m as usize {
        let w = biguint_to_bigfloat(&binoms[nu], p)
            .mul(&pow_b[nu], p, RM)
            .mul(&pow_m[m as usize - nu], p, RM);
        let d = phi_vals[nu + 1].sub(&phi_vals[nu], p);
        lhs = lhs.add(&d.mul_real(&w, p), p);
    }
    lhs = lhs.mul_real(&rf(n as f64, p), p);

    let (xis, ws) = gauss_legendre_on(16, 0.0, 1.0);
    let rate = rf(1.0, p)
        .sub(&rf(eps_n, p), p, RM)
        .div(&rf(n as f64, p), p, RM);
    let mut rhs = CVal::zero(p);
    for (xi, w) in xis.iter().zip(ws.iter()) {
        let start = rf(b_prime0, p).add(&rf(*xi, p).mul(&rate, p, RM), p, RM);
        let points: Vec<BigFloat> = (0..=m)
            .map(|j| start.add(&rf(j as f64, p).mul(&rate, p, RM), p, RM))
            .collect();
        let s = weighted_sum(psi, m, b, &points, p, ctx)?;
        rhs = rhs.add(&s.mul_real(&rf(*w, p), p), p);
    }
    rhs = rhs.mul_real(&rf(1.0, p).sub(&rf(eps_n, p), p, RM), p);
    Ok(lhs.sub(&rhs, p).abs_f64(p))
}

/// Outcome of the polynomial-extrapolation probe. This is a numeric
/// surrogate for analyticity, not a proof: a degree-8 least-squares fit on
/// one side of the probed point is evaluated on the other side, and a
/// mismatch far above the fit residual flags a non-analytic target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityProbe {
    pub fit_residual: f64,
    pub extrapolation_error: f64,
    pub ratio: f64,
    pub looks_analytic: bool,
    pub note: String,
}

pub const PROBE_DEGREE: usize = 8;
pub const PROBE_POINTS: usize = 32;
/// Extrapolation mismatch at least this many times the fit residual flags
/// non-analyticity.
pub const PROBE_RATIO: f64 = 10.0;

fn solve_normal_equations(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return Err(Error::domain("degenerate least-squares system"));
        }
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for k in col + 1..n {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Ok(x)
}

/// Fits on `fit_interval`, extrapolates onto `test_interval`; both are real
/// intervals and should sit on opposite sides of the probed point.
pub fn analyticity_probe(
    psi: &FunctionSpec,
    fit_interval: (f64, f64),
    test_interval: (f64, f64),
    ctx: &mut NumCtx,
) -> Result<AnalyticityProbe> {
    if !(fit_interval.1 > fit_interval.0) || !(test_interval.1 > test_interval.0) {
        return Err(Error::domain("probe intervals must be nondegenerate"));
    }
    let value = |x: f64, ctx: &mut NumCtx| -> Result<f64> {
        let v = eval_function(ctx, psi, &CVal::from_f64(x, 0.0, 128), 128)?;
        Ok(v.to_f64_pair().0)
    };
    // Chebyshev basis scaled to the fit interval: near-orthogonal columns on
    // the fit points keep the normal equations well conditioned. On the test
    // side the basis leaves [-1, 1] and grows, so coefficient noise is
    // amplified there; the noise floor accounts for that growth instead of
    // pretending extrapolation is as accurate as interpolation.
    let mid = 0.5 * (fit_interval.0 + fit_interval.1);
    let half = 0.5 * (fit_interval.1 - fit_interval.0);
    let deg = PROBE_DEGREE;
    let basis = move |x: f64| {
        let t = (x - mid) / half;
        let mut vals = alloc::vec![1.0; deg + 1];
        if deg >= 1 {
            vals[1] = t;
        }
        for k in 2..=deg {
            vals[k] = 2.0 * t * vals[k - 1] - vals[k - 2];
        }
        vals
    };

    let npts = PROBE_POINTS;
    let mut xs = Vec::with_capacity(npts);
    let mut ys = Vec::with_capacity(npts);
    for i in 0..npts {
        let x = fit_interval.0
            + (fit_interval.1 - fit_interval.0) * i as f64 / (npts - 1) as f64;
        xs.push(x);
        ys.push(value(x, ctx)?);
    }
    let mut m = alloc::vec![alloc::vec![0.0; deg + 1]; deg + 1];
    let mut rhs = alloc::vec![0.0; deg + 1];
    for (x, y) in xs.iter().zip(ys.iter()) {
        let vals = basis(*x);
        for i in 0..=deg {
            rhs[i] += vals[i] * y;
            for j in 0..=deg {
                m[i][j] += vals[i] * vals[j];
            }
        }
    }
    let coeffs = solve_normal_equations(m, rhs)?;
    let fit = |x: f64| {
        basis(x)
            .iter()
            .zip(coeffs.iter())
            .map(|(v, c)| v * c)
            .sum::<f64>()
    };
    let fit_residual = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (fit(*x) - y).abs())
        .fold(0.0, f64::max);
    let y_scale = ys.iter().fold(1.0f64, |acc, y| acc.max(y.abs()));
    let mut extrapolation_error = 0.0f64;
    let mut amplification = 1.0f64;
    for i in 0..npts {
        let x = test_interval.0
            + (test_interval.1 - test_interval.0) * i as f64 / (npts - 1) as f64;
        extrapolation_error = extrapolation_error.max((fit(x) - value(x, ctx)?).abs());
        amplification = amplification.max(basis(x).iter().map(|v| v.abs()).sum());
    }
    let floor = fit_residual.max(1e-14 * y_scale) * amplification;
    let ratio = extrapolation_error / floor;
    Ok(AnalyticityProbe {
        fit_residual,
        extrapolation_error,
        ratio,
        looks_analytic: ratio < PROBE_RATIO,
        note: String::from(
            "polynomial-extrapolation surrogate; flags non-analyticity, does not prove it",
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn auto() -> PrecisionPolicy {
        PrecisionPolicy::automatic()
    }

    #[test]
    fn domain_and_grid() {
        let d = DomainA::new(-2.5, 2.5).unwrap();
        assert!(d.contains_pair(1.0, 0.5));
        assert!(!d.contains_pair(1.0, 1.6));
        assert!(!d.contains_pair(3.0, -0.25));
        let grid = d.grid(0.5).unwrap();
        assert!(grid.iter().all(|&(a, ap)| d.contains_pair(a, ap)));
        assert!(grid.len() > 20);
        assert!(DomainA::new(0.0, 1.5).is_err());
    }

    #[test]
    fn constant_target_is_exact() {
        let mut ctx = NumCtx::new();
        let d = DomainA::new(-2.5, 2.5).unwrap();
        let psi = FunctionSpec::constant(2.5);
        let grid = [(1.5, 0.5), (-2.0, 0.0), (0.25, -1.25)];
        let r = tcsp_check(
            &psi,
            &d,
            &grid,
            &[5, 10],
            &[EpsilonSpec::Zero, EpsilonSpec::COverN { c: 1.0 }],
            &auto(),
            &mut ctx,
        )
        .unwrap();
        for entry in &r.ladder {
            assert!(entry.family_max < 1e-25, "residual {}", entry.family_max);
        }
    }

    #[test]
    fn linear_target_reproduces_under_zero_eps() {
        let mut ctx = NumCtx::new();
        let d = DomainA::new(-2.5, 2.5).unwrap();
        let psi = FunctionSpec::poly(&[0.0, 1.0]);
        let grid = [(1.5, 0.5), (-1.0, -0.5)];
        let r = tcsp_check(&psi, &d, &grid, &[6, 11], &[EpsilonSpec::Zero], &auto(), &mut ctx)
            .unwrap();
        for entry in &r.ladder {
            assert!(entry.family_max < 1e-25);
        }
        // Nonzero perturbation leaves an O(eps_N) bias for the linear map.
        let r = tcsp_check(
            &psi,
            &d,
            &grid,
            &[6, 11],
            &[EpsilonSpec::COverN { c: 1.0 }],
            &auto(),
            &mut ctx,
        )
        .unwrap();
        for entry in &r.ladder {
            let eps = 1.0 / entry.n as f64;
            assert!(entry.family_max > 0.01 * eps && entry.family_max < 10.0 * eps);
        }
    }

    #[test]
    fn entire_target_ladder_passes() {
        let mut ctx = NumCtx::new();
        let d = DomainA::new(-2.5, 2.5).unwrap();
        let psi = FunctionSpec::ExpLinear { lambda: (0.3, 0.0) };
        let grid = d.grid(1.0).unwrap();
        let r = tcsp_check(
            &psi,
            &d,
            &grid,
            &[25, 50, 100, 200],
            &[EpsilonSpec::Zero, EpsilonSpec::COverN { c: 1.0 }],
            &auto(),
            &mut ctx,
        )
        .unwrap();
        assert!(r.verdict, "ladder {:?}", r.ladder);
    }

    #[test]
    fn smoothing_normalization_and_mean() {
        let mut ctx = NumCtx::new();
        let d = DomainA::new(-1.15, 1.15).unwrap();
        let smoothed_one =
            convolve(&FunctionSpec::constant(1.0), &d, 0.1, 64).unwrap();
        let v = eval_function(&mut ctx, &smoothed_one, &CVal::from_f64(0.3, 0.0, 96), 96)
            .unwrap();
        assert!((v.to_f64_pair().0 - 1.0).abs() < 1e-25);

        // Smoothing the identity map subtracts the bump mean.
        let smoothed_id =
            convolve(&FunctionSpec::poly(&[0.0, 1.0]), &d, 0.1, 64).unwrap();
        let v = eval_function(&mut ctx, &smoothed_id, &CVal::from_f64(0.3, 0.0, 96), 96)
            .unwrap();
        // Bump mean by the same rule at 4x the node count.
        let (alphas, ws) = gauss_legendre_on(256, 0.0, 0.1);
        let theta = |al: f64| libm::exp(-1.0 / (al * (0.1 - al)));
        let z: f64 = alphas.iter().zip(&ws).map(|(a, w)| w * theta(*a)).sum();
        let mean: f64 = alphas.iter().zip(&ws).map(|(a, w)| w * theta(*a) * a).sum::<f64>() / z;
        assert!((v.to_f64_pair().0 - (0.3 - mean)).abs() < 1e-10);

        assert!(convolve(&FunctionSpec::constant(1.0), &d, 0.5, 64).is_err());
    }

    #[test]
    fn identity_multiplication_folds_to_monomials() {
        let mut f = FunctionSpec::constant(1.0);
        for _ in 0..4 {
            f = multiply_by_identity(&f);
        }
        let mut ctx = NumCtx::new();
        let v = eval_function(&mut ctx, &f, &CVal::from_f64(1.5, 0.0, 96), 96).unwrap();
        assert!((v.to_f64_pair().0 - 5.0625).abs() < 1e-25);
    }

    #[test]
    fn primitive_small_cases() {
        let d = DomainA::new(-2.5, 2.5).unwrap();
        let mut ctx = NumCtx::new();
        let p1 = primitive(&FunctionSpec::constant(1.0), &d, 0.0).unwrap();
        let v = eval_function(&mut ctx, &p1, &CVal::from_f64(1.25, 0.0, 96), 96).unwrap();
        assert!((v.to_f64_pair().0 - 1.25).abs() < 1e-25);

        let p2 = primitive(&FunctionSpec::poly(&[0.0, 2.0]), &d, 0.0).unwrap();
        let v = eval_function(&mut ctx, &p2, &CVal::from_f64(1.5, 0.0, 96), 96).unwrap();
        assert!((v.to_f64_pair().0 - 2.25).abs() < 1e-25);

        assert!(primitive(&FunctionSpec::constant(1.0), &d, 3.0).is_err());
    }

    #[test]
    fn multiplication_recursion_is_exact() {
        let mut ctx = NumCtx::new();
        let cubic = FunctionSpec::poly(&[0.7, -1.3, 0.2, 2.1]);
        for (n, eps, b, bp) in [
            (10u32, 0.05, 0.6, 0.1),
            (2, 0.0, 0.9, -0.2),
            (17, 0.3, 0.0, 0.4),
        ] {
            let r =
                multiplication_recursion_residual(&cubic, n, eps, b, bp, 160, &mut ctx).unwrap();
            assert!(r <= libm::exp2(16.0 - 160.0) * 10.0, "residual {r:e}");
        }
        let one = FunctionSpec::constant(1.0);
        let r = multiplication_recursion_residual(&one, 2, 0.1, 0.5, 0.25, 128, &mut ctx).unwrap();
        assert!(r < 1e-30);
    }

    #[test]
    fn primitive_derivative_identity() {
        let mut ctx = NumCtx::new();
        let prim = |f: &FunctionSpec, a0: f64| FunctionSpec::Primitive {
            inner: alloc::boxed::Box::new(f.clone()),
            a0,
        };
        let zero = FunctionSpec::constant(0.0);
        let r = primitive_derivative_residual(
            &zero,
            &prim(&zero, 0.0),
            5,
            0.1,
            0.3,
            0.0,
            128,
            &mut ctx,
        )
        .unwrap();
        assert_eq!(r, 0.0);

        // The unit-interval integral uses fixed f64 nodes and weights, so
        // the residual floor sits at the rule's accuracy, not the working
        // width.
        let one = FunctionSpec::constant(1.0);
        let r = primitive_derivative_residual(
            &one,
            &prim(&one, 0.1),
            2,
            0.05,
            0.7,
            0.1,
            128,
            &mut ctx,
        )
        .unwrap();
        assert!(r < 1e-13, "residual {r:e}");

        let quad = FunctionSpec::poly(&[0.4, -1.0, 2.5]);
        let r = primitive_derivative_residual(
            &quad,
            &prim(&quad, -0.1),
            8,
            0.02,
            0.45,
            -0.1,
            160,
            &mut ctx,
        )
        .unwrap();
        assert!(r < 1e-13, "residual {r:e}");
    }

    #[test]
    fn probe_separates_smooth_from_analytic() {
        let mut ctx = NumCtx::new();
        let d = DomainA::new(-1.15, 1.15).unwrap();
        // |a| glued at 0, then smoothed: smooth but not analytic near 0.
        let kink = FunctionSpec::PiecewisePoly {
            pieces: alloc::vec![
                crate::numkernel::Piece {
                    end: Some(0.0),
                    coeffs: alloc::vec![(0.0, 0.0), (-1.0, 0.0)],
                },
                crate::numkernel::Piece {
                    end: None,
                    coeffs: alloc::vec![(0.0, 0.0), (1.0, 0.0)],
                },
            ],
        };
        let smoothed = convolve(&kink, &d, 0.1, 64).unwrap();
        let probe =
            analyticity_probe(&smoothed, (-0.5, -0.01), (0.11, 0.5), &mut ctx).unwrap();
        assert!(!probe.looks_analytic, "ratio {}", probe.ratio);

        // A polynomial control must pass.
        let poly = FunctionSpec::poly(&[0.3, -0.4, 0.9, 0.02]);
        let probe = analyticity_probe(&poly, (-0.5, -0.01), (0.11, 0.5), &mut ctx).unwrap();
        assert!(probe.looks_analytic, "ratio {}", probe.ratio);
    }
}
