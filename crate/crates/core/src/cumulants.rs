//! log f(t), the cumulants kappa_j(t) and their exponentially small
//! correction terms E_j(t).
//!
//! Every quantity has two evaluation routes: a direct series, convergent for
//! t in (0,1) but slow as t -> 1, and a functional (modular) equation that
//! maps the argument to the dual point e^{-4pi^2/|log t|}. The switch point
//! is the self-dual t* = e^{-2pi}, which guarantees the dual argument is
//! always <= t*, where direct series converge in a handful of terms.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::eulerian::eulerian_poly;
use crate::numerics::{ensure_finite, HPReal, PrecisionContext};

/// Which route produced a cumulant value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    DirectSeries,
    FunctionalEquation,
}

/// kappa_j evaluated at t, tagged with the route that ran.
#[derive(Debug, Clone)]
pub struct CumulantValue {
    pub order: u32,
    pub t: HPReal,
    pub value: HPReal,
    pub method: EvalMethod,
}

/// log f(t) together with the E_0(t) term actually used.
#[derive(Debug, Clone)]
pub struct LogFValue {
    pub t: HPReal,
    pub value: HPReal,
    pub e0: HPReal,
}

/// The self-dual point e^{-2pi}, fixed point of L <-> 4pi^2/L.
pub fn self_dual_point(ctx: &PrecisionContext) -> HPReal {
    let pi = ctx.pi();
    Float::with_val(ctx.bits(), -2 * pi).exp()
}

fn check_unit_interval(t: &Float, what: &str) -> Result<()> {
    if !t.is_finite() || t.is_sign_negative() && !t.is_zero() || *t >= 1u32 {
        return Err(Error::Domain(format!("{what} requires t in [0,1), got {t}")));
    }
    Ok(())
}

/// |log t| for t in (0,1).
pub fn abs_log(t: &Float, ctx: &PrecisionContext) -> HPReal {
    Float::with_val(ctx.bits(), t.ln_ref()).abs()
}

/// The dual argument e^{-4pi^2/L}.
pub fn dual_argument(l: &Float, ctx: &PrecisionContext) -> HPReal {
    let bits = ctx.bits();
    let pi = ctx.pi();
    let num = Float::with_val(bits, pi.square_ref()) * 4u32;
    Float::with_val(bits, -num / l).exp()
}

/// Sums `term_at(l, t^l)` for l = 1, 2, ... with a certified stopping rule:
/// once consecutive terms decay faster than ratio (1+t)/2, the geometric
/// tail bound with that ratio is applied against the context tolerance.
/// Terms must be positive and eventually dominated by that geometric decay,
/// which holds for all series here (polynomial-in-l numerators, t^l decay).
fn certified_sum<F>(ctx: &PrecisionContext, t: &Float, mut term_at: F) -> Result<HPReal>
where
    F: FnMut(u64, &Float) -> Float,
{
    let bits = ctx.bits();
    let mut sum = Float::new(bits);
    let mut tpow = Float::with_val(bits, 1u32);
    let mut prev: Option<Float> = None;
    let ratio = Float::with_val(bits, 1u32 + t) / 2u32;
    let one_minus_ratio = Float::with_val(bits, 1u32 - &ratio);
    let tol = ctx.series_tol();
    for l in 1..=ctx.max_series_terms() as u64 {
        tpow *= t;
        let term = term_at(l, &tpow);
        if !term.is_finite() {
            return Err(Error::NonFinite("series term".into()));
        }
        sum += &term;
        if term.is_zero() {
            return Ok(sum);
        }
        if let Some(p) = &prev {
            let decayed = Float::with_val(bits, &term / p) <= ratio;
            if decayed {
                let tail = Float::with_val(bits, &term * &ratio) / &one_minus_ratio;
                let threshold = Float::with_val(bits, &sum * &tol);
                if tail <= threshold {
                    return Ok(sum);
                }
            }
        }
        prev = Some(term);
    }
    Err(Error::Convergence {
        terms: ctx.max_series_terms(),
    })
}

/// Partial sum of log f(t) = sum_{l>=1} t^l / (l (1 - t^l)) with the tail
/// bound below context tolerance.
pub fn log_f_direct(t: &HPReal, ctx: &PrecisionContext) -> Result<HPReal> {
    check_unit_interval(t, "log_f_direct")?;
    if t.is_zero() {
        return Ok(Float::new(ctx.bits()));
    }
    let bits = ctx.bits();
    certified_sum(ctx, t, |l, tl| {
        let denom = Float::with_val(bits, 1u32 - tl) * l;
        Float::with_val(bits, tl / denom)
    })
}

/// log f(t) by the functional equation
///   log f(t) = pi^2/(6L) - log sqrt(2 pi) - L/24 + (1/2) log L + E_0(t),
/// L = |log t|, with E_0(t) = log f at the dual argument, summed directly.
/// Below the self-dual point the direct series is used instead (the e0
/// field still carries the identity-consistent dual value).
pub fn log_f(t: &HPReal, ctx: &PrecisionContext) -> Result<LogFValue> {
    check_unit_interval(t, "log_f")?;
    if t.is_zero() {
        let z = Float::new(ctx.bits());
        return Ok(LogFValue {
            t: t.clone(),
            value: z.clone(),
            e0: z,
        });
    }
    let bits = ctx.bits();
    let l = abs_log(t, ctx);
    let dual = dual_argument(&l, ctx);
    let e0 = log_f_direct(&dual, ctx)?;
    let t_star = self_dual_point(ctx);
    let value = if *t >= t_star {
        let pi = ctx.pi();
        let pi_sq = Float::with_val(bits, pi.square_ref());
        let two_pi = Float::with_val(bits, 2 * &pi);
        let mut v = Float::with_val(bits, &pi_sq / Float::with_val(bits, 6 * &l));
        v -= Float::with_val(bits, two_pi.ln_ref()) / 2u32;
        v -= Float::with_val(bits, &l / Float::with_val(bits, 24u32));
        v += Float::with_val(bits, l.ln_ref()) / 2u32;
        v += &e0;
        v
    } else {
        log_f_direct(t, ctx)?
    };
    Ok(LogFValue {
        t: t.clone(),
        value: ensure_finite(value, "log_f")?,
        e0,
    })
}

/// kappa_j(t) = sum_{l>=1} l^{j-1} A_j(t^l) / (1 - t^l)^{j+1}, direct.
pub fn kappa_direct(j: u32, t: &HPReal, ctx: &PrecisionContext) -> Result<CumulantValue> {
    if j == 0 {
        return Err(Error::Domain("cumulant order must be >= 1".into()));
    }
    check_unit_interval(t, "kappa_direct")?;
    let bits = ctx.bits();
    let value = if t.is_zero() {
        Float::new(bits)
    } else {
        let poly = eulerian_poly(j)?;
        certified_sum(ctx, t, |l, tl| {
            let num = poly.eval(tl, ctx) * Float::with_val(bits, l).pow(j - 1);
            let den = Float::with_val(bits, 1u32 - tl).pow(j + 1);
            Float::with_val(bits, num / den)
        })?
    };
    Ok(CumulantValue {
        order: j,
        t: t.clone(),
        value: ensure_finite(value, "kappa_direct")?,
        method: EvalMethod::DirectSeries,
    })
}

/// The alternative series kappa_j(t) = sum_{l>=1} l^j A_{j-1}(t^l) /
/// (1 - t^l)^j, valid for j >= 2; must agree with [`kappa_direct`].
pub fn kappa_direct_alt(j: u32, t: &HPReal, ctx: &PrecisionContext) -> Result<CumulantValue> {
    if j < 2 {
        return Err(Error::Domain(
            "alternative cumulant series requires order >= 2".into(),
        ));
    }
    check_unit_interval(t, "kappa_direct_alt")?;
    let bits = ctx.bits();
    let value = if t.is_zero() {
        Float::new(bits)
    } else {
        let poly = eulerian_poly(j - 1)?;
        certified_sum(ctx, t, |l, tl| {
            let num = poly.eval(tl, ctx) * Float::with_val(bits, l).pow(j);
            let den = Float::with_val(bits, 1u32 - tl).pow(j);
            Float::with_val(bits, num / den)
        })?
    };
    Ok(CumulantValue {
        order: j,
        t: t.clone(),
        value: ensure_finite(value, "kappa_direct_alt")?,
        method: EvalMethod::DirectSeries,
    })
}

/// E_j(t) for j >= 2:
///   (j-1)!/L^j * sum_{r=1}^{j} binom(j,r) (-4pi^2/L)^r kappa_r(dual)/(r-1)!
/// with the kappa_r at the dual argument summed directly (tiny argument).
pub fn e_term(j: u32, t: &HPReal, ctx: &PrecisionContext) -> Result<HPReal> {
    if j < 2 {
        return Err(Error::Domain("E_j terms are defined for j >= 2".into()));
    }
    check_unit_interval(t, "e_term")?;
    if t.is_zero() {
        return Err(Error::Domain("e_term requires t in (0,1)".into()));
    }
    let bits = ctx.bits();
    let l = abs_log(t, ctx);
    let dual = dual_argument(&l, ctx);
    let pi = ctx.pi();
    // -4pi^2/L
    let base = Float::with_val(bits, pi.square_ref()) * -4i32 / &l;
    let mut sum = Float::new(bits);
    let mut base_pow = Float::with_val(bits, 1u32);
    for r in 1..=j {
        base_pow *= &base;
        let kr = kappa_direct(r, &dual, ctx)?.value;
        let binom = Integer::from(Integer::binomial_u(j, r));
        let rm1_fact = Integer::from(Integer::factorial(r - 1));
        let term = Float::with_val(bits, &base_pow * &kr) * binom / rm1_fact;
        sum += term;
    }
    let jm1_fact = Integer::from(Integer::factorial(j - 1));
    let lead = Float::with_val(bits, jm1_fact) / Float::with_val(bits, (&l).pow(j));
    ensure_finite(Float::with_val(bits, lead * sum), "e_term")
}

/// kappa_j(t), switching to the functional equations above the self-dual
/// point: for j = 1,
///   kappa_1 = pi^2/(6L^2) - 1/(2L) + 1/24 - (4pi^2/L^2) kappa_1(dual);
/// for j >= 2,
///   kappa_j = pi^2 j!/(6 L^{j+1}) - (j-1)!/(2 L^j) + E_j(t).
pub fn kappa(j: u32, t: &HPReal, ctx: &PrecisionContext) -> Result<CumulantValue> {
    if j == 0 {
        return Err(Error::Domain("cumulant order must be >= 1".into()));
    }
    check_unit_interval(t, "kappa")?;
    if t.is_zero() || *t < self_dual_point(ctx) {
        return kappa_direct(j, t, ctx);
    }
    let bits = ctx.bits();
    let l = abs_log(t, ctx);
    let pi = ctx.pi();
    let pi_sq = Float::with_val(bits, pi.square_ref());
    let value = if j == 1 {
        let dual = dual_argument(&l, ctx);
        let k1_dual = kappa_direct(1, &dual, ctx)?.value;
        let l_sq = Float::with_val(bits, l.square_ref());
        let mut v = Float::with_val(bits, &pi_sq / Float::with_val(bits, 6 * &l_sq));
        v -= Float::with_val(bits, 2 * &l).recip();
        v += Float::with_val(bits, 1u32) / 24u32;
        v -= Float::with_val(bits, 4 * &pi_sq) / &l_sq * k1_dual;
        v
    } else {
        let j_fact = Integer::from(Integer::factorial(j));
        let jm1_fact = Integer::from(Integer::factorial(j - 1));
        let mut v = Float::with_val(bits, &pi_sq * Float::with_val(bits, j_fact))
            / (Float::with_val(bits, (&l).pow(j + 1)) * 6u32);
        v -= Float::with_val(bits, jm1_fact)
            / (Float::with_val(bits, (&l).pow(j)) * 2u32);
        v += e_term(j, t, ctx)?;
        v
    };
    Ok(CumulantValue {
        order: j,
        t: t.clone(),
        value: ensure_finite(value, "kappa")?,
        method: EvalMethod::FunctionalEquation,
    })
}

/// Standard deviation sqrt(kappa_2(t)).
pub fn sigma(t: &HPReal, ctx: &PrecisionContext) -> Result<HPReal> {
    let k2 = kappa(2, t, ctx)?;
    ensure_finite(k2.value.sqrt(), "sigma")
}
