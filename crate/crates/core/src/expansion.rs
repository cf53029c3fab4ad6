//! The exact rational coefficients D_l and J_l, the Hardy-Ramanujan
//! leading term, and the two asymptotic expansions for p(n):
//!
//!   simplified:  (2 pi^2 / 3 sqrt 3) e^{r_n} / (1+2 r_n)^2
//!                  * (1 - sum_{l=1}^{N} D_l / (1+2 r_n)^l)
//!   full:        e^{r_n} L_n^{3/2} / (sqrt 2 pi sqrt(1+2 c_n^2))
//!                  * (1 - sum_{l=1}^{N} D_l / (1+2 c_n^2)^l)
//!
//! The coefficients are kept as exact rationals until evaluation: the
//! alternating finite sum defining them cancels catastrophically in
//! floating point for moderate l.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::BigCount;
use crate::numerics::{ensure_finite, fixed_point_string, HPReal, PrecisionContext};
use crate::saddle::{r_of_n, solve_tn, SaddleState};

/// Exact rational expansion coefficient (reduced, positive denominator).
pub type RationalCoeff = Rational;

/// Coefficient index cap; the published table needs only l <= 17.
pub const MAX_COEFF_INDEX: u32 = 64;

/// Which expansion produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionKind {
    Simplified,
    Full,
    HardyRamanujan,
}

impl ExpansionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExpansionKind::Simplified => "simplified",
            ExpansionKind::Full => "full",
            ExpansionKind::HardyRamanujan => "hardy_ramanujan",
        }
    }
}

/// Value of an expansion at (n, N) plus its per-term breakdown.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub n: u64,
    pub order: u32,
    pub kind: ExpansionKind,
    pub value: HPReal,
    /// The N individual contributions D_l / (1 + 2x)^l, all positive.
    pub terms: Vec<HPReal>,
    /// Nearest integer, ties rounded away from zero.
    pub rounded: BigCount,
    pub ratio_to_exact: Option<HPReal>,
}

impl ExpansionResult {
    /// Attaches rounded / exact as the comparison ratio.
    pub fn with_ratio_to_exact(mut self, exact: &BigCount, ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits();
        let ratio = Float::with_val(bits, &self.rounded) / Float::with_val(bits, exact);
        self.ratio_to_exact = Some(ratio);
        self
    }

    /// JSON with exact decimal strings for `rounded` and fixed-point
    /// strings for `value`/`ratio` (numbers beyond double precision must
    /// not be emitted as JSON numbers).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "N": self.order,
            "kind": self.kind.as_str(),
            "value": fixed_point_string(&self.value, 19),
            "rounded": self.rounded.to_string(),
            "ratio": self.ratio_to_exact.as_ref().map(|r| fixed_point_string(r, 19)),
        })
    }
}

fn check_coeff_index(l: u32) -> Result<()> {
    if l == 0 {
        return Err(Error::Domain("coefficient index must be >= 1".into()));
    }
    if l > MAX_COEFF_INDEX {
        return Err(Error::ResourceLimit(format!(
            "coefficient index {l} exceeds cap {MAX_COEFF_INDEX}"
        )));
    }
    Ok(())
}

/// J_l = ((l+1)!/4^l) sum_{k=0}^{l+1} (-1)^k 2^k binom(2l,k) / (l+1-k)!,
/// the 2l-th derivative of e^{x/2}(1-x)^{l+1} at 0, as an exact rational.
pub fn j_coeff(l: u32) -> Result<RationalCoeff> {
    check_coeff_index(l)?;
    let sum = alternating_sum(l);
    let lead = Rational::from((
        Integer::from(Integer::factorial(l + 1)),
        Integer::from(4u32).pow(l),
    ));
    Ok(lead * sum)
}

/// D_l = (-1)^{l+1} ((l+1)/4^l) sum_{k=0}^{l+1} (-1)^k 2^k binom(2l,k)
/// / (l+1-k)!, exact; equals (-1)^{l+1} J_l / l!.
pub fn d_coeff(l: u32) -> Result<RationalCoeff> {
    check_coeff_index(l)?;
    let sum = alternating_sum(l);
    let sign = if l % 2 == 0 { -1i32 } else { 1i32 };
    let lead = Rational::from((
        Integer::from(l + 1) * sign,
        Integer::from(4u32).pow(l),
    ));
    Ok(lead * sum)
}

/// sum_{k=0}^{l+1} (-1)^k 2^k binom(2l,k) / (l+1-k)!
fn alternating_sum(l: u32) -> Rational {
    let mut sum = Rational::new();
    for k in 0..=l + 1 {
        let num = Integer::from(Integer::binomial_u(2 * l, k)) << k;
        let den = Integer::from(Integer::factorial(l + 1 - k));
        let term = Rational::from((num, den));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

fn round_nearest(value: &Float) -> BigCount {
    // MPFR round = nearest with ties away from zero
    Float::with_val(value.prec(), value.round_ref())
        .to_integer()
        .expect("finite expansion value")
}

/// Hardy-Ramanujan leading term e^{sqrt(2 pi^2 n / 3)} / (4 n sqrt 3).
pub fn hardy_ramanujan(n: u64, ctx: &PrecisionContext) -> Result<ExpansionResult> {
    if n == 0 {
        return Err(Error::Domain("hardy_ramanujan requires n >= 1".into()));
    }
    let bits = ctx.bits();
    let pi_sq = Float::with_val(bits, ctx.pi().square_ref());
    let arg = (Float::with_val(bits, 2 * &pi_sq) * Float::with_val(bits, n) / 3u32).sqrt();
    let denom = Float::with_val(bits, 3u32).sqrt() * Float::with_val(bits, 4 * Float::with_val(bits, n));
    let value = ensure_finite(arg.exp() / denom, "hardy_ramanujan")?;
    let rounded = round_nearest(&value);
    Ok(ExpansionResult {
        n,
        order: 0,
        kind: ExpansionKind::HardyRamanujan,
        value,
        terms: Vec::new(),
        rounded,
        ratio_to_exact: None,
    })
}

/// The per-term contributions D_l / (1 + 2x)^l for l = 1..=order.
fn series_terms(x_plus: &Float, order: u32, ctx: &PrecisionContext) -> Result<Vec<HPReal>> {
    let bits = ctx.bits();
    let inv = Float::with_val(bits, x_plus.recip_ref());
    let mut pow = Float::with_val(bits, 1u32);
    let mut terms = Vec::with_capacity(order as usize);
    for l in 1..=order {
        pow *= &inv;
        let d = d_coeff(l)?;
        terms.push(Float::with_val(bits, &pow * Float::with_val(bits, d)));
    }
    Ok(terms)
}

fn one_minus_sum(terms: &[Float], bits: u32) -> Float {
    let mut s = Float::with_val(bits, 1u32);
    for t in terms {
        s -= t;
    }
    s
}

/// Simplified expansion around the rational surrogate r_n.
pub fn p_approx_simple(n: u64, order: u32, ctx: &PrecisionContext) -> Result<ExpansionResult> {
    if n == 0 {
        return Err(Error::Domain("p_approx_simple requires n >= 1".into()));
    }
    if order > MAX_COEFF_INDEX {
        return Err(Error::ResourceLimit(format!(
            "expansion order {order} exceeds cap {MAX_COEFF_INDEX}"
        )));
    }
    let bits = ctx.bits();
    let r = r_of_n(n, ctx);
    let x_plus = Float::with_val(bits, 2 * &r) + 1u32;
    let terms = series_terms(&x_plus, order, ctx)?;
    let series = one_minus_sum(&terms, bits);
    let pi_sq = Float::with_val(bits, ctx.pi().square_ref());
    let prefactor = Float::with_val(bits, 2 * &pi_sq)
        / (Float::with_val(bits, 3u32) * Float::with_val(bits, 3u32).sqrt())
        * Float::with_val(bits, r.exp_ref())
        / Float::with_val(bits, x_plus.square_ref());
    let value = ensure_finite(prefactor * series, "p_approx_simple")?;
    let rounded = round_nearest(&value);
    Ok(ExpansionResult {
        n,
        order,
        kind: ExpansionKind::Simplified,
        value,
        terms,
        rounded,
        ratio_to_exact: None,
    })
}

/// Full expansion in 1 + 2 c_n^2, using a freshly solved saddle state.
pub fn p_approx_full(n: u64, order: u32, ctx: &PrecisionContext) -> Result<ExpansionResult> {
    let state = solve_tn(n, ctx)?;
    p_approx_full_with_state(&state, order, ctx)
}

/// Full expansion from a precomputed saddle state (batching over n).
pub fn p_approx_full_with_state(
    state: &SaddleState,
    order: u32,
    ctx: &PrecisionContext,
) -> Result<ExpansionResult> {
    if order > MAX_COEFF_INDEX {
        return Err(Error::ResourceLimit(format!(
            "expansion order {order} exceeds cap {MAX_COEFF_INDEX}"
        )));
    }
    let bits = ctx.bits();
    let x_plus = Float::with_val(bits, 2 * &state.c_n_sq) + 1u32;
    let terms = series_terms(&x_plus, order, ctx)?;
    let series = one_minus_sum(&terms, bits);
    let l_pow = Float::with_val(bits, state.l_n.clone().pow(3u32)).sqrt();
    let denom = Float::with_val(bits, 2u32).sqrt()
        * ctx.pi()
        * Float::with_val(bits, x_plus.sqrt_ref());
    let prefactor = Float::with_val(bits, state.r_n.exp_ref()) * l_pow / denom;
    let value = ensure_finite(prefactor * series, "p_approx_full")?;
    let rounded = round_nearest(&value);
    Ok(ExpansionResult {
        n: state.n,
        order,
        kind: ExpansionKind::Full,
        value,
        terms,
        rounded,
        ratio_to_exact: None,
    })
}

/// Diagnostic exposure of the N individual terms D_l/(1+2x)^l, where x is
/// r_n (simplified) or c_n^2 (full); empty for the Hardy-Ramanujan term.
pub fn expansion_term_table(
    n: u64,
    order: u32,
    kind: ExpansionKind,
    ctx: &PrecisionContext,
) -> Result<Vec<HPReal>> {
    match kind {
        ExpansionKind::Simplified => Ok(p_approx_simple(n, order, ctx)?.terms),
        ExpansionKind::Full => Ok(p_approx_full(n, order, ctx)?.terms),
        ExpansionKind::HardyRamanujan => Ok(Vec::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::partition_exact;
    use crate::numerics::context_for_n;

    #[test]
    fn j_and_d_small_values() {
        assert_eq!(j_coeff(1).unwrap(), Rational::from((1, 4)));
        assert_eq!(d_coeff(1).unwrap(), Rational::from((1, 4)));
        // J_2 is negative with |J_2| <= (2l)!/(2^{l-1}(l-1)!) = 12
        let j2 = j_coeff(2).unwrap();
        assert!(j2 < 0);
        assert!(j2.clone().abs() <= 12);
    }

    #[test]
    fn sign_pattern_and_identity() {
        for l in 1..=30u32 {
            let j = j_coeff(l).unwrap();
            let d = d_coeff(l).unwrap();
            // (-1)^l J_l <= 0
            let signed = if l % 2 == 0 { j.clone() } else { -j.clone() };
            assert!(signed <= 0, "l={l}");
            // D_l = (-1)^{l+1} J_l / l!
            let expect = {
                let mut v = j / Integer::from(Integer::factorial(l));
                if l % 2 == 0 {
                    v = -v;
                }
                v
            };
            assert_eq!(d, expect, "l={l}");
            // 0 < D_l < 2 * 3^{l-1}
            assert!(d > 0, "l={l}");
            assert!(d < Rational::from(Integer::from(3u32).pow(l - 1) * 2u32), "l={l}");
        }
    }

    #[test]
    fn d17_denominator_structure() {
        let d = d_coeff(17).unwrap();
        // denominator divides 4^17 * 18!
        let cap = Integer::from(4u32).pow(17) * Integer::from(Integer::factorial(18));
        assert!(cap.is_divisible(d.denom()));
    }

    #[test]
    fn coefficient_caps() {
        assert!(j_coeff(0).is_err());
        assert!(j_coeff(65).is_err());
        assert!(d_coeff(65).is_err());
    }

    #[test]
    fn hardy_ramanujan_accuracy() {
        let ctx = context_for_n(100, 0);
        let hr = hardy_ramanujan(100, &ctx).unwrap();
        let exact = partition_exact(100);
        let ratio = Float::with_val(ctx.bits(), &hr.value) / Float::with_val(ctx.bits(), &exact);
        let err100 = (ratio.to_f64() - 1.0).abs();
        assert!(err100 < 0.05, "ratio error {err100}");

        let ctx = context_for_n(1000, 0);
        let hr = hardy_ramanujan(1000, &ctx).unwrap();
        let exact = partition_exact(1000);
        let ratio =
            Float::with_val(ctx.bits(), &hr.value) / Float::with_val(ctx.bits(), &exact);
        let err1000 = (ratio.to_f64() - 1.0).abs();
        assert!(err1000 < err100, "no improvement: {err1000} vs {err100}");

        assert!(hardy_ramanujan(10, &ctx).unwrap().value > 0u32);
    }

    #[test]
    fn simplified_reproduces_table_rows() {
        let ctx = context_for_n(200, 17);
        let r = p_approx_simple(200, 17, &ctx).unwrap();
        assert_eq!(r.rounded.to_string(), "3972998993186");

        let ctx = context_for_n(10, 17);
        let r = p_approx_simple(10, 17, &ctx).unwrap();
        assert_eq!(r.rounded, 42);

        let ctx = context_for_n(51, 17);
        let exact = partition_exact(51);
        let r = p_approx_simple(51, 17, &ctx)
            .unwrap()
            .with_ratio_to_exact(&exact, &ctx);
        assert_eq!(r.rounded, 239_959);
        let ratio = r.ratio_to_exact.unwrap().to_f64();
        assert!((ratio - 1.0000666825).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn full_expansion_behaviour() {
        // leading factor only, small n
        let ctx = context_for_n(10, 0);
        let r = p_approx_full(10, 0, &ctx).unwrap();
        let ratio = r.value.to_f64() / 42.0;
        assert!((ratio - 1.0).abs() < 0.03, "N=0 ratio {ratio}");

        // the series is asymptotic: at fixed n the error falls with N until
        // it hits the remainder floor, so compare against a low order only
        let ctx = context_for_n(100, 17);
        let exact = Float::with_val(ctx.bits(), partition_exact(100));
        let err = |order: u32| {
            let v = p_approx_full(100, order, &ctx).unwrap().value;
            Float::with_val(ctx.bits(), &v - &exact).abs().to_f64()
        };
        assert!(err(17) < err(1));
        assert!(err(3) < err(1));

        // comparable accuracy to the simplified form at n=500
        let ctx = context_for_n(500, 17);
        let exact = Float::with_val(ctx.bits(), partition_exact(500));
        let full_err = {
            let v = p_approx_full(500, 17, &ctx).unwrap().value;
            (Float::with_val(ctx.bits(), &v - &exact).abs() / &exact).to_f64()
        };
        let simple_err = {
            let v = p_approx_simple(500, 17, &ctx).unwrap().value;
            (Float::with_val(ctx.bits(), &v - &exact).abs() / &exact).to_f64()
        };
        assert!(full_err <= simple_err * 10.0, "full {full_err} simple {simple_err}");
    }

    #[test]
    fn term_table_positive_and_decaying() {
        let ctx = context_for_n(1000, 17);
        let terms = expansion_term_table(1000, 17, ExpansionKind::Simplified, &ctx).unwrap();
        assert_eq!(terms.len(), 17);
        assert!(terms.iter().all(|t| *t > 0u32));
        for w in terms.windows(2) {
            assert!(w[1] < w[0], "terms not decaying");
        }
        // term_1 = (1/4)/(1+2 r_1000)
        let r = r_of_n(1000, &ctx);
        let expect = (Float::with_val(ctx.bits(), 2 * &r) + 1u32).recip() / 4u32;
        let diff = Float::with_val(ctx.bits(), &terms[0] - &expect).abs();
        assert!(diff <= ctx.rel_tol());

        assert!(
            expansion_term_table(5, 3, ExpansionKind::HardyRamanujan, &ctx)
                .unwrap()
                .is_empty()
        );
    }
}
