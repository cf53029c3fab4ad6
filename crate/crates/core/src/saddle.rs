//! Solves kappa_1(t_n) = n for the saddle parameter t_n and assembles the
//! per-n quantities r_n, L_n = |log t_n|, c_n^2, lambda_n and the
//! diagnostic h_n, together with checks of their closed-form envelopes.

use rug::Float;

use crate::cumulants::{dual_argument, kappa, kappa_direct};
use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, HPReal, PrecisionContext};

/// Per-n bundle of saddle quantities.
#[derive(Debug, Clone)]
pub struct SaddleState {
    pub n: u64,
    /// Saddle parameter, the unique t in (0,1) with kappa_1(t) = n.
    pub t_n: HPReal,
    /// L_n = |log t_n|.
    pub l_n: HPReal,
    /// Closed-form surrogate sqrt((2 pi^2/3)(n - 1/24) + 1/4).
    pub r_n: HPReal,
    /// kappa_2(t_n).
    pub kappa2: HPReal,
    /// c_n^2 = kappa_2(t_n) L_n^2, the scaled variance.
    pub c_n_sq: HPReal,
    /// lambda_n = 1 + 1/(2 c_n^2).
    pub lambda_n: HPReal,
    /// Diagnostic h_n = kappa_1(e^{-4 pi^2 / L_n}), exponentially small.
    pub h_n: HPReal,
    /// Newton/bisection iterations the solver took.
    pub iterations: u32,
}

/// r_n = sqrt((2 pi^2 / 3)(n - 1/24) + 1/4).
pub fn r_of_n(n: u64, ctx: &PrecisionContext) -> HPReal {
    let bits = ctx.bits();
    let pi = ctx.pi();
    let pi_sq = Float::with_val(bits, pi.square_ref());
    let shifted = Float::with_val(bits, n) - Float::with_val(bits, 1u32) / 24u32;
    let mut v = Float::with_val(bits, 2 * &pi_sq) / 3u32 * shifted;
    v += Float::with_val(bits, 0.25);
    v.sqrt()
}

/// The rational surrogate 2 pi^2 / (3 (1 + 2 r_n)) for L_n.
pub fn log_tn_approx(n: u64, ctx: &PrecisionContext) -> HPReal {
    let bits = ctx.bits();
    let pi = ctx.pi();
    let pi_sq = Float::with_val(bits, pi.square_ref());
    let r = r_of_n(n, ctx);
    let denom = Float::with_val(bits, 2 * &r) + 1u32;
    Float::with_val(bits, 2 * &pi_sq) / (denom * 3u32)
}

const MAX_SOLVER_ITERATIONS: u32 = 300;

/// Finds t_n with |kappa_1(t_n) - n| <= 10^{-(digits-10)} n.
///
/// The search runs in L = |log t|, where kappa_1(e^{-L}) is smooth,
/// strictly decreasing and well scaled. Newton steps use dkappa_1/dL =
/// -kappa_2 (the recursion kappa_2 = t dkappa_1/dt), guarded by the bracket
/// 0 < L < pi/sqrt(6(n - 1/24)) with bisection as fallback.
pub fn solve_tn(n: u64, ctx: &PrecisionContext) -> Result<SaddleState> {
    if n == 0 {
        return Err(Error::Domain("saddle parameter requires n >= 1".into()));
    }
    let bits = ctx.bits();
    let nf = Float::with_val(bits, n);
    let tol = Float::with_val(bits, ctx.rel_tol() * &nf);

    // residual kappa_1(e^{-L}) - n, also returning kappa_2 for Newton
    let eval = |l: &Float| -> Result<(Float, Float)> {
        let t = Float::with_val(bits, l.as_neg().exp_ref());
        let k1 = kappa(1, &t, ctx)?.value;
        let k2 = kappa(2, &t, ctx)?.value;
        Ok((Float::with_val(bits, &k1 - &nf), k2))
    };

    // bracket from e^{-pi/sqrt(6(n-1/24))} < t_n < 1: L_n in (0, l_max)
    let shifted = Float::with_val(bits, &nf - Float::with_val(bits, 1u32) / 24u32);
    let mut hi = ctx.pi() / Float::with_val(bits, 6 * shifted).sqrt();
    let (res_hi, _) = eval(&hi)?;
    if res_hi > 0u32 {
        // cannot happen for the true kappa_1; guard against tolerance dust
        hi *= 2u32;
    }
    let mut lo = Float::with_val(bits, &hi / 4u32);
    loop {
        let (res, _) = eval(&lo)?;
        if res > 0u32 {
            break;
        }
        lo /= 2u32;
        if lo < Float::with_val(bits, 1e-300f64) {
            return Err(Error::Solver("failed to bracket the saddle point".into()));
        }
    }

    let mut l = log_tn_approx(n, ctx);
    if l <= lo || l >= hi {
        l = Float::with_val(bits, &lo + &hi) / 2u32;
    }
    let mut iterations = 0u32;
    loop {
        iterations += 1;
        if iterations > MAX_SOLVER_ITERATIONS {
            return Err(Error::Solver(format!(
                "saddle solver did not converge for n={n} within {MAX_SOLVER_ITERATIONS} iterations"
            )));
        }
        let (res, k2) = eval(&l)?;
        if Float::with_val(bits, res.abs_ref()) <= tol {
            break;
        }
        // maintain the bracket: kappa_1 decreases in L
        if res > 0u32 {
            lo = l.clone();
        } else {
            hi = l.clone();
        }
        let step = Float::with_val(bits, &res / &k2);
        let candidate = Float::with_val(bits, &l + &step);
        l = if candidate > lo && candidate < hi {
            candidate
        } else {
            Float::with_val(bits, &lo + &hi) / 2u32
        };
    }

    let t_n = Float::with_val(bits, l.as_neg().exp_ref());
    let r_n = r_of_n(n, ctx);
    let kappa2 = kappa(2, &t_n, ctx)?.value;
    let c_n_sq = Float::with_val(bits, &kappa2 * Float::with_val(bits, l.square_ref()));
    let lambda_n = Float::with_val(bits, 2 * &c_n_sq).recip() + 1u32;
    let h_n = kappa_direct(1, &dual_argument(&l, ctx), ctx)?.value;
    Ok(SaddleState {
        n,
        t_n: ensure_finite(t_n, "t_n")?,
        l_n: l,
        r_n,
        kappa2,
        c_n_sq: ensure_finite(c_n_sq, "c_n_sq")?,
        lambda_n,
        h_n,
        iterations,
    })
}

/// Residuals of the closed-form approximations for one n, next to the
/// published envelopes scaled by [`BOUND_CONSTANTS`]: |c_n^2 - r_n| vs
/// n e^{-2 pi sqrt(24n-1)}, |pi^2/(3 L_n) - (1/2 + r_n)| vs sqrt(n)
/// e^{...}, |L_n - 2 pi^2/(3(1+2 r_n))| vs e^{...}, and h_n vs 64 e^{...}.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: u64,
    pub residuals: [HPReal; 4],
    pub envelopes: [HPReal; 4],
    pub ratios: [HPReal; 4],
}

/// Residual labels, in the order used by [`BoundReport`].
pub const BOUND_NAMES: [&str; 4] = [
    "c_sq_minus_r",
    "pi2_over_3l_minus_half_plus_r",
    "logt_minus_rational",
    "h_n",
];

/// Pinned constants multiplying the published envelope shapes. The bounds
/// leave their constants unspecified except for h_n's 64. Measured ratios:
/// the first plateaus near 2.35 (the dominant residual term is
/// 16 pi^4 / L_n^2 * e^{-4 pi^2 / L_n} ~ 2.35 n e^{-2 pi sqrt(24n-1)}),
/// the second near 0.076, the third and fourth decay. 4 covers the first
/// with margin; the rest hold with constant 1.
pub const BOUND_CONSTANTS: [u32; 4] = [4, 1, 1, 1];

impl BoundReport {
    /// True iff every residual is within its scaled envelope.
    pub fn all_within(&self) -> bool {
        self.residuals
            .iter()
            .zip(&self.envelopes)
            .all(|(r, e)| r <= e)
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn named(vals: &[Float; 4]) -> serde_json::Value {
            serde_json::Value::Object(
                BOUND_NAMES
                    .iter()
                    .zip(vals)
                    .map(|(k, v)| {
                        (
                            k.to_string(),
                            serde_json::Value::String(format!("{:.20e}", v.to_f64())),
                        )
                    })
                    .collect(),
            )
        }
        serde_json::json!({
            "n": self.n,
            "residuals": named(&self.residuals),
            "envelopes": named(&self.envelopes),
            "ratios": named(&self.ratios),
            "all_within": self.all_within(),
        })
    }
}

/// Evaluates the four residual/envelope pairs at high precision.
///
/// The envelope e^{-2 pi sqrt(24n-1)} shrinks far faster than the digits a
/// magnitude-sized context carries, so the working precision is raised here
/// to resolve residuals of that size: 2 pi sqrt(24n-1) / ln 10 extra digits
/// on top of the caller's context.
pub fn verify_saddle_bounds(n: u64, ctx: &PrecisionContext) -> Result<BoundReport> {
    let envelope_digits = (2.0 * std::f64::consts::PI * ((24 * n - 1) as f64).sqrt()
        / std::f64::consts::LN_10)
        .ceil() as u32;
    let ctx = &ctx.escalated(envelope_digits);
    let bits = ctx.bits();
    let state = solve_tn(n, ctx)?;
    let pi = ctx.pi();
    let pi_sq = Float::with_val(bits, pi.square_ref());

    let res_c = Float::with_val(bits, &state.c_n_sq - &state.r_n).abs();
    let pi2_3l = Float::with_val(bits, &pi_sq / Float::with_val(bits, 3 * &state.l_n));
    let half_plus_r = Float::with_val(bits, &state.r_n + Float::with_val(bits, 0.5));
    let res_x = Float::with_val(bits, &pi2_3l - &half_plus_r).abs();
    let res_l = Float::with_val(bits, &state.l_n - &log_tn_approx(n, ctx)).abs();
    let res_h = state.h_n.clone();

    // e^{-2 pi sqrt(24n - 1)}
    let base = Float::with_val(bits, -2 * &pi)
        * Float::with_val(bits, 24 * Float::with_val(bits, n) - 1u32).sqrt();
    let envelope = base.exp();
    let sqrt_n = Float::with_val(bits, n).sqrt();
    let envelopes = [
        Float::with_val(bits, &envelope * Float::with_val(bits, n)) * BOUND_CONSTANTS[0],
        Float::with_val(bits, &envelope * &sqrt_n) * BOUND_CONSTANTS[1],
        Float::with_val(bits, &envelope * BOUND_CONSTANTS[2]),
        Float::with_val(bits, 64 * &envelope) * BOUND_CONSTANTS[3],
    ];
    let residuals = [res_c, res_x, res_l, res_h];
    let ratios = [
        Float::with_val(bits, &residuals[0] / &envelopes[0]),
        Float::with_val(bits, &residuals[1] / &envelopes[1]),
        Float::with_val(bits, &residuals[2] / &envelopes[2]),
        Float::with_val(bits, &residuals[3] / &envelopes[3]),
    ];
    Ok(BoundReport {
        n,
        residuals,
        envelopes,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::context_for_n;
    use rug::ops::Pow;

    #[test]
    fn r_of_n_examples() {
        let ctx = PrecisionContext::new(40);
        let r1 = r_of_n(1, &ctx).to_f64();
        assert!((r1 - 2.5604).abs() < 1e-3, "r_1 = {r1}");
        let r1000 = r_of_n(1000, &ctx).to_f64();
        assert!((r1000 - 81.11).abs() < 0.01, "r_1000 = {r1000}");
        assert!(r_of_n(2, &ctx) > r_of_n(1, &ctx));
    }

    #[test]
    fn solve_tn_defining_property() {
        let ctx = context_for_n(100, 0);
        let bits = ctx.bits();
        let s = solve_tn(100, &ctx).unwrap();
        let k1 = kappa(1, &s.t_n, &ctx).unwrap().value;
        let resid = Float::with_val(bits, &k1 - Float::with_val(bits, 100u32)).abs();
        assert!(resid <= ctx.rel_tol() * 100u32, "residual {resid}");
        // bracket of the published bound
        let lower = Float::with_val(
            bits,
            -(ctx.pi() / Float::with_val(bits, 6.0 * (100.0 - 1.0 / 24.0)).sqrt()),
        )
        .exp();
        assert!(s.t_n > lower && s.t_n < 1u32);
        assert!(s.iterations <= 60, "iterations {}", s.iterations);
    }

    #[test]
    fn log_tn_approx_examples() {
        let ctx = context_for_n(1, 0);
        let s = solve_tn(1, &ctx).unwrap();
        let approx = log_tn_approx(1, &ctx);
        let diff = Float::with_val(ctx.bits(), &s.l_n - &approx).abs();
        assert!(diff < 1e-3, "diff {diff}");
        // the surrogate shrinks with n
        let scratch = PrecisionContext::new(30);
        assert!(log_tn_approx(10_000, &scratch) < log_tn_approx(10, &scratch));
    }

    #[test]
    fn tn_increasing_and_c_sq_above_one() {
        let mut prev: Option<Float> = None;
        for n in 1..=50u64 {
            let ctx = context_for_n(n, 0);
            let s = solve_tn(n, &ctx).unwrap();
            if let Some(p) = prev {
                assert!(s.t_n > p, "t_n not increasing at n={n}");
            }
            assert!(s.c_n_sq > 1u32, "c_n^2 <= 1 at n={n}");
            assert!(s.lambda_n > 1u32);
            // h_n < 2^-30 for all n
            let cap = Float::with_val(ctx.bits(), 2u32).pow(-30i32);
            assert!(s.h_n < cap, "h_n too large at n={n}");
            prev = Some(s.t_n);
        }
    }

    #[test]
    fn self_consistency_of_solved_quadratic() {
        // pi^2/(3 L_n) = (1/2 + sqrt((2pi^2/3)(n-1/24)(1-24h) + 1/4))/(1-24h)
        for n in [1u64, 10, 100] {
            let ctx = context_for_n(n, 0);
            let bits = ctx.bits();
            let s = solve_tn(n, &ctx).unwrap();
            let pi_sq = Float::with_val(bits, ctx.pi().square_ref());
            let lhs = Float::with_val(bits, &pi_sq / Float::with_val(bits, 3 * &s.l_n));
            let one_minus = Float::with_val(bits, 1u32 - Float::with_val(bits, 24 * &s.h_n));
            let shifted =
                Float::with_val(bits, n) - Float::with_val(bits, 1u32) / 24u32;
            let inner = Float::with_val(bits, 2 * &pi_sq) / 3u32 * shifted * &one_minus
                + Float::with_val(bits, 0.25);
            let rhs = (inner.sqrt() + Float::with_val(bits, 0.5)) / &one_minus;
            let rel = Float::with_val(bits, &lhs - &rhs).abs() / &rhs;
            assert!(rel <= ctx.rel_tol(), "n={n}: rel {rel}");
        }
    }

    #[test]
    fn bound_report_within_envelopes() {
        for n in [1u64, 10] {
            let ctx = context_for_n(n, 0);
            let rep = verify_saddle_bounds(n, &ctx).unwrap();
            assert!(rep.all_within(), "n={n}: ratios {:?}", rep.ratios);
        }
    }

    #[test]
    fn bound_ratio_not_exploding_across_sweep() {
        let mut maxima = Vec::new();
        for n in [1u64, 2, 5, 10, 20, 50] {
            let ctx = context_for_n(n, 0);
            let rep = verify_saddle_bounds(n, &ctx).unwrap();
            let m = rep
                .ratios
                .iter()
                .map(|r| r.to_f64())
                .fold(0.0f64, f64::max);
            maxima.push(m);
        }
        assert!(maxima.iter().all(|m| m.is_finite() && *m <= 1.0), "{maxima:?}");
    }
}
