//! Exact construction and evaluation of the Eulerian polynomials A_j(t),
//! the numerators in sum_{k>=0} k^j t^k = A_j(t) / (1-t)^{j+1}.

use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, HPReal, PrecisionContext};

/// Cap on the degree index; cumulant orders beyond ~30 are never needed.
pub const MAX_EULERIAN_INDEX: u32 = 64;

/// A_j with exact integer coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianPoly {
    index: u32,
    coeffs: Vec<Integer>,
}

impl EulerianPoly {
    pub fn index(&self) -> u32 {
        self.index
    }

    /// Coefficients, constant term first. A_0 = [1]; for j >= 1 the constant
    /// coefficient is 0 and the linear one is 1, and the list is palindromic.
    pub fn coefficients(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Horner evaluation at `t` in the context's working precision.
    pub fn eval(&self, t: &HPReal, ctx: &PrecisionContext) -> HPReal {
        let bits = ctx.bits();
        let mut acc = Float::new(bits);
        for c in self.coeffs.iter().rev() {
            acc *= t;
            acc += c;
        }
        acc
    }
}

/// A_{j+1}(t) = t(1-t) A_j'(t) + (j+1) t A_j(t), exact in integers.
fn step(prev: &EulerianPoly) -> EulerianPoly {
    let j = prev.index;
    let n = prev.coeffs.len();
    let mut next = vec![Integer::new(); n + 1];
    for (i, c) in prev.coeffs.iter().enumerate() {
        // t A_j'  contributes i*c at degree i
        // -t^2 A_j' contributes -i*c at degree i+1
        // (j+1) t A_j contributes (j+1)*c at degree i+1
        next[i] += Integer::from(c * i as u32);
        next[i + 1] += Integer::from(c * (j + 1)) - Integer::from(c * i as u32);
    }
    EulerianPoly {
        index: j + 1,
        coeffs: next,
    }
}

fn memo() -> &'static RwLock<Vec<Arc<EulerianPoly>>> {
    static MEMO: OnceLock<RwLock<Vec<Arc<EulerianPoly>>>> = OnceLock::new();
    MEMO.get_or_init(|| {
        RwLock::new(vec![Arc::new(EulerianPoly {
            index: 0,
            coeffs: vec![Integer::from(1)],
        })])
    })
}

/// Returns A_j, built by the recurrence from A_0 = 1 and memoized
/// process-wide behind a read-mostly lock.
pub fn eulerian_poly(j: u32) -> Result<Arc<EulerianPoly>> {
    if j > MAX_EULERIAN_INDEX {
        return Err(Error::ResourceLimit(format!(
            "Eulerian polynomial index {j} exceeds cap {MAX_EULERIAN_INDEX}"
        )));
    }
    {
        let cache = memo().read().expect("eulerian memo poisoned");
        if let Some(p) = cache.get(j as usize) {
            return Ok(Arc::clone(p));
        }
    }
    let mut cache = memo().write().expect("eulerian memo poisoned");
    while cache.len() <= j as usize {
        let next = step(cache.last().expect("memo seeded"));
        cache.push(Arc::new(next));
    }
    Ok(Arc::clone(&cache[j as usize]))
}

/// Horner evaluation of A_j at `t` in working precision.
pub fn eulerian_eval(j: u32, t: &HPReal, ctx: &PrecisionContext) -> Result<HPReal> {
    let poly = eulerian_poly(j)?;
    ensure_finite(poly.eval(t, ctx), "eulerian_eval")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn coeff_vec(j: u32) -> Vec<i64> {
        eulerian_poly(j)
            .unwrap()
            .coefficients()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(coeff_vec(0), [1]);
        assert_eq!(coeff_vec(1), [0, 1]);
        assert_eq!(coeff_vec(2), [0, 1, 1]);
        assert_eq!(coeff_vec(3), [0, 1, 4, 1]);
        assert_eq!(coeff_vec(4), [0, 1, 11, 11, 1]);
    }

    #[test]
    fn coefficient_sum_is_factorial() {
        for j in 0..=20u32 {
            let p = eulerian_poly(j).unwrap();
            let sum: Integer = p.coefficients().iter().sum();
            assert_eq!(sum, Integer::from(Integer::factorial(j)), "j={j}");
        }
    }

    #[test]
    fn palindromic_for_positive_index() {
        for j in 1..=20u32 {
            let p = eulerian_poly(j).unwrap();
            // skip the zero constant term
            let inner = &p.coefficients()[1..];
            let mut rev = inner.to_vec();
            rev.reverse();
            assert_eq!(inner, &rev[..], "j={j}");
        }
    }

    #[test]
    fn eval_examples() {
        let ctx = PrecisionContext::new(30);
        let b = ctx.bits();
        let half = Float::with_val(b, 0.5);
        let v = eulerian_eval(1, &half, &ctx).unwrap();
        assert_eq!(v, 0.5); // A_1(t) = t
        let v = eulerian_eval(2, &half, &ctx).unwrap();
        assert_eq!(v, 0.75); // A_2(t) = t + t^2
    }

    #[test]
    fn eval_matches_power_sum_partial() {
        // A_j(t)/(1-t)^{j+1} = sum k^j t^k within the geometric tail bound
        let ctx = PrecisionContext::new(30);
        let b = ctx.bits();
        for j in 1..=10u32 {
            for t in [0.1f64, 0.5, 0.9] {
                let tf = Float::with_val(b, t);
                let lhs = eulerian_eval(j, &tf, &ctx).unwrap()
                    / Float::with_val(b, 1 - &tf).pow(j + 1);
                let mut partial = Float::new(b);
                let kmax = 4000u32;
                let mut tk = Float::with_val(b, 1);
                for k in 1..=kmax {
                    tk *= &tf;
                    partial += Float::with_val(b, k).pow(j) * &tk;
                }
                // tail bound: terms (k^j t^k) past kmax are dominated by a
                // geometric series once k^j growth is absorbed
                let first_omitted =
                    Float::with_val(b, kmax + 1).pow(j) * Float::with_val(b, &tk * &tf);
                let ratio = Float::with_val(b, (1.0 + t) / 2.0);
                let tail =
                    crate::numerics::geometric_tail_bound(&first_omitted, &ratio).unwrap();
                // the truncation tail can sit far below working-precision
                // roundoff, so allow a few ulps of the partial sum on top
                let slack = Float::with_val(b, partial.abs_ref()) * ctx.rel_tol();
                let allowed = tail + slack;
                let diff = Float::with_val(b, &lhs - &partial).abs();
                assert!(diff <= allowed, "j={j} t={t} diff={diff} allowed={allowed}");
            }
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(eulerian_poly(65).is_err());
    }
}
