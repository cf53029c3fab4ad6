//! Working-precision contract obeyed by every analytic module.
//!
//! A [`PrecisionContext`] fixes the decimal working precision, the guard
//! digits used when sizing a context from the target magnitude, and the cap
//! on series terms. All high-precision reals ([`HPReal`]) produced under a
//! context carry at least `decimal_digits` significant decimal digits.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Arbitrary-precision real number. Values are immutable once produced and
/// safe to share across threads.
pub type HPReal = Float;

/// Smallest working precision any context will carry.
pub const MIN_DECIMAL_DIGITS: u32 = 20;

/// Extra guard digits absorbed into contexts sized by [`context_for_n`].
pub const DEFAULT_TAIL_SAFETY: u32 = 30;

/// Default cap on the number of terms summed by any direct series.
pub const DEFAULT_MAX_SERIES_TERMS: usize = 2_000_000;

/// Carries target decimal precision, truncation tolerances and the
/// series-tail policy for all high-precision evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionContext {
    decimal_digits: u32,
    tail_safety: u32,
    max_series_terms: usize,
}

impl PrecisionContext {
    /// Context with the given working precision and default policies.
    /// Precision is clamped up to [`MIN_DECIMAL_DIGITS`].
    pub fn new(decimal_digits: u32) -> Self {
        Self::with_parts(decimal_digits, DEFAULT_TAIL_SAFETY, DEFAULT_MAX_SERIES_TERMS)
    }

    pub fn with_parts(decimal_digits: u32, tail_safety: u32, max_series_terms: usize) -> Self {
        Self {
            decimal_digits: decimal_digits.max(MIN_DECIMAL_DIGITS),
            tail_safety: tail_safety.max(1),
            max_series_terms: max_series_terms.max(16),
        }
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn tail_safety(&self) -> u32 {
        self.tail_safety
    }

    pub fn max_series_terms(&self) -> usize {
        self.max_series_terms
    }

    /// Same policies, `extra` more decimal digits. Used by the
    /// precision-escalation stability checks.
    pub fn escalated(&self, extra: u32) -> Self {
        Self {
            decimal_digits: self.decimal_digits + extra,
            ..self.clone()
        }
    }

    /// Binary working precision, with a fixed guard on top of the decimal
    /// target so that faithful rounding never eats into it.
    pub fn bits(&self) -> u32 {
        (self.decimal_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
    }

    pub fn float_from_u64(&self, v: u64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// Series are truncated when the certified tail bound falls below this
    /// factor times the accumulated sum: `10^-(decimal_digits+5)`.
    pub fn series_tol(&self) -> Float {
        pow10(self.bits(), -(self.decimal_digits as i64 + 5))
    }

    /// Relative tolerance for comparisons between values produced under
    /// this context: `10^-(decimal_digits-10)`.
    pub fn rel_tol(&self) -> Float {
        pow10(self.bits(), -(self.decimal_digits as i64 - 10))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(40)
    }
}

/// `10^exp` at the given binary precision.
pub fn pow10(bits: u32, exp: i64) -> Float {
    let p = Float::with_val(bits, Float::u_pow_u(10, exp.unsigned_abs() as u32));
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Decimal fixed-point rendering of `v` with exactly `frac_digits`
/// fractional digits (round half away from zero on the last digit).
pub fn fixed_point_string(v: &Float, frac_digits: u32) -> String {
    let bits = v.prec();
    let scale = pow10(bits, frac_digits as i64);
    let scaled = Float::with_val(bits, v * &scale).round();
    let int = scaled.to_integer().expect("finite value");
    let negative = int < 0u32;
    let digits = int.abs().to_string();
    let frac = frac_digits as usize;
    let padded = if digits.len() <= frac {
        format!("{}{}", "0".repeat(frac + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (whole, fraction) = padded.split_at(padded.len() - frac);
    let sign = if negative { "-" } else { "" };
    if frac == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{fraction}")
    }
}

/// Rejects infinities and NaN, which must never escape an operation.
pub fn ensure_finite(value: Float, what: &str) -> Result<Float> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Upper bound `first_omitted / (1 - ratio)` on the omitted tail of any
/// series dominated termwise by the geometric series with that ratio.
pub fn geometric_tail_bound(first_omitted: &Float, ratio: &Float) -> Result<Float> {
    if !(ratio.is_finite() && ratio.is_sign_positive() && *ratio < 1u32) || ratio.is_zero() {
        return Err(Error::Domain(format!(
            "geometric tail ratio must lie in (0,1), got {ratio}"
        )));
    }
    let bits = first_omitted.prec().max(ratio.prec());
    let denom = Float::with_val(bits, 1u32 - ratio);
    ensure_finite(
        Float::with_val(bits, first_omitted / denom),
        "geometric_tail_bound",
    )
}

/// Context sized so that `e^{r_n}` retains `order + tail_safety` accurate
/// digits beyond its integer part: `ceil(r_n log10 e) + order + tail_safety`
/// decimal digits.
pub fn context_for_n(n: u64, order: u32) -> PrecisionContext {
    context_for_n_with_safety(n, order, DEFAULT_TAIL_SAFETY)
}

pub fn context_for_n_with_safety(n: u64, order: u32, tail_safety: u32) -> PrecisionContext {
    let scratch = PrecisionContext::new(40);
    let r = crate::saddle::r_of_n(n.max(1), &scratch);
    let ln10 = Float::with_val(scratch.bits(), 10u32).ln();
    // r / ln(10) = r * log10(e), the decimal magnitude of e^{r_n}
    let magnitude = Float::with_val(scratch.bits(), &r / &ln10)
        .ceil()
        .to_f64() as u32;
    PrecisionContext::with_parts(
        magnitude + order + tail_safety,
        tail_safety,
        DEFAULT_MAX_SERIES_TERMS,
    )
}
