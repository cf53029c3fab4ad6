//! Batch evaluation: the published comparison table and the bound
//! verification sweep. Rows are independent per n, so with the `parallel`
//! feature they can be distributed across threads.

use rug::ops::Pow;
use rug::Integer;

use crate::error::Result;
use crate::exact::{partition_exact, BigCount};
use crate::expansion::p_approx_simple;
use crate::numerics::context_for_n;
use crate::saddle::{verify_saddle_bounds, BoundReport};

/// The n values of the published comparison table.
pub const TABLE1_NS: [u64; 14] = [10, 11, 50, 51, 100, 101, 200, 201, 500, 600, 700, 800, 900, 1000];

/// Expansion order used by the published table.
pub const TABLE_ORDER: u32 = 17;

/// One comparison row: exact count, rounded approximation, and their exact
/// quotient rendered with 19 fractional digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: u64,
    pub p_exact: BigCount,
    pub p_bar: BigCount,
    pub ratio: String,
}

impl TableRow {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "p": self.p_exact.to_string(),
            "p_bar": self.p_bar.to_string(),
            "ratio": self.ratio,
        })
    }

    pub fn to_csv_line(&self) -> String {
        format!("{},{},{},{}", self.n, self.p_exact, self.p_bar, self.ratio)
    }
}

/// num/den as a decimal string with exactly `frac_digits` fractional
/// digits, rounded half to even. Exact rational arithmetic throughout, so
/// the 19th digit of the table ratios is reproduced bit for bit.
pub fn ratio_string(num: &Integer, den: &Integer, frac_digits: u32) -> String {
    assert!(*den > 0u32, "ratio denominator must be positive");
    let negative = *num < 0u32;
    let num_abs = Integer::from(num.abs_ref());
    let scale = Integer::from(10u32).pow(frac_digits);
    let scaled = num_abs * &scale;
    let (mut q, r) = scaled.div_rem_floor(den.clone());
    // round half to even on the discarded remainder
    let twice = Integer::from(&r * 2u32);
    if twice > *den || (twice == *den && q.is_odd()) {
        q += 1u32;
    }
    let digits = q.to_string();
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

fn table_row(n: u64, order: u32, digits_override: Option<u32>) -> Result<TableRow> {
    let ctx = match digits_override {
        Some(d) => crate::numerics::PrecisionContext::new(d),
        None => context_for_n(n, order),
    };
    let p_exact = partition_exact(n);
    let approx = p_approx_simple(n, order, &ctx)?;
    let ratio = ratio_string(&approx.rounded, &p_exact, 19);
    Ok(TableRow {
        n,
        p_exact,
        p_bar: approx.rounded,
        ratio,
    })
}

/// Maps `f` over `ns`, in parallel when requested and compiled in,
/// preserving input order and surfacing the first error.
fn run_map<T, F>(ns: &[u64], parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return ns.par_iter().map(|&n| f(n)).collect();
    }
    let _ = parallel;
    ns.iter().map(|&n| f(n)).collect()
}

/// The published table: order 17, context sized per n, parallel when built
/// with the default feature set.
pub fn table_rows() -> Result<Vec<TableRow>> {
    table_rows_with(&TABLE1_NS, TABLE_ORDER, None, cfg!(feature = "parallel"))
}

pub fn table_rows_with(
    ns: &[u64],
    order: u32,
    digits_override: Option<u32>,
    parallel: bool,
) -> Result<Vec<TableRow>> {
    run_map(ns, parallel, |n| table_row(n, order, digits_override))
}

/// Bound verification over 1..=n_max, one report per n.
pub fn verify_sweep(n_max: u64) -> Result<Vec<BoundReport>> {
    verify_sweep_with(n_max, cfg!(feature = "parallel"))
}

pub fn verify_sweep_with(n_max: u64, parallel: bool) -> Result<Vec<BoundReport>> {
    let ns: Vec<u64> = (1..=n_max).collect();
    run_map(&ns, parallel, |n| {
        let ctx = context_for_n(n, 0);
        verify_saddle_bounds(n, &ctx)
    })
}
