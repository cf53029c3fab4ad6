//! Exact and asymptotic evaluation of the partition counting function p(n).
//!
//! The exact side is the pentagonal-number recurrence over big integers.
//! The asymptotic side evaluates truncations of a saddle-point expansion
//! whose coefficients are exact rationals: a simplified form driven by the
//! closed-form surrogate r_n, and a full form driven by the solved saddle
//! point of the generating function. Both are computed in arbitrary
//! precision under an explicit [`numerics::PrecisionContext`], and the
//! a-priori error bounds on the saddle quantities are checkable at runtime.
//!
//! With the default `parallel` feature the batch entry points in [`table`]
//! fan out across threads; without it they run sequentially.

pub mod cumulants;
pub mod error;
pub mod eulerian;
pub mod exact;
pub mod expansion;
pub mod numerics;
pub mod saddle;
pub mod table;

pub use error::{Error, Result};
pub use exact::{partition_bruteforce, partition_exact, partition_table, BigCount, PartitionTable};
pub use expansion::{
    d_coeff, hardy_ramanujan, j_coeff, p_approx_full, p_approx_simple, ExpansionKind,
    ExpansionResult,
};
pub use numerics::{context_for_n, HPReal, PrecisionContext};
pub use saddle::{solve_tn, verify_saddle_bounds, BoundReport, SaddleState};
pub use table::{table_rows, table_rows_with, verify_sweep, verify_sweep_with, TableRow, TABLE1_NS};
