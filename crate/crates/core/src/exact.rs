//! Exact computation of p(n) with arbitrary-precision integers.
//!
//! [`partition_exact`] and [`partition_table`] use the Euler pentagonal
//! number recurrence
//!   p(n) = sum_{k>=1} (-1)^{k+1} ( p(n - k(3k-1)/2) + p(n - k(3k+1)/2) ),
//! integer-only, so the results serve as ground truth for every
//! floating-point path in this crate. [`partition_bruteforce`] is an
//! independent oracle that enumerates over the largest part.

use rug::Integer;

use crate::error::{Error, Result};

/// Arbitrary-precision non-negative partition count. Round-trips exactly
/// through decimal-string serialization via `to_string` / `parse`.
pub type BigCount = Integer;

/// Guard on the dense table size (entries of p(10^6) are ~1100 digits).
pub const DEFAULT_TABLE_CAP: u64 = 1_000_000;

/// Guard on the brute-force enumeration.
pub const BRUTEFORCE_CAP: u64 = 60;

/// Dense table of p(0)..p(n_max).
#[derive(Debug, Clone)]
pub struct PartitionTable {
    entries: Vec<BigCount>,
}

impl PartitionTable {
    pub fn entries(&self) -> &[BigCount] {
        &self.entries
    }

    pub fn n_max(&self) -> u64 {
        (self.entries.len() - 1) as u64
    }

    pub fn get(&self, n: u64) -> Option<&BigCount> {
        self.entries.get(n as usize)
    }
}

/// Builds p(0)..p(n_max) in one pass of the pentagonal recurrence,
/// O(n_max^{3/2}) big-integer additions.
pub fn partition_table(n_max: u64) -> Result<PartitionTable> {
    partition_table_capped(n_max, DEFAULT_TABLE_CAP)
}

pub fn partition_table_capped(n_max: u64, cap: u64) -> Result<PartitionTable> {
    if n_max > cap {
        return Err(Error::ResourceLimit(format!(
            "partition table size {n_max} exceeds cap {cap}"
        )));
    }
    let len = n_max as usize + 1;
    let mut entries: Vec<Integer> = Vec::with_capacity(len);
    entries.push(Integer::from(1));
    for n in 1..len {
        let mut acc = Integer::new();
        let mut k = 1usize;
        loop {
            // generalized pentagonal numbers k(3k-1)/2 and k(3k+1)/2
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let g2 = g1 + k;
            let sign_plus = k % 2 == 1;
            if sign_plus {
                acc += &entries[n - g1];
            } else {
                acc -= &entries[n - g1];
            }
            if g2 <= n {
                if sign_plus {
                    acc += &entries[n - g2];
                } else {
                    acc -= &entries[n - g2];
                }
            }
            k += 1;
        }
        entries.push(acc);
    }
    Ok(PartitionTable { entries })
}

/// Exact number of partitions of `n`; p(0) = 1 by convention.
pub fn partition_exact(n: u64) -> BigCount {
    // the cap only guards table construction; a single value is always fine
    partition_table_capped(n, u64::MAX)
        .expect("uncapped table")
        .entries
        .pop()
        .expect("non-empty table")
}

/// Counts partitions of `n` by explicit recursion over the largest part.
/// Independent of the recurrence; guarded against combinatorial blowup.
pub fn partition_bruteforce(n: u64) -> Result<BigCount> {
    if n > BRUTEFORCE_CAP {
        return Err(Error::InputTooLarge(format!(
            "brute-force enumeration capped at n <= {BRUTEFORCE_CAP}, got {n}"
        )));
    }
    fn count(n: u64, max_part: u64) -> Integer {
        if n == 0 {
            return Integer::from(1);
        }
        let mut total = Integer::new();
        let mut part = max_part.min(n);
        while part >= 1 {
            total += count(n - part, part);
            part -= 1;
        }
        total
    }
    Ok(count(n, n))
}
