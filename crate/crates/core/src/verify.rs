//! Exhaustive checks over set partitions, collected into a serialisable
//! report.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::comb::dyck::{enumerate_marked_dyck, even_cactus_cycles, md_of_partition};
use crate::comb::graph::{cycle_decomposition, quotient_graph};
use crate::comb::partition::{all_partitions, SetPartition};
use crate::comb::vn::{vn_limit, InclusionExclusion};
use crate::conference::paley_conference;
use crate::error::{invalid, Result};
use crate::km::{borel_triangle, signed_borel};

/// Largest `k` the exhaustive partition checks accept.
pub const MAX_K: usize = 10;

/// Largest `k` for which the convergence check runs by default.
pub const CONVERGENCE_MAX_K: usize = 8;

/// Primes `q` whose Paley orders `6, 14, 30, 62, 138` at least double at
/// each step.
pub const CONVERGENCE_PRIMES: [u64; 5] = [5, 13, 29, 61, 137];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingRow {
    pub k: usize,
    pub t: usize,
    pub partitions: u64,
    pub limit_sum: i128,
    pub expected: i128,
    /// `B(k/2-1, t-k/2-1)` where that index is in range.
    pub borel: Option<u128>,
    pub marked_dyck_count: Option<u64>,
    pub marked_dyck_union_matches: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CactusRow {
    pub k: usize,
    /// Loop-free non-crossing partitions examined.
    pub checked: u64,
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub orders: Vec<u64>,
    pub partitions: u64,
    pub min_decreases: usize,
    /// Partitions with fewer than `min_decreases` decreasing steps.
    pub failures: Vec<String>,
    /// Partitions whose error grows on at least one step.
    pub with_an_increase: u64,
    /// Partitions breaking `err_last <= 10 err_prev n_prev / n_last`.
    pub rate_failures: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub k_max: usize,
    pub counting: Vec<CountingRow>,
    pub cactus: Vec<CactusRow>,
    pub convergence: Vec<ConvergenceRow>,
    pub pass: bool,
}

/// Sums of limits over `Π(k, t)` against the signed Borel numbers, with the
/// marked Dyck word counts for even `k`.
pub fn counting_rows(k: usize) -> Result<Vec<CountingRow>> {
    let mut sums = vec![0i128; k + 1];
    let mut counts = vec![0u64; k + 1];
    let mut union: Vec<BTreeSet<String>> = vec![BTreeSet::new(); k + 1];
    let mut union_size = vec![0usize; k + 1];
    for pi in all_partitions(k) {
        let t = pi.t();
        sums[t] += vn_limit(&pi);
        counts[t] += 1;
        if k % 2 == 0 && even_cactus_cycles(&pi).is_some() {
            for w in md_of_partition(&pi)? {
                union[t].insert(w.to_string());
                union_size[t] += 1;
            }
        }
    }
    let h = k / 2;
    (1..=k)
        .map(|t| {
            let expected = signed_borel(k as u64, t as u64)?;
            let in_range = k % 2 == 0 && t > h && t <= k;
            let borel = if in_range {
                Some(borel_triangle((h - 1) as u64, (t - h - 1) as u64)?)
            } else {
                None
            };
            let (md_count, union_ok) = if k % 2 == 0 {
                let md: BTreeSet<String> =
                    enumerate_marked_dyck(k, t).iter().map(|w| w.to_string()).collect();
                // disjoint: no word produced twice; union: same set
                let ok = union_size[t] == union[t].len() && union[t] == md;
                (Some(md.len() as u64), Some(ok))
            } else {
                (None, None)
            };
            let md_matches_borel = match (md_count, borel) {
                (Some(c), Some(b)) => c as u128 == b,
                (Some(c), None) => c == 0,
                _ => true,
            };
            Ok(CountingRow {
                k,
                t,
                partitions: counts[t],
                limit_sum: sums[t],
                expected,
                borel,
                marked_dyck_count: md_count,
                marked_dyck_union_matches: union_ok,
                pass: sums[t] == expected && md_matches_borel && union_ok.unwrap_or(true),
            })
        })
        .collect()
}

/// Every loop-free non-crossing partition of `[k]` has a cactus quotient
/// graph with exactly `k - t + 1` simple cycles, and `t >= k/2 + 1`.
pub fn cactus_row(k: usize) -> Result<CactusRow> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for pi in all_partitions(k).filter(|p| !p.has_loop() && !p.is_crossing()) {
        checked += 1;
        let d = cycle_decomposition(&quotient_graph(&pi))?;
        let ok = d.is_cactus && d.components.len() == k + 1 - pi.t() && 2 * pi.t() >= k + 2;
        if !ok {
            failures.push(pi.to_string());
        }
    }
    Ok(CactusRow {
        k,
        checked,
        pass: failures.is_empty(),
        failures,
    })
}

fn decreased(prev: &BigRational, next: &BigRational) -> bool {
    next < prev || (next.is_zero() && prev.is_zero())
}

/// Errors `|V_n(π) - lim V_n(π)|` along the Paley orders of `primes`.
/// A step counts as decreasing when the error drops strictly or stays at
/// exactly zero.
pub fn convergence_row(k: usize, primes: &[u64], min_decreases: usize) -> Result<ConvergenceRow> {
    if primes.len() < 2 {
        return Err(invalid("need at least two orders"));
    }
    let tables = primes
        .iter()
        .map(|&q| InclusionExclusion::new(&paley_conference(q)?, k))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<u64> = primes.iter().map(|q| q + 1).collect();
    let mut partitions = 0;
    let mut failures = Vec::new();
    let mut rate_failures = Vec::new();
    let mut with_an_increase = 0;
    for pi in all_partitions(k) {
        partitions += 1;
        let errs = squared_errors(&pi, &tables)?;
        let decreases = errs.windows(2).filter(|w| decreased(&w[0], &w[1])).count();
        if decreases < min_decreases {
            failures.push(pi.to_string());
        }
        if errs.windows(2).any(|w| w[1] > w[0]) {
            with_an_increase += 1;
        }
        let m = errs.len();
        let last = errs[m - 1].to_f64().unwrap_or(f64::INFINITY).sqrt();
        let prev = errs[m - 2].to_f64().unwrap_or(f64::INFINITY).sqrt();
        let bound = 10.0 * prev * orders[m - 2] as f64 / orders[m - 1] as f64;
        if last > bound {
            rate_failures.push(pi.to_string());
        }
    }
    Ok(ConvergenceRow {
        k,
        orders,
        partitions,
        min_decreases,
        pass: failures.is_empty() && rate_failures.is_empty(),
        failures,
        with_an_increase,
        rate_failures,
    })
}

fn squared_errors(pi: &SetPartition, tables: &[InclusionExclusion]) -> Result<Vec<BigRational>> {
    let limit = vn_limit(pi);
    tables
        .iter()
        .map(|t| Ok(t.vn(pi)?.squared_error(limit)))
        .collect()
}

/// Runs the counting and cactus checks for `k <= k_max` and the convergence
/// check for `k <= convergence_k_max`.
pub fn verify(k_max: usize, convergence_k_max: usize, primes: &[u64]) -> Result<VerifyReport> {
    if k_max == 0 || k_max > MAX_K {
        return Err(invalid(format!("k_max must be in 1..={MAX_K}")));
    }
    let mut counting = Vec::new();
    let mut cactus = Vec::new();
    let mut convergence = Vec::new();
    for k in 1..=k_max {
        counting.extend(counting_rows(k)?);
        cactus.push(cactus_row(k)?);
        if k <= convergence_k_max {
            convergence.push(convergence_row(k, primes, primes.len().saturating_sub(2))?);
        }
    }
    let pass = counting.iter().all(|r| r.pass)
        && cactus.iter().all(|r| r.pass)
        && convergence.iter().all(|r| r.pass);
    Ok(VerifyReport {
        k_max,
        counting,
        cactus,
        convergence,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_small_k() {
        let rows = counting_rows(4).unwrap();
        assert!(rows.iter().all(|r| r.pass));
        let t3 = &rows[2];
        assert_eq!((t3.t, t3.expected, t3.borel, t3.marked_dyck_count), (3, 2, Some(2), Some(2)));
        assert_eq!(rows[3].expected, -1);
    }

    #[test]
    fn odd_rows_have_zero_limits() {
        for r in counting_rows(3).unwrap() {
            assert_eq!(r.limit_sum, 0);
            assert_eq!(r.expected, 0);
            assert!(r.borel.is_none());
        }
    }

    #[test]
    fn cactus_small_k() {
        for k in 1..=7 {
            assert!(cactus_row(k).unwrap().pass);
        }
    }

    #[test]
    fn convergence_small_k() {
        let row = convergence_row(4, &CONVERGENCE_PRIMES[..4], 3).unwrap();
        assert!(row.pass, "{row:?}");
        assert_eq!(row.orders, vec![6, 14, 30, 62]);
    }

    #[test]
    fn verify_rejects_large_k() {
        assert!(verify(11, 0, &CONVERGENCE_PRIMES).is_err());
        assert!(verify(0, 0, &CONVERGENCE_PRIMES).is_err());
    }
}
