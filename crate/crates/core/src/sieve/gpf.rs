use rayon::prelude::*;
use serde_json::json;

use super::{Exceptions, SieveReport, SpfTable};
use crate::error::{Error, Result};

/// Greatest prime factor by trial division, `P(+-1) = 1`.
pub fn gpf(m: i64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidParams("P(0) is undefined".into()));
    }
    Ok(gpf_trial(m.unsigned_abs()))
}

fn gpf_trial(mut m: u64) -> u64 {
    let mut best = 1;
    let mut p = 2;
    while p * p <= m {
        while m % p == 0 {
            best = p;
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        best = best.max(m);
    }
    best
}

/// `P(n (n+d) ... (n+d(k-1)))`.
pub fn gpf_ap_product(n: u64, d: u64, k: u64) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParams("need n >= 1 and k >= 1".into()));
    }
    Ok((0..k).map(|i| gpf_trial(n + d * i)).max().unwrap_or(1))
}

/// Which starting values `n` a range check visits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StartFilter {
    /// Only `n > greater_than`.
    pub greater_than: u64,
    pub odd_only: bool,
    pub not_divisible_by: Option<u64>,
}

impl StartFilter {
    pub fn accepts(&self, n: u64) -> bool {
        n > self.greater_than
            && (!self.odd_only || n % 2 == 1)
            && self.not_divisible_by.is_none_or(|q| n % q != 0)
    }
}

/// All `n <= n_limit` passing `filter` with `P(n (n+d) ... (n+d(k-1))) <= bound`.
pub fn verify_gpf_bound(
    table: &SpfTable,
    d: u64,
    k: u64,
    bound: u64,
    n_limit: u64,
    filter: &StartFilter,
) -> Result<SieveReport> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidParams("need d >= 1 and k >= 1".into()));
    }
    table.require(n_limit + d * (k - 1))?;
    let hits: Vec<u64> = (filter.greater_than + 1..=n_limit)
        .into_par_iter()
        .filter(|&n| filter.accepts(n))
        .filter(|&n| (0..k).all(|i| table.gpf_unchecked(n + d * i) <= bound))
        .collect();
    let params = json!({
        "d": d,
        "k": k,
        "bound": bound,
        "n_limit": n_limit,
        "greater_than": filter.greater_than,
        "odd_only": filter.odd_only,
        "not_divisible_by": filter.not_divisible_by,
    });
    let extremal = json!({ "largest_exception": hits.last() });
    Ok(SieveReport::new("gpf-ap", params, Exceptions::Values(hits), extremal))
}

/// `S_M = { 1 <= m <= limit : P(m (m + gap)) <= M }`.
pub fn smooth_pairs(table: &SpfTable, big_m: u64, gap: u64, limit: u64) -> Result<Vec<u64>> {
    table.require(limit + gap)?;
    Ok((1..=limit)
        .into_par_iter()
        .filter(|&m| table.gpf_unchecked(m) <= big_m && table.gpf_unchecked(m + gap) <= big_m)
        .collect())
}

/// Pairs `(i, X)` with `80 < X <= limit`, `3 !| X`, `1 <= i <= 7`, `P(X(X+3i)) = 5`
/// and `X(X+3i)` even, sorted by `(i, X)`.
pub fn solve_upto7(table: &SpfTable, limit: u64) -> Result<Vec<(u64, u64)>> {
    table.require(limit + 21)?;
    let mut out: Vec<(u64, u64)> = (81..=limit)
        .into_par_iter()
        .filter(|x| x % 3 != 0)
        .flat_map_iter(|x| {
            (1..=7u64).filter_map(move |i| {
                let y = x + 3 * i;
                let even = x % 2 == 0 || y % 2 == 0;
                let p = table.gpf_unchecked(x).max(table.gpf_unchecked(y));
                (even && p == 5).then_some((i, x))
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Spot check of `P(Delta(n, d, k)) >= n` inside the ranges where it is asserted:
/// `6450 < n <= 10.6 * 3k` for `d = 3`, `10^6 < n <= 138 * 4k` for `d = 4`.
pub fn lemma43_predicate(n: u64, d: u64, k: u64) -> Result<bool> {
    let in_range = match d {
        3 => n > 6450 && 10 * n <= 318 * k,
        4 => n > 1_000_000 && n <= 138 * 4 * k,
        _ => false,
    };
    if !in_range {
        return Err(Error::RangeViolation(format!(
            "n = {n}, d = {d}, k = {k} is outside the asserted ranges"
        )));
    }
    let best = (0..k)
        .into_par_iter()
        .map(|i| gpf_trial(n + d * i))
        .max()
        .unwrap_or(1);
    Ok(best >= n)
}
