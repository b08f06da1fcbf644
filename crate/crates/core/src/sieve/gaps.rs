use num_integer::Integer;
use serde::Serialize;
use serde_json::json;

use super::{Exceptions, SieveReport, SpfTable};
use crate::error::{Error, Result};
use crate::valuation::is_prime;

/// Consecutive primes in one residue class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapPair {
    pub residue: u64,
    pub first: u64,
    pub second: u64,
    pub gap: u64,
}

fn residue_pairs(table: &SpfTable, modulus: u64, residue: u64, limit: u64) -> Vec<GapPair> {
    let mut pairs = Vec::new();
    let mut prev: Option<u64> = None;
    let mut m = residue;
    while m <= limit {
        if table.is_prime(m) {
            if let Some(p) = prev {
                pairs.push(GapPair { residue, first: p, second: m, gap: m - p });
            }
            prev = Some(m);
        }
        m += modulus;
    }
    // The pair starting at the last prime below the limit closes above it.
    if let Some(p) = prev {
        let mut q = m;
        while !(if q <= table.limit() { table.is_prime(q) } else { is_prime(q) }) {
            q += modulus;
        }
        pairs.push(GapPair { residue, first: p, second: q, gap: q - p });
    }
    pairs
}

/// Gaps between consecutive primes `p = residue (mod modulus)` for every pair whose
/// first prime is at most `limit`. Exceptions are the pairs with gap above `gap_bound`.
pub fn ap_prime_gaps(
    table: &SpfTable,
    modulus: u64,
    residues: &[u64],
    limit: u64,
    gap_bound: u64,
) -> Result<SieveReport> {
    if modulus == 0 {
        return Err(Error::InvalidParams("modulus must be positive".into()));
    }
    if residues.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &residue in residues {
        if residue >= modulus || residue.gcd(&modulus) != 1 {
            return Err(Error::InvalidResidue { residue, modulus });
        }
    }
    table.require(limit)?;
    let mut exceptions = Vec::new();
    let mut per_residue = Vec::new();
    let mut overall: Option<GapPair> = None;
    for &residue in residues {
        let pairs = residue_pairs(table, modulus, residue, limit);
        let best = pairs.iter().copied().max_by_key(|g| (g.gap, std::cmp::Reverse(g.first)));
        exceptions.extend(
            pairs
                .iter()
                .filter(|g| g.gap > gap_bound)
                .map(|g| (g.first, g.second)),
        );
        per_residue.push(json!({
            "residue": residue,
            "pairs": pairs.len(),
            "max_gap": best.map(|g| g.gap),
            "max_gap_pair": best.map(|g| [g.first, g.second]),
        }));
        if let Some(b) = best {
            if overall.is_none_or(|o| (b.gap, std::cmp::Reverse(b.first)) > (o.gap, std::cmp::Reverse(o.first))) {
                overall = Some(b);
            }
        }
    }
    exceptions.sort_unstable();
    let params = json!({
        "modulus": modulus,
        "residues": residues,
        "limit": limit,
        "gap_bound": gap_bound,
    });
    let extremal = json!({
        "max_gap": overall.map(|g| g.gap),
        "max_gap_pair": overall.map(|g| [g.first, g.second]),
        "per_residue": per_residue,
    });
    Ok(SieveReport::new("gaps", params, Exceptions::Pairs(exceptions), extremal))
}

/// All consecutive pairs for one residue class, exposed for dumps and tests.
pub fn gap_pairs(table: &SpfTable, modulus: u64, residue: u64, limit: u64) -> Result<Vec<GapPair>> {
    if residue >= modulus || residue.gcd(&modulus) != 1 {
        return Err(Error::InvalidResidue { residue, modulus });
    }
    table.require(limit)?;
    Ok(residue_pairs(table, modulus, residue, limit))
}
