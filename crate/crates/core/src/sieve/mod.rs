//! Range verifications backed by a smallest-prime-factor table.

mod bounds;
mod gaps;
mod gpf;
mod spf;

pub use bounds::{
    growth_inequality, growth_sides, r_set, r_set_report, residue_prime_count, smoothness_bound,
    BoundVariant, PiConvention, RSetReport, SmoothnessBound,
};
pub use gaps::{ap_prime_gaps, gap_pairs, GapPair};
pub use gpf::{
    gpf, gpf_ap_product, lemma43_predicate, smooth_pairs, solve_upto7, verify_gpf_bound,
    StartFilter,
};
pub use spf::{primes_up_to, SpfTable, DEFAULT_SEGMENT};

use serde::Serialize;
use serde_json::Value;

/// Exceptions found by a range check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Exceptions {
    Values(Vec<u64>),
    Pairs(Vec<(u64, u64)>),
}

impl Exceptions {
    pub fn len(&self) -> usize {
        match self {
            Exceptions::Values(v) => v.len(),
            Exceptions::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Canonical result of a sieve query. `elapsed_ms` is the only nondeterministic
/// field and is left unset by the library.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveReport {
    pub query: String,
    pub params: Value,
    pub exceptions: Exceptions,
    pub extremal: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl SieveReport {
    pub(crate) fn new(query: &str, params: Value, exceptions: Exceptions, extremal: Value) -> Self {
        SieveReport {
            query: query.to_string(),
            params,
            exceptions,
            extremal,
            elapsed_ms: None,
        }
    }
}
