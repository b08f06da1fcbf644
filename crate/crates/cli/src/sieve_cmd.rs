use std::fmt::Write as _;

use clap::{Subcommand, ValueEnum};
use ghl_core::sieve::{
    ap_prime_gaps, growth_inequality, growth_sides, lemma43_predicate, r_set_report,
    residue_prime_count, smooth_pairs, smoothness_bound, solve_upto7, verify_gpf_bound,
    BoundVariant, Exceptions, PiConvention, SieveReport, SpfTable, StartFilter,
};
use serde_json::{json, Value};

use crate::config::{usage, CliConfig, CliResult};
use crate::render::Output;

/// Largest table the u32 sieve supports.
const MAX_TABLE: u64 = u32::MAX as u64 - 1;

#[derive(Debug, Subcommand)]
pub enum SieveQuery {
    /// Starts n with P(n (n+d) ... (n+d(k-1))) <= bound.
    GpfAp {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        bound: u64,
        /// Odd n only.
        #[arg(long)]
        odd: bool,
        /// Smallest n visited.
        #[arg(long, default_value_t = 1)]
        min: u64,
        #[arg(long)]
        not_divisible_by: Option<u64>,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// m with P(m (m+gap)) <= bound.
    Smooth {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        gap: u64,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Pairs (i, X), 1 <= i <= 7, with P(X (X+3i)) = 5.
    Upto7 {
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Consecutive primes in residue classes whose gap exceeds the bound.
    Gaps {
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        residues: Vec<u64>,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        gap_bound: u64,
    },
    /// Number of primes p <= x with p = residue (mod m).
    Count {
        #[arg(long)]
        x: f64,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long)]
        residue: u64,
    },
    /// The prime set R(k) with both closed forms for its size.
    Rset {
        #[arg(long)]
        k: u64,
    },
    /// The smoothness bound for d = 4.
    Bound {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 3)]
        l: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::PrimeCorrected)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::Consistent)]
        convention: ConventionArg,
    },
    /// Both sides of the growth inequality.
    Growth {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        v0: u64,
    },
    /// Whether P(n (n+d) ... (n+d(k-1))) >= n at one instance.
    Lemma43 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    PrimeCorrected,
    TwoFree,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Consistent,
    Printed,
}

fn table(limit: u64, slack: u64) -> CliResult<SpfTable> {
    let size = limit
        .checked_add(slack)
        .filter(|&s| s <= MAX_TABLE)
        .ok_or_else(|| usage(format!("limit {limit} exceeds the sieve table range {MAX_TABLE}")))?;
    Ok(SpfTable::new(size))
}

fn positive(limit: u64) -> CliResult<u64> {
    if limit == 0 {
        Err(usage("--limit must be positive"))
    } else {
        Ok(limit)
    }
}

fn report(query: &str, params: Value, exceptions: Exceptions, extremal: Value) -> SieveReport {
    SieveReport { query: query.into(), params, exceptions, extremal, elapsed_ms: None }
}

pub fn run(query: &SieveQuery, config: &CliConfig) -> CliResult<Output> {
    let limit_or = |l: &Option<u64>| positive(l.unwrap_or(config.sieve_limit));
    let report = match query {
        SieveQuery::GpfAp { d, k, bound, odd, min, not_divisible_by, limit } => {
            let limit = limit_or(limit)?;
            if *k == 0 || *d == 0 {
                return Err(usage("need d >= 1 and k >= 1"));
            }
            if *not_divisible_by == Some(0) {
                return Err(usage("--not-divisible-by must be positive"));
            }
            let filter = StartFilter {
                greater_than: min.saturating_sub(1),
                odd_only: *odd,
                not_divisible_by: *not_divisible_by,
            };
            let span = d.checked_mul(k - 1).ok_or_else(|| usage("d (k-1) overflows"))?;
            verify_gpf_bound(&table(limit, span)?, *d, *k, *bound, limit, &filter)?
        }
        SieveQuery::Smooth { bound, gap, limit } => {
            let limit = limit_or(limit)?;
            let hits = smooth_pairs(&table(limit, *gap)?, *bound, *gap, limit)?;
            let extremal = json!({ "count": hits.len(), "largest": hits.last() });
            report(
                "smooth",
                json!({ "bound": bound, "gap": gap, "limit": limit }),
                Exceptions::Values(hits),
                extremal,
            )
        }
        SieveQuery::Upto7 { limit } => {
            let limit = limit_or(limit)?;
            let pairs = solve_upto7(&table(limit, 21)?, limit)?;
            report("upto7", json!({ "limit": limit }), Exceptions::Pairs(pairs), Value::Null)
        }
        SieveQuery::Gaps { modulus, residues, limit, gap_bound } => {
            let limit = positive(limit.unwrap_or(config.gap_limit))?;
            ap_prime_gaps(&table(limit, 0)?, *modulus, residues, limit, *gap_bound)?
        }
        SieveQuery::Count { x, modulus, residue } => {
            if *modulus == 0 || !x.is_finite() {
                return Err(usage("need a positive modulus and finite x"));
            }
            let count = residue_prime_count(*x, *modulus, *residue);
            report(
                "count",
                json!({ "x": x, "modulus": modulus, "residue": residue }),
                Exceptions::Values(Vec::new()),
                json!({ "count": count }),
            )
        }
        SieveQuery::Rset { k } => {
            let r = r_set_report(*k)?;
            let extremal = json!({ "report": r, "printed_matches": r.printed_matches() });
            report("rset", json!({ "k": k }), Exceptions::Values(Vec::new()), extremal)
        }
        SieveQuery::Bound { k, l, variant, convention } => {
            let variant = match variant {
                VariantArg::PrimeCorrected => BoundVariant::PrimeCorrected,
                VariantArg::TwoFree => BoundVariant::TwoFree,
            };
            let convention = match convention {
                ConventionArg::Consistent => PiConvention::Consistent,
                ConventionArg::Printed => PiConvention::Printed,
            };
            let b = smoothness_bound(*k, *l, variant, convention)?;
            report(
                "bound",
                json!({ "k": k, "l": l }),
                Exceptions::Values(Vec::new()),
                serde_json::to_value(b).map_err(|e| crate::config::CliError::Internal(e.to_string()))?,
            )
        }
        SieveQuery::Growth { k, v0 } => {
            let (lhs, rhs) = growth_sides(*k, *v0);
            report(
                "growth",
                json!({ "k": k, "v0": v0 }),
                Exceptions::Values(Vec::new()),
                json!({ "lhs": lhs, "rhs": rhs, "holds": growth_inequality(*k, *v0) }),
            )
        }
        SieveQuery::Lemma43 { n, d, k } => {
            let holds = lemma43_predicate(*n, *d, *k)?;
            report(
                "lemma43",
                json!({ "n": n, "d": d, "k": k }),
                Exceptions::Values(Vec::new()),
                json!({ "holds": holds }),
            )
        }
    };
    let tsv = tsv_of(&report);
    Output::new(&report, tsv)
}

/// Exceptions one per line; queries without exceptions list their extremal fields.
fn tsv_of(report: &SieveReport) -> String {
    let mut out = String::new();
    match &report.exceptions {
        Exceptions::Values(v) if !v.is_empty() => {
            out.push_str("n\n");
            for x in v {
                let _ = writeln!(out, "{x}");
            }
        }
        Exceptions::Pairs(v) if !v.is_empty() => {
            out.push_str("first\tsecond\n");
            for (a, b) in v {
                let _ = writeln!(out, "{a}\t{b}");
            }
        }
        _ => {
            out.push_str("key\tvalue\n");
            if let Value::Object(map) = &report.extremal {
                for (k, v) in map {
                    match v {
                        Value::String(s) => writeln!(out, "{k}\t{s}"),
                        other => writeln!(out, "{k}\t{other}"),
                    }
                    .ok();
                }
            }
        }
    }
    out
}
