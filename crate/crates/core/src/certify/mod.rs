//! Full certificates: prime witnesses, family-specific polygon analyses, then
//! generic slope and Dumas exclusions until nothing more can be closed.

mod breaks;
mod special;

pub use breaks::{
    break_valuation_report, expected_breaks, verify_break_valuations, BreakRow, BreakSequence,
    BreakValuationReport,
};
pub use special::{
    exceptional_family, laguerre_np_certify, laguerre_np_prime, special_2adic_certify,
    special_3adic_certify, special_3adic_check, special_3adic_report, Finding, ThreeAdicCheck,
    THREE_ADIC_S_RANGE,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{
    apply_dlk, apply_slope_criteria, Evidence, ExcludeOptions, ExclusionLedger, ExclusionRecord,
    Method,
};
use crate::error::{Error, Result};
use crate::ghl::{GhlParams, SeedCoefficients, SeedKind};
use crate::newton::{admissible_degrees, ghl_polygon};
use crate::sieve::primes_up_to;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    IrreducibleCertified,
    ExclusionsOnly,
    /// Residual degrees remain and the instance lies in a known exceptional family.
    ExceptionalFamily,
}

/// Seed conditions the irreducibility results assume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// `P(a_0 a_n) <= 3`.
    pub end_product_3_smooth: bool,
    /// `2 !| a_0 a_n` when `d = 3` and the top term is a power of 2, or
    /// `P(a_0 a_n) <= 2` when `d = 4` and it is a power of 3. `None` when not required.
    pub side_condition: Option<bool>,
}

impl Hypotheses {
    pub fn hold(&self) -> bool {
        self.end_product_3_smooth && self.side_condition != Some(false)
    }
}

fn strip(mut x: BigInt, p: u32) -> BigInt {
    let p = BigInt::from(p);
    while !x.is_zero() && x.is_multiple_of(&p) {
        x /= &p;
    }
    x
}

pub fn check_hypotheses(params: &GhlParams, seed: &SeedCoefficients) -> Hypotheses {
    let end = seed.end_product().abs();
    let without_2 = strip(end.clone(), 2);
    let smooth3 = strip(without_2.clone(), 3).is_one();
    let top = params.top_term();
    let side_condition = match params.d {
        3 if breaks::two_power_exponent(top).is_some() => Some(end.is_odd()),
        4 if top > 1 && strip(BigInt::from(top), 3).is_one() => Some(without_2.is_one()),
        _ => None,
    };
    Hypotheses {
        end_product_3_smooth: smooth3,
        side_condition,
    }
}

#[derive(Debug, Clone, Default)]
pub struct CertifyOptions {
    /// Primes for the slope and Dumas stages; defaults to all primes up to
    /// `alpha + d(u+n) + n + 2`.
    pub primes: Option<Vec<u64>>,
    /// Turn seed hypothesis violations into errors.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub params: GhlParams,
    pub seed: SeedKind,
    /// Seed values as decimal strings, for custom seeds only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_values: Option<Vec<String>>,
    pub degree: usize,
    pub records: Vec<ExclusionRecord>,
    pub residual: Vec<usize>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<&'static str>,
    pub hypotheses: Hypotheses,
    pub notes: Vec<String>,
}

impl Certificate {
    /// Every degree in `[1, m-1]` is either in exactly one record or residual.
    pub fn check_partition(&self) -> Result<()> {
        let m = self.degree;
        let mut hits = vec![0usize; m + 1];
        for r in &self.records {
            let [lo, hi] = r.k_range;
            if lo == 0 || lo > hi || hi >= m {
                return Err(Error::Internal(format!("record range [{lo}, {hi}] outside [1, {}]", m - 1)));
            }
            for d in lo..=hi {
                hits[d] += 1;
            }
        }
        for &d in &self.residual {
            if d == 0 || d >= m {
                return Err(Error::Internal(format!("residual degree {d} outside [1, {}]", m - 1)));
            }
            hits[d] += 1;
        }
        if let Some(d) = (1..m).find(|&d| hits[d] != 1) {
            return Err(Error::Internal(format!("degree {d} is covered {} times", hits[d])));
        }
        let certified = self.verdict == Verdict::IrreducibleCertified;
        if certified != self.residual.is_empty() {
            return Err(Error::Internal("verdict disagrees with residual degrees".into()));
        }
        Ok(())
    }

    /// Whether degree `k` was excluded, and by which record.
    pub fn record_for(&self, k: usize) -> Option<&ExclusionRecord> {
        self.records.iter().find(|r| r.k_range[0] <= k && k <= r.k_range[1])
    }
}

/// Primes dividing `alpha + d(u+n)` give Dumas restrictions on the seed polygon.
fn apply_delta_divisibility(
    ledger: &mut ExclusionLedger,
    params: &GhlParams,
    seed: &SeedCoefficients,
) -> Result<()> {
    let top = params.top_term().unsigned_abs();
    for p in primes_up_to(top).into_iter().filter(|p| top % p == 0) {
        let np = ghl_polygon(params, seed, p)?;
        let admissible = admissible_degrees(&np);
        let closed: Vec<usize> = (1..ledger.m()).filter(|&k| !admissible.contains(k)).collect();
        if let Some(&first) = closed.iter().find(|&&k| ledger.is_open(k)) {
            ledger.exclude(
                first,
                Method::DeltaDivisibility,
                Some(p),
                Evidence::DeltaDivisibility {
                    prime: p,
                    delta: params.delta,
                    segment_widths: np.segment_widths(),
                },
                closed,
            );
        }
    }
    Ok(())
}

fn apply_newton_degrees(
    ledger: &mut ExclusionLedger,
    params: &GhlParams,
    seed: &SeedCoefficients,
    primes: &[u64],
) -> Result<()> {
    for &p in primes {
        if ledger.is_done() {
            break;
        }
        let admissible = admissible_degrees(&ghl_polygon(params, seed, p)?);
        let closed: Vec<usize> = ledger.residual().into_iter().filter(|&k| !admissible.contains(k)).collect();
        if let Some(&first) = closed.first() {
            ledger.exclude(
                first,
                Method::NewtonDegrees,
                Some(p),
                Evidence::NewtonDegrees { primes: vec![p] },
                closed,
            );
        }
    }
    Ok(())
}

fn run_special(
    ledger: &mut ExclusionLedger,
    notes: &mut Vec<String>,
    label: &str,
    outcome: Result<Finding>,
) -> Result<()> {
    match outcome {
        Ok(finding) => {
            let closed = finding.apply(ledger);
            notes.push(format!("{label}: closed {closed} degrees"));
            Ok(())
        }
        Err(e) if e.is_internal() => Err(e),
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            Ok(())
        }
    }
}

pub fn full_certify(
    params: &GhlParams,
    seed: &SeedCoefficients,
    options: &CertifyOptions,
) -> Result<Certificate> {
    params.validate()?;
    if seed.n() != params.n {
        return Err(Error::SeedLength {
            n: params.n,
            got: seed.values().len(),
        });
    }
    let hypotheses = check_hypotheses(params, seed);
    if options.strict && !hypotheses.hold() {
        return Err(Error::Hypothesis(format!("seed end product violates {hypotheses:?}")));
    }
    let m = params.total_degree();
    let mut ledger = ExclusionLedger::new(m);
    let mut notes = Vec::new();

    if params.u == -1 || params.u == 0 {
        apply_dlk(&mut ledger, params, seed)?;
    } else {
        notes.push(format!("prime witnesses skipped: u = {} is not -1 or 0", params.u));
    }

    let top = params.top_term();
    if params.d == 3 && breaks::two_power_exponent(top).is_some() && !ledger.is_done() {
        run_special(&mut ledger, &mut notes, "2-adic analysis", special_2adic_certify(params, seed))?;
    }
    if params.d == 4 && matches!((params.u, params.alpha), (-1, 1) | (0, 3)) && top % 3 == 0 && !ledger.is_done() {
        run_special(&mut ledger, &mut notes, "3-adic analysis", special_3adic_certify(params, seed))?;
    }
    let family = exceptional_family(params);
    if seed.kind().is_laguerre() && family.is_some() && !ledger.is_done() {
        run_special(&mut ledger, &mut notes, "Laguerre polygon analysis", laguerre_np_certify(params))?;
    }

    if !ledger.is_done() {
        apply_delta_divisibility(&mut ledger, params, seed)?;
    }
    let primes = ExcludeOptions {
        primes: options.primes.clone(),
    }
    .primes_for(params);
    if !ledger.is_done() {
        apply_slope_criteria(&mut ledger, params, seed, &primes)?;
    }
    if !ledger.is_done() {
        apply_newton_degrees(&mut ledger, params, seed, &primes)?;
    }

    let (records, residual) = ledger.into_parts();
    let verdict = if residual.is_empty() {
        Verdict::IrreducibleCertified
    } else if seed.kind().is_laguerre() && family.is_some() {
        Verdict::ExceptionalFamily
    } else {
        Verdict::ExclusionsOnly
    };
    let seed_values = (seed.kind() == SeedKind::Custom)
        .then(|| seed.values().iter().map(|v| v.to_string()).collect());
    let certificate = Certificate {
        schema_version: SCHEMA_VERSION,
        params: *params,
        seed: seed.kind(),
        seed_values,
        degree: m,
        records,
        residual,
        verdict,
        family,
        hypotheses,
        notes,
    };
    certificate.check_partition()?;
    Ok(certificate)
}

/// Certifies independent instances in parallel, preserving input order.
pub fn certify_batch(
    jobs: &[(GhlParams, SeedCoefficients)],
    options: &CertifyOptions,
) -> Vec<Result<Certificate>> {
    jobs.par_iter()
        .map(|(params, seed)| full_certify(params, seed, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghl::laguerre_seed;

    fn certify(d: u64, u: i64, alpha: u64, n: usize, delta: u64, seed: SeedCoefficients) -> Certificate {
        let params = GhlParams::new(d, u, alpha, n, delta).unwrap();
        full_certify(&params, &seed, &CertifyOptions::default()).unwrap()
    }

    #[test]
    fn minus_quarter_instance() {
        for delta in [1, 4] {
            let c = certify(4, -1, 3, 25, delta, laguerre_seed(25).unwrap());
            assert_eq!(c.verdict, Verdict::IrreducibleCertified, "{:?}", c.residual);
        }
    }

    #[test]
    fn smallest_case() {
        for delta in [1, 3] {
            let c = certify(3, 0, 1, 2, delta, laguerre_seed(2).unwrap());
            assert_eq!(c.verdict, Verdict::IrreducibleCertified);
        }
    }

    #[test]
    fn cubic_exception_with_ones_seed() {
        let c = certify(3, 0, 2, 16, 3, SeedCoefficients::ones(16).unwrap());
        assert_ne!(c.verdict, Verdict::ExceptionalFamily);
        assert!(c.residual.iter().all(|&k| k == 3 || k == 45), "{:?}", c.residual);
        let c = certify(3, 0, 2, 16, 1, SeedCoefficients::ones(16).unwrap());
        assert!(c.residual.is_empty());
    }

    #[test]
    fn laguerre_family_without_prime_is_flagged() {
        let c = certify(3, 0, 2, 16, 3, laguerre_seed(16).unwrap());
        assert_eq!(c.verdict, Verdict::ExceptionalFamily);
        assert_eq!(c.residual, vec![3, 45]);
        assert!(c.notes.iter().any(|n| n.contains("no qualifying prime")));
    }

    #[test]
    fn reducible_instance_is_not_certified() {
        // x^2 - 18x + 45 = (x - 3)(x - 15).
        let c = certify(4, 0, 1, 2, 1, laguerre_seed(2).unwrap());
        assert_eq!(c.residual, vec![1]);
        let c = certify(4, 0, 1, 2, 4, laguerre_seed(2).unwrap());
        assert_eq!(c.residual, vec![4]);
        assert_eq!(c.verdict, Verdict::ExceptionalFamily);
    }

    #[test]
    fn hypotheses_and_strict_mode() {
        let params = GhlParams::new(3, -1, 2, 43, 1).unwrap();
        let mut v = vec![BigInt::one(); 44];
        v[0] = BigInt::from(2);
        let seed = SeedCoefficients::new(v).unwrap();
        let h = check_hypotheses(&params, &seed);
        assert!(h.end_product_3_smooth);
        assert_eq!(h.side_condition, Some(false));
        let strict = CertifyOptions {
            strict: true,
            ..Default::default()
        };
        assert!(matches!(full_certify(&params, &seed, &strict), Err(Error::Hypothesis(_))));
        let c = full_certify(&params, &seed, &CertifyOptions::default()).unwrap();
        assert_eq!(c.seed, SeedKind::Custom);
        assert!(c.seed_values.is_some());
    }

    #[test]
    fn partition_checker_catches_overlap() {
        let mut c = certify(3, 0, 1, 2, 3, laguerre_seed(2).unwrap());
        c.check_partition().unwrap();
        c.residual.push(c.records[0].k_range[0]);
        assert!(c.check_partition().unwrap_err().is_internal());
    }

    #[test]
    fn json_schema_fields() {
        let c = certify(4, -1, 3, 25, 4, laguerre_seed(25).unwrap());
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert_eq!(json["params"]["alpha"], 3);
        assert_eq!(json["seed"], "laguerre");
        assert_eq!(json["verdict"], "IRREDUCIBLE_CERTIFIED");
        assert!(json["records"][0]["k_range"].is_array());
        assert!(json["residual"].as_array().unwrap().is_empty());
    }

    #[test]
    fn batch_keeps_order() {
        let jobs: Vec<_> = (2..12)
            .map(|n| (GhlParams::new(3, -1, 1, n, 3).unwrap(), laguerre_seed(n).unwrap()))
            .collect();
        let out = certify_batch(&jobs, &CertifyOptions::default());
        for (i, c) in out.into_iter().enumerate() {
            assert_eq!(c.unwrap().params.n, i + 2);
        }
    }
}
