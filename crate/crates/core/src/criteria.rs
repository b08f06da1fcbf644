//! Degree exclusions from prime witnesses and Newton-polygon slope criteria.
//!
//! Every exclusion is stored as an [`ExclusionRecord`] covering a contiguous run of
//! degrees of `G(x^delta)`. Since a factor of degree `D` comes with a cofactor of
//! degree `m - D`, each run is mirrored into a record that points back at its source.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghl::{GhlParams, SeedCoefficients};
use crate::newton::{self, ghl_polygon, NewtonPolygon};
use crate::sieve::primes_up_to;
use crate::valuation::{self, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    #[serde(rename = "DLK_PRIME")]
    DlkPrime,
    #[serde(rename = "LEMMA_R")]
    LemmaR,
    #[serde(rename = "SLOPE_WINDOW")]
    SlopeWindow,
    #[serde(rename = "DELTA_DIVISIBILITY")]
    DeltaDivisibility,
    #[serde(rename = "SPECIAL_2ADIC")]
    Special2Adic,
    #[serde(rename = "SPECIAL_3ADIC")]
    Special3Adic,
    #[serde(rename = "LAGUERRE_NP")]
    LaguerreNp,
    /// Segment-level admissible degrees intersected over several primes.
    #[serde(rename = "NEWTON_DEGREES")]
    NewtonDegrees,
}

/// Which polygon a slope criterion was evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolygonSource {
    /// `G(x^delta)` built from the all-ones seed; valid for every seed with `p !| a_0 a_n`.
    Ones,
    /// The polynomial itself.
    Seed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    DlkPrime {
        k: usize,
        prime: u64,
        divided_term: i64,
        top_terms: Vec<i64>,
    },
    LemmaR {
        prime: u64,
        k: usize,
        r: i64,
        #[serde(with = "crate::ratio_serde")]
        head: Ratio<i64>,
        #[serde(with = "crate::ratio_serde")]
        tail: Ratio<i64>,
        polygon: PolygonSource,
    },
    SlopeWindow {
        prime: u64,
        l: usize,
        k: usize,
        #[serde(with = "crate::ratio_serde")]
        max_slope: Ratio<i64>,
        polygon: PolygonSource,
    },
    DeltaDivisibility {
        prime: u64,
        delta: u64,
        segment_widths: Vec<usize>,
    },
    NewtonDegrees {
        primes: Vec<u64>,
    },
    Special2Adic {
        breaks: Vec<usize>,
        #[serde(with = "crate::ratio_serde")]
        min_slope: Ratio<i64>,
        #[serde(with = "crate::ratio_serde")]
        max_slope: Ratio<i64>,
        r_by_degree: Vec<(usize, i64)>,
        tail_variant: bool,
    },
    Special3Adic {
        j0: u64,
        l0: u64,
        s_checked: u64,
        #[serde(with = "crate::ratio_serde")]
        max_slope: Ratio<i64>,
    },
    LaguerreNp {
        prime: u64,
        vertices: Vec<(usize, u64)>,
        claims: [bool; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionRecord {
    /// Degree the criterion was applied to (for `DLK_PRIME`, a degree of `G(x)`).
    pub k: usize,
    /// Excluded degrees of `G(x^delta)`, inclusive.
    pub k_range: [usize; 2],
    pub method: Method,
    #[serde(rename = "prime", skip_serializing_if = "Option::is_none")]
    pub witness_prime: Option<u64>,
    pub evidence: Evidence,
    /// Set when this run is the mirror `m - D` of another record's run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement_of: Option<[usize; 2]>,
}

impl ExclusionRecord {
    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        self.k_range[0]..=self.k_range[1]
    }
}

/// Tracks which degrees in `[1, m-1]` are still possible and emits disjoint records.
#[derive(Debug, Clone)]
pub struct ExclusionLedger {
    m: usize,
    open: Vec<bool>,
    records: Vec<ExclusionRecord>,
}

pub(crate) fn runs(sorted: &[usize]) -> Vec<[usize; 2]> {
    let mut out: Vec<[usize; 2]> = Vec::new();
    for &d in sorted {
        match out.last_mut() {
            Some(run) if run[1] + 1 == d => run[1] = d,
            _ => out.push([d, d]),
        }
    }
    out
}

impl ExclusionLedger {
    pub fn new(m: usize) -> Self {
        let mut open = vec![true; m + 1];
        open[0] = false;
        open[m] = false;
        ExclusionLedger {
            m,
            open,
            records: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_open(&self, degree: usize) -> bool {
        degree <= self.m && self.open[degree]
    }

    pub fn residual(&self) -> Vec<usize> {
        (1..self.m).filter(|&d| self.open[d]).collect()
    }

    pub fn is_done(&self) -> bool {
        self.open.iter().all(|o| !o)
    }

    pub fn records(&self) -> &[ExclusionRecord] {
        &self.records
    }

    /// Excludes the still-open members of `degrees` and their mirrors. Returns the
    /// number of degrees newly closed.
    pub fn exclude(
        &mut self,
        k: usize,
        method: Method,
        witness_prime: Option<u64>,
        evidence: Evidence,
        degrees: impl IntoIterator<Item = usize>,
    ) -> usize {
        let fresh: BTreeSet<usize> = degrees.into_iter().filter(|&d| self.is_open(d)).collect();
        let fresh: Vec<usize> = fresh.into_iter().collect();
        let mut closed = 0;
        for candidate in runs(&fresh) {
            // An earlier mirror may already have closed part of this run.
            let still: Vec<usize> = (candidate[0]..=candidate[1]).filter(|&d| self.is_open(d)).collect();
            for run in runs(&still) {
                closed += self.close_run(k, method, witness_prime, &evidence, run);
            }
        }
        closed
    }

    fn close_run(
        &mut self,
        k: usize,
        method: Method,
        witness_prime: Option<u64>,
        evidence: &Evidence,
        run: [usize; 2],
    ) -> usize {
        let mut closed = 0;
        for d in run[0]..=run[1] {
            self.open[d] = false;
        }
        closed += run[1] - run[0] + 1;
        self.records.push(ExclusionRecord {
            k,
            k_range: run,
            method,
            witness_prime,
            evidence: evidence.clone(),
            complement_of: None,
        });
        let mirrored: Vec<usize> = (self.m - run[1]..=self.m - run[0])
            .filter(|&d| self.is_open(d))
            .collect();
        for mrun in runs(&mirrored) {
            for d in mrun[0]..=mrun[1] {
                self.open[d] = false;
            }
            closed += mrun[1] - mrun[0] + 1;
            self.records.push(ExclusionRecord {
                k,
                k_range: mrun,
                method,
                witness_prime,
                evidence: evidence.clone(),
                complement_of: Some(run),
            });
        }
        closed
    }

    pub fn into_parts(self) -> (Vec<ExclusionRecord>, Vec<usize>) {
        let residual = self.residual();
        (self.records, residual)
    }
}

fn check_dlk_inputs(params: &GhlParams, k: usize) -> Result<()> {
    params.validate()?;
    if params.u != -1 && params.u != 0 {
        return Err(Error::UnsupportedOffset(params.u));
    }
    if k == 0 || 2 * k > params.n {
        return Err(Error::DegreeOutOfRange {
            k,
            max: params.n / 2,
        });
    }
    Ok(())
}

fn distinct_prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// The `k` top factors `alpha + (u + n - j) d`, `j = 0..k`.
pub fn top_terms(params: &GhlParams, k: usize) -> Vec<i64> {
    (0..k).map(|j| params.term((params.n - j) as i64)).collect()
}

/// Largest prime `p` with `p | prod_{j<k} (alpha+(u+n-j)d)`, `p !| prod_{j=1}^{k} (alpha+(u+j)d)`,
/// `p !| a_0 a_n`, `p > d` and `p >= min(2k, d(d-1))`.
pub fn find_exclusion_prime(
    params: &GhlParams,
    k: usize,
    seed: &SeedCoefficients,
) -> Result<Option<u64>> {
    check_dlk_inputs(params, k)?;
    let low: Vec<i64> = (1..=k as i64).map(|j| params.term(j)).collect();
    let d = params.d;
    let size_floor = (2 * k as u64).min(d * (d - 1));
    let mut best = None;
    for term in top_terms(params, k) {
        for p in distinct_prime_factors(term.unsigned_abs()) {
            if p <= d || p < size_floor || best.is_some_and(|b| b >= p) {
                continue;
            }
            if low.iter().any(|t| t % p as i64 == 0) || seed.end_product_divisible_by(p) {
                continue;
            }
            best = Some(p);
        }
    }
    Ok(best)
}

/// Re-checks all five witness conditions on assembled big-integer products.
pub fn verify_exclusion_prime(
    params: &GhlParams,
    k: usize,
    seed: &SeedCoefficients,
    p: u64,
) -> bool {
    if check_dlk_inputs(params, k).is_err() || !valuation::is_prime(p) {
        return false;
    }
    let pb = BigInt::from(p);
    let top: BigInt = (0..k)
        .map(|j| BigInt::from(params.term((params.n - j) as i64)))
        .fold(BigInt::one(), |a, b| a * b);
    let low: BigInt = (1..=k)
        .map(|j| BigInt::from(params.term(j as i64)))
        .fold(BigInt::one(), |a, b| a * b);
    let d = params.d;
    (&top % &pb).is_zero()
        && !(&low % &pb).is_zero()
        && !(seed.end_product() % &pb).is_zero()
        && p > d
        && p >= (2 * k as u64).min(d * (d - 1))
}

/// Degrees of `G(x^delta)` excluded by a degree-`k` witness for `G(x)`.
pub fn dlk_degrees(params: &GhlParams, k: usize) -> std::ops::RangeInclusive<usize> {
    let delta = params.delta as usize;
    if delta == 1 {
        k..=k
    } else {
        delta * k - delta + 1..=delta * k
    }
}

pub fn dlk_evidence(params: &GhlParams, k: usize, p: u64) -> Evidence {
    let terms = top_terms(params, k);
    let divided_term = terms.iter().copied().find(|t| t % p as i64 == 0).unwrap_or(0);
    Evidence::DlkPrime {
        k,
        prime: p,
        divided_term,
        top_terms: terms,
    }
}

/// Options for the generic pipeline.
#[derive(Debug, Clone, Default)]
pub struct ExcludeOptions {
    /// Primes tried by the slope criteria; defaults to all primes up to
    /// `alpha + d(u+n) + n + 2`.
    pub primes: Option<Vec<u64>>,
}

impl ExcludeOptions {
    pub fn primes_for(&self, params: &GhlParams) -> Vec<u64> {
        match &self.primes {
            Some(ps) => ps.clone(),
            None => {
                let top = params.top_term().unsigned_abs() + params.n as u64 + 2;
                primes_up_to(top)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionReport {
    pub records: Vec<ExclusionRecord>,
    /// Degrees in `[1, m-1]` left open.
    pub unresolved: Vec<usize>,
}

/// Applies DLK witnesses to `ledger`, one search per `k` in parallel.
pub fn apply_dlk(
    ledger: &mut ExclusionLedger,
    params: &GhlParams,
    seed: &SeedCoefficients,
) -> Result<()> {
    let found: Vec<(usize, Option<u64>)> = (1..=params.n / 2)
        .into_par_iter()
        .map(|k| find_exclusion_prime(params, k, seed).map(|p| (k, p)))
        .collect::<Result<_>>()?;
    for (k, p) in found {
        if let Some(p) = p {
            if !verify_exclusion_prime(params, k, seed, p) {
                return Err(Error::Internal(format!("witness {p} for k = {k} fails re-check")));
            }
            ledger.exclude(
                k,
                Method::DlkPrime,
                Some(p),
                dlk_evidence(params, k, p),
                dlk_degrees(params, k),
            );
        }
    }
    Ok(())
}

/// Polygons on which the slope criteria are valid for this seed at `p`.
pub(crate) fn criterion_polygons(
    params: &GhlParams,
    seed: &SeedCoefficients,
    p: u64,
) -> Result<Vec<(PolygonSource, NewtonPolygon)>> {
    let mut out = Vec::new();
    let ones = SeedCoefficients::ones(params.n)?;
    if !seed.end_product_divisible_by(p) {
        out.push((PolygonSource::Ones, ghl_polygon(params, &ones, p)?));
    }
    if seed.values() != ones.values() {
        let own = ghl_polygon(params, seed, p)?;
        if !own.prime_divides_leading() {
            out.push((PolygonSource::Seed, own));
        }
    }
    Ok(out)
}

/// Largest window `[l+1, k]` allowed by the slope-window corollary on `np`.
pub(crate) fn widest_slope_window(np: &NewtonPolygon) -> Option<(usize, usize)> {
    if np.prime_divides_leading() {
        return None;
    }
    let m = np.degree;
    let l = (0..=m).rev().find(|&x| np.points[x] == Valuation::Finite(0))?;
    let slope = np.max_slope();
    if slope <= Ratio::zero() {
        return None;
    }
    // Largest k with k * slope < 1.
    let k = ((slope.denom() - 1) / slope.numer()) as usize;
    let k = k.min(m / 2);
    (k > l).then_some((l, k))
}

/// Slope-window then best-`r` lemma exclusions over `primes`.
pub fn apply_slope_criteria(
    ledger: &mut ExclusionLedger,
    params: &GhlParams,
    seed: &SeedCoefficients,
    primes: &[u64],
) -> Result<()> {
    let polys: Vec<(u64, Vec<(PolygonSource, NewtonPolygon)>)> = primes
        .par_iter()
        .map(|&p| criterion_polygons(params, seed, p).map(|v| (p, v)))
        .collect::<Result<_>>()?;
    let m = ledger.m();
    for (p, list) in &polys {
        for (source, np) in list {
            if let Some((l, k)) = widest_slope_window(np) {
                if (l + 1..=k).any(|d| ledger.is_open(d)) {
                    debug_assert!(newton::slope_window_on_polygon(np, l, k).unwrap_or(false));
                    ledger.exclude(
                        k,
                        Method::SlopeWindow,
                        None,
                        Evidence::SlopeWindow {
                            prime: *p,
                            l,
                            k,
                            max_slope: np.max_slope(),
                            polygon: *source,
                        },
                        l + 1..=k,
                    );
                }
            }
        }
    }
    for degree in 1..=m / 2 {
        if !ledger.is_open(degree) {
            continue;
        }
        'search: for (p, list) in &polys {
            for (source, np) in list {
                if let Some(r) = newton::lemma_r_best(np, degree)? {
                    let head = np.value_at(degree)?;
                    let tail = np.value_at(m)? - np.value_at(m - degree)?;
                    ledger.exclude(
                        degree,
                        Method::LemmaR,
                        None,
                        Evidence::LemmaR {
                            prime: *p,
                            k: degree,
                            r,
                            head,
                            tail,
                            polygon: *source,
                        },
                        [degree],
                    );
                    break 'search;
                }
            }
        }
    }
    Ok(())
}

/// Generic pipeline: prime witnesses first, then slope criteria.
pub fn exclude_degrees(
    params: &GhlParams,
    seed: &SeedCoefficients,
    options: &ExcludeOptions,
) -> Result<ExclusionReport> {
    params.validate()?;
    if seed.n() != params.n {
        return Err(Error::SeedLength {
            n: params.n,
            got: seed.values().len(),
        });
    }
    if params.u != -1 && params.u != 0 {
        return Err(Error::UnsupportedOffset(params.u));
    }
    let mut ledger = ExclusionLedger::new(params.total_degree());
    if params.n >= 2 {
        apply_dlk(&mut ledger, params, seed)?;
    }
    apply_slope_criteria(&mut ledger, params, seed, &options.primes_for(params))?;
    let (records, unresolved) = ledger.into_parts();
    Ok(ExclusionReport {
        records,
        unresolved,
    })
}
