//! Handlers for the parameter families where prime witnesses run out.

use num_rational::Ratio;
use serde::Serialize;

use super::breaks::{expected_breaks, two_power_exponent};
use crate::criteria::{runs, Evidence, ExclusionLedger, ExclusionRecord, Method};
use crate::error::{Error, Result};
use crate::ghl::{laguerre_seed, GhlParams, SeedCoefficients};
use crate::newton::{admissible_degrees, ghl_polygon, lemma_r_best, slope_window_on_polygon};
use crate::valuation::{is_prime, nu_small, ord_binomial, ord_term, Valuation};

/// Degrees closed by one handler, with the evidence that closes them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub method: Method,
    pub k: usize,
    pub witness_prime: Option<u64>,
    pub evidence: Evidence,
    pub degrees: Vec<usize>,
}

impl Finding {
    /// Standalone records, one per contiguous run, without mirrors.
    pub fn records(&self) -> Vec<ExclusionRecord> {
        runs(&self.degrees)
            .into_iter()
            .map(|run| ExclusionRecord {
                k: self.k,
                k_range: run,
                method: self.method,
                witness_prime: self.witness_prime,
                evidence: self.evidence.clone(),
                complement_of: None,
            })
            .collect()
    }

    pub(crate) fn apply(self, ledger: &mut ExclusionLedger) -> usize {
        ledger.exclude(self.k, self.method, self.witness_prime, self.evidence, self.degrees)
    }
}

/// 2-adic analysis for `d = 3`, `alpha + 3(u + n) = 2^a`. Excludes the degrees
/// `1..=delta` for which the lemma with the best `r` applies; degree `delta` itself
/// must be among them.
pub fn special_2adic_certify(params: &GhlParams, seed: &SeedCoefficients) -> Result<Finding> {
    let bs = expected_breaks(params)?;
    if seed.n() != params.n {
        return Err(Error::SeedLength {
            n: params.n,
            got: seed.values().len(),
        });
    }
    if seed.end_product_divisible_by(2) {
        return Err(Error::Hypothesis("2 divides a_0 a_n".into()));
    }
    let delta = params.delta as usize;
    let np = ghl_polygon(params, &SeedCoefficients::ones(params.n)?, 2)?;
    let realized = np.vertex_xs();
    let expected = bs.scaled(params.delta);
    let tail_variant = if realized == expected {
        false
    } else {
        let mut short = expected.clone();
        let documented = (params.u, params.alpha) == (-1, 1) && bs.s >= 2 && {
            short.remove(short.len() - 2);
            realized == short
        };
        if !documented {
            return Err(Error::BreakMismatch { expected, realized });
        }
        true
    };
    let inv = Ratio::new(1, delta as i64);
    let (min_slope, max_slope) = (np.min_slope(), np.max_slope());
    if min_slope <= inv {
        return Err(Error::SlopeBound(format!("minimum slope {min_slope} is not above {inv}")));
    }
    if max_slope >= inv * 2 {
        return Err(Error::SlopeBound(format!("maximum slope {max_slope} is not below {}", inv * 2)));
    }
    let mut r_by_degree = Vec::new();
    for k in 1..=delta.min(np.degree / 2) {
        if let Some(r) = lemma_r_best(&np, k)? {
            r_by_degree.push((k, r));
        }
    }
    if np.degree >= 2 * delta && r_by_degree.last().map(|kr| kr.0) != Some(delta) {
        return Err(Error::SlopeBound(format!("the lemma does not exclude degree {delta}")));
    }
    Ok(Finding {
        method: Method::Special2Adic,
        k: delta,
        witness_prime: Some(2),
        degrees: r_by_degree.iter().map(|kr| kr.0).collect(),
        evidence: Evidence::Special2Adic {
            breaks: realized,
            min_slope,
            max_slope,
            r_by_degree,
            tail_variant,
        },
    })
}

/// Direct and asymptotic parts of the 3-adic check for `d = 4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeAdicCheck {
    pub j0: u64,
    pub l0: u64,
    /// `(s, ord_3(Delta_{j0+3s}), 3(s+1))` for `s <= 3`.
    pub direct: Vec<(u64, u64, u64)>,
    /// Largest `s` for which `l0 + 4s < 3^(1.5(s+1))` was evaluated.
    pub s_checked: u64,
    pub asymptotic_ok: bool,
}

impl ThreeAdicCheck {
    pub fn holds(&self) -> bool {
        self.asymptotic_ok && self.direct.iter().all(|&(_, ord, bound)| ord < bound)
    }
}

pub const THREE_ADIC_S_RANGE: u64 = 10_000;

fn check_3adic_family(params: &GhlParams) -> Result<()> {
    params.validate()?;
    let family = params.d == 4 && matches!((params.u, params.alpha), (-1, 1) | (0, 3));
    if !family || params.top_term() % 3 != 0 {
        return Err(Error::WrongFamily(format!(
            "need d = 4, (u, alpha) in {{(-1, 1), (0, 3)}} and 3 | alpha + 4(u + n); got d = {}, u = {}, alpha = {}, top term {}",
            params.d,
            params.u,
            params.alpha,
            params.top_term()
        )));
    }
    Ok(())
}

pub fn special_3adic_report(params: &GhlParams) -> Result<ThreeAdicCheck> {
    check_3adic_family(params)?;
    let j0 = (1..=3).find(|&j| params.term(j) % 3 == 0).ok_or_else(|| {
        Error::Internal("no multiple of 3 among the first three terms".into())
    })?;
    let l0 = (params.term(j0) / 3) as u64;
    let direct = (0..=3u64)
        .map(|s| {
            let j = j0 + 3 * s as i64;
            let ord: u64 = (1..=j).map(|i| ord_term(3, params, i)).sum();
            (s, ord, 3 * (s + 1))
        })
        .collect();
    let asymptotic_ok = (4..=THREE_ADIC_S_RANGE)
        .all(|s| ((l0 + 4 * s) as f64).ln() < 1.5 * (s + 1) as f64 * 3f64.ln());
    Ok(ThreeAdicCheck {
        j0: j0 as u64,
        l0,
        direct,
        s_checked: THREE_ADIC_S_RANGE,
        asymptotic_ok,
    })
}

pub fn special_3adic_check(params: &GhlParams) -> Result<bool> {
    Ok(special_3adic_report(params)?.holds())
}

/// Excludes degrees `1..=delta` through the slope window with `l = 0` at `p = 3`,
/// after the family check passes.
pub fn special_3adic_certify(params: &GhlParams, seed: &SeedCoefficients) -> Result<Finding> {
    let report = special_3adic_report(params)?;
    if !report.holds() {
        return Err(Error::SlopeBound(format!("3-adic check fails: {report:?}")));
    }
    if seed.end_product_divisible_by(3) {
        return Err(Error::Hypothesis("3 divides a_0 a_n".into()));
    }
    let np = ghl_polygon(params, &SeedCoefficients::ones(params.n)?, 3)?;
    let k = (params.delta as usize).min(np.degree / 2);
    if k == 0 {
        return Err(Error::DegreeTooSmall { m: np.degree, k: 1, l: 0 });
    }
    if !slope_window_on_polygon(&np, 0, k)? {
        return Err(Error::SlopeBound(format!(
            "rightmost slope {} is not below 1/{k}",
            np.max_slope()
        )));
    }
    Ok(Finding {
        method: Method::Special3Adic,
        k,
        witness_prime: Some(3),
        degrees: (1..=k).collect(),
        evidence: Evidence::Special3Adic {
            j0: report.j0,
            l0: report.l0,
            s_checked: report.s_checked,
            max_slope: np.max_slope(),
        },
    })
}

fn is_smooth_power(mut x: u64, primes: &[u64]) -> Vec<u32> {
    let mut exps = Vec::new();
    for &p in primes {
        let mut e = 0;
        while x > 0 && x % p == 0 {
            x /= p;
            e += 1;
        }
        exps.push(e);
    }
    if x == 1 {
        exps
    } else {
        Vec::new()
    }
}

/// Name of the exceptional family containing `params`, including `1 + 4n = 3^b`.
pub fn exceptional_family(params: &GhlParams) -> Option<&'static str> {
    let top = params.top_term();
    if top <= 1 {
        return None;
    }
    let top = top as u64;
    let pos = |e: &[u32]| !e.is_empty() && e.iter().any(|&x| x > 0);
    match (params.d, params.u, params.alpha) {
        (3, 0, 1) if two_power_exponent(top as i64).is_some() => Some("1+3n=2^a"),
        (3, 0, 2) => {
            let e = is_smooth_power(top, &[2, 5]);
            (!e.is_empty() && e[1] > 0).then_some("2+3n=2^b5^c")
        }
        (4, -1, 3) => pos(&is_smooth_power(top, &[3])).then_some("3+4(n-1)=3^a"),
        (4, 0, 1) => pos(&is_smooth_power(top, &[3, 5])).then_some("1+4n=3^b5^c"),
        (4, 0, 3) => pos(&is_smooth_power(top, &[7])).then_some("3+4n=7^y"),
        _ => None,
    }
}

fn distinct_primes(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Largest prime `p | n` with `p !| d`, `p !| alpha + (u+n)d` and
/// `p !| (alpha+(u-1)d)(alpha+ud)(alpha+(u+1)d)`.
pub fn laguerre_np_prime(params: &GhlParams) -> Option<u64> {
    let guards = [params.top_term(), params.term(-1), params.term(0), params.term(1)];
    distinct_primes(params.n as u64)
        .into_iter()
        .filter(|&p| params.d % p != 0 && guards.iter().all(|t| t % p as i64 != 0))
        .max()
}

/// Newton polygon argument for `n! L_n^{(q)}(x^d)` in the exceptional families.
/// Excludes degree `d` of `G(x^d)`, or degree 1 of `G(x)` when `delta = 1`.
pub fn laguerre_np_certify(params: &GhlParams) -> Result<Finding> {
    params.validate()?;
    let family = exceptional_family(params).ok_or_else(|| {
        Error::WrongFamily(format!(
            "d = {}, u = {}, alpha = {}, n = {} is not in an exceptional family",
            params.d, params.u, params.alpha, params.n
        ))
    })?;
    let p = laguerre_np_prime(params).ok_or_else(|| {
        Error::NoQualifyingPrime(format!(
            "family {family}: no prime divisor of n = {} avoids d and alpha + d(u+n) = {}",
            params.n,
            params.top_term()
        ))
    })?;
    debug_assert!(is_prime(p));
    let full = params.with_delta(params.d)?;
    let (n, d) = (params.n, params.d as usize);
    // Points (d i, c_i + r_i) assembled directly from the definitions.
    let mut points = vec![Valuation::Infinite; n * d + 1];
    let mut c = 0u64;
    for i in 0..=n {
        if i > 0 {
            c += nu_small(p, full.term((n - i + 1) as i64) as i128).finite().unwrap_or(0);
        }
        points[d * i] = Valuation::Finite(c + ord_binomial(p, n as u64, i as u64));
    }
    let np = crate::newton::NewtonPolygon::from_valuations(p, points)?;
    let seeded = ghl_polygon(&full, &laguerre_seed(n)?, p)?;
    if seeded.vertices != np.vertices {
        return Err(Error::Internal(format!(
            "laguerre polygon at p = {p} disagrees with the coefficient polygon"
        )));
    }
    let xs: Vec<usize> = np.vertex_xs().iter().map(|x| x / d).collect();
    let t = xs.len() - 1;
    let claim1 = xs[1] >= 2;
    let claim2 = xs[t - 1] + 2 <= n;
    let gap = (1..t.saturating_sub(1)).find(|&l| xs[l + 1] - xs[l] < 2);
    if !claim1 {
        return Err(Error::ClaimViolation { claim: 1, left: 0, right: d * xs[1] });
    }
    if !claim2 {
        return Err(Error::ClaimViolation { claim: 2, left: d * xs[t - 1], right: d * n });
    }
    if let Some(l) = gap {
        return Err(Error::ClaimViolation { claim: 3, left: d * xs[l], right: d * xs[l + 1] });
    }
    if admissible_degrees(&np).contains(d) {
        return Err(Error::SegmentAdmits { prime: p, degree: d });
    }
    let degree = if params.delta == 1 { 1 } else { d };
    Ok(Finding {
        method: Method::LaguerreNp,
        k: degree,
        witness_prime: Some(p),
        degrees: vec![degree],
        evidence: Evidence::LaguerreNp {
            prime: p,
            vertices: np.vertices.clone(),
            claims: [claim1, claim2, gap.is_none()],
        },
    })
}
