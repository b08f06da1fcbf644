mod common;

use common::{find_factor, rational_root};
use ghl_core::certify::{full_certify, CertifyOptions, Certificate, Verdict};
use ghl_core::criteria::{dlk_degrees, verify_exclusion_prime, Evidence, ExclusionRecord, PolygonSource};
use ghl_core::ghl::{build_substituted, laguerre_seed};
use ghl_core::newton::{
    admissible_degrees, build_polygon, ghl_polygon, lemma_r_on_polygon, slope_window_on_polygon,
};
use ghl_core::{GhlParams, IntegerPolynomial, SeedCoefficients};
use num_bigint::BigInt;
use proptest::prelude::*;

fn families() -> Vec<(u64, i64, u64)> {
    let mut out = Vec::new();
    for (d, alphas) in [(3u64, vec![1u64, 2]), (4, vec![1, 3])] {
        for u in [-1i64, 0] {
            for &alpha in &alphas {
                out.push((d, u, alpha));
            }
        }
    }
    out
}

fn certify(params: &GhlParams, seed: &SeedCoefficients) -> Certificate {
    full_certify(params, seed, &CertifyOptions::default()).unwrap()
}

#[test]
fn oracle_finds_known_factors() {
    let f = IntegerPolynomial::from_i64(&[45, 0, 0, 0, -18, 0, 0, 0, 1]).unwrap();
    assert_eq!(find_factor(&f).unwrap().degree(), 4);
    let f = IntegerPolynomial::from_i64(&[6, -5, 1]).unwrap();
    assert_eq!(find_factor(&f).unwrap().degree(), 1);
    assert!(rational_root(&f).is_some());
    let f = IntegerPolynomial::from_i64(&[2, 0, 0, 1]).unwrap();
    assert!(find_factor(&f).is_none());
    assert!(rational_root(&f).is_none());
    assert!(find_factor(&IntegerPolynomial::from_i64(&[1, 0, 0, 0, 1]).unwrap()).is_none());
    // (x^2 + 2)(3x^3 - x + 5)
    let f = IntegerPolynomial::from_i64(&[2, 0, 1])
        .unwrap()
        .mul(&IntegerPolynomial::from_i64(&[5, -1, 0, 3]).unwrap());
    assert_eq!(find_factor(&f).unwrap().degree(), 2);
}

/// Every factor the oracle finds must be a residual degree; certified instances must
/// have none.
#[test]
fn small_certificates_agree_with_oracle() {
    let mut certified = 0;
    for (d, u, alpha) in families() {
        for delta in [1, d] {
            for n in 2..=12 / delta as usize {
                let params = GhlParams::new(d, u, alpha, n, delta).unwrap();
                for seed in [SeedCoefficients::ones(n).unwrap(), laguerre_seed(n).unwrap()] {
                    let cert = certify(&params, &seed);
                    let f = build_substituted(&params, &seed).unwrap();
                    match find_factor(&f) {
                        Some(g) => assert!(
                            cert.residual.contains(&g.degree()),
                            "{params:?} {:?}: factor {g} not residual",
                            seed.kind()
                        ),
                        None => {}
                    }
                    if cert.verdict == Verdict::IrreducibleCertified {
                        assert!(find_factor(&f).is_none());
                        certified += 1;
                    }
                }
            }
        }
    }
    assert!(certified > 100, "only {certified} certified");
}

#[test]
fn smallest_laguerre_case_has_no_factor() {
    for delta in [1, 3] {
        let params = GhlParams::new(3, 0, 1, 2, delta).unwrap();
        let f = build_substituted(&params, &laguerre_seed(2).unwrap()).unwrap();
        assert!(find_factor(&f).is_none());
        assert!(rational_root(&f).is_none());
    }
}

#[test]
fn two_power_family_has_no_linear_factor() {
    let params = GhlParams::new(3, 0, 1, 5, 1).unwrap();
    let f = build_substituted(&params, &laguerre_seed(5).unwrap()).unwrap();
    assert!(rational_root(&f).is_none());
    assert!(find_factor(&f).is_none());
}

#[test]
fn quarter_family_at_two_is_reducible() {
    let params = GhlParams::new(4, 0, 1, 2, 4).unwrap();
    let f = build_substituted(&params, &laguerre_seed(2).unwrap()).unwrap();
    assert_eq!(f.to_string(), "x^8 - 18x^4 + 45");
    let g = find_factor(&f).unwrap();
    assert_eq!(g.degree(), 4);
    let cert = certify(&params, &laguerre_seed(2).unwrap());
    assert_eq!(cert.residual, vec![4]);
}

/// Lattice segments of `G(x^delta)` can split into pieces whose widths are not
/// multiples of `delta` even when a prime divides the top factor.
#[test]
fn segment_widths_need_not_be_multiples_of_delta() {
    for (u, n) in [(0i64, 42usize), (-1, 43)] {
        let params = GhlParams::new(3, u, 2, n, 3).unwrap();
        assert_eq!(params.top_term(), 128);
        let np = ghl_polygon(&params, &SeedCoefficients::ones(n).unwrap(), 2).unwrap();
        let admissible = admissible_degrees(&np);
        assert!(admissible.iter().any(|k| k % 3 != 0), "u = {u}");
    }
}

fn explicit(params: &GhlParams, seed: &SeedCoefficients) -> IntegerPolynomial {
    build_substituted(params, seed).unwrap()
}

/// Checks one record against the explicit polynomial; `holds(k)` is the claim for the
/// primary degree `k`, applied to `m - k` for mirrored runs.
fn revalidate(
    record: &ExclusionRecord,
    params: &GhlParams,
    seed: &SeedCoefficients,
) -> Result<(), String> {
    let m = params.total_degree();
    let f = explicit(params, seed);
    let ones = explicit(params, &SeedCoefficients::ones(params.n).unwrap());
    let source_poly = |s: PolygonSource| match s {
        PolygonSource::Ones => &ones,
        PolygonSource::Seed => &f,
    };
    let not_admissible = |p: u64, k: usize| !admissible_degrees(&build_polygon(&f, p).unwrap()).contains(k);
    let holds: Box<dyn Fn(usize) -> bool> = match &record.evidence {
        Evidence::DlkPrime { k, prime, .. } => {
            let ok = verify_exclusion_prime(params, *k, seed, *prime);
            let range = dlk_degrees(params, *k);
            Box::new(move |d| ok && range.contains(&d))
        }
        Evidence::LemmaR { prime, k, r, polygon, .. } => {
            let np = build_polygon(source_poly(*polygon), *prime).unwrap();
            let seed_ok = *polygon == PolygonSource::Seed || !seed.end_product_divisible_by(*prime);
            let ok = seed_ok && lemma_r_on_polygon(&np, *k, *r).unwrap();
            let k = *k;
            Box::new(move |d| ok && d == k)
        }
        Evidence::SlopeWindow { prime, l, k, polygon, .. } => {
            let np = build_polygon(source_poly(*polygon), *prime).unwrap();
            let seed_ok = *polygon == PolygonSource::Seed || !seed.end_product_divisible_by(*prime);
            let ok = seed_ok && slope_window_on_polygon(&np, *l, *k).unwrap();
            let (l, k) = (*l, *k);
            Box::new(move |d| ok && l < d && d <= k)
        }
        Evidence::DeltaDivisibility { prime, .. } => {
            let p = *prime;
            Box::new(move |d| not_admissible(p, d))
        }
        Evidence::NewtonDegrees { primes } => {
            let primes = primes.clone();
            Box::new(move |d| primes.iter().all(|&p| not_admissible(p, d)))
        }
        Evidence::Special2Adic { r_by_degree, .. } => {
            let np = build_polygon(&ones, 2).unwrap();
            let ok = !seed.end_product_divisible_by(2)
                && r_by_degree.iter().all(|&(k, r)| lemma_r_on_polygon(&np, k, r).unwrap());
            let ks: Vec<usize> = r_by_degree.iter().map(|kr| kr.0).collect();
            Box::new(move |d| ok && ks.contains(&d))
        }
        Evidence::Special3Adic { .. } => {
            let np = build_polygon(&ones, 3).unwrap();
            let k = record.k;
            let ok = !seed.end_product_divisible_by(3) && slope_window_on_polygon(&np, 0, k).unwrap();
            Box::new(move |d| ok && d <= k)
        }
        Evidence::LaguerreNp { prime, .. } => {
            let full = params.with_delta(params.d).unwrap();
            let lag = explicit(&full, &laguerre_seed(params.n).unwrap());
            let ok = seed.kind().is_laguerre()
                && !admissible_degrees(&build_polygon(&lag, *prime).unwrap()).contains(params.d as usize);
            let degree = if params.delta == 1 { 1 } else { params.d as usize };
            Box::new(move |d| ok && d == degree)
        }
    };
    for d in record.degrees() {
        let primary = if record.complement_of.is_some() { m - d } else { d };
        if !holds(primary) {
            return Err(format!("{:?} fails at degree {d}", record.method));
        }
    }
    Ok(())
}

fn seed_strategy() -> impl Strategy<Value = (u8, Vec<i64>)> {
    (0u8..3, prop::collection::vec(prop_oneof![-12i64..=-1, 1i64..=12], 41))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn records_revalidate_independently(
        d in prop::sample::select(vec![3u64, 4, 5, 7]),
        u in -1i64..=0,
        alpha_pick in 0usize..6,
        n in 2usize..=24,
        substitute in any::<bool>(),
        (kind, raw) in seed_strategy(),
    ) {
        let alphas: Vec<u64> = (1..d).filter(|a| num_integer::gcd(*a, d) == 1).collect();
        let alpha = alphas[alpha_pick % alphas.len()];
        let delta = if substitute { d } else { 1 };
        let params = GhlParams::new(d, u, alpha, n, delta).unwrap();
        let seed = match kind {
            0 => SeedCoefficients::ones(n).unwrap(),
            1 => laguerre_seed(n).unwrap(),
            _ => SeedCoefficients::new(raw[..=n].iter().map(|&v| BigInt::from(v)).collect()).unwrap(),
        };
        let cert = certify(&params, &seed);
        cert.check_partition().unwrap();
        for record in &cert.records {
            prop_assert!(revalidate(record, &params, &seed).is_ok(), "{params:?}: {:?}", revalidate(record, &params, &seed));
        }
        if params.total_degree() <= 10 {
            if let Some(g) = find_factor(&explicit(&params, &seed)) {
                prop_assert!(cert.residual.contains(&g.degree()));
            }
        }
    }
}
