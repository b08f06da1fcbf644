use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::primes_up_to;
use crate::error::{Error, Result};
use crate::valuation::ord_factorial;

/// `pi_l(x)`: primes `p <= x` with `p = l (mod modulus)`.
pub fn residue_prime_count(x: f64, modulus: u64, l: u64) -> u64 {
    if !(x >= 2.0) {
        return 0;
    }
    primes_up_to(x.floor() as u64)
        .into_iter()
        .filter(|p| p % modulus == l % modulus)
        .count() as u64
}

fn pi(x: u64) -> u64 {
    primes_up_to(x).len() as u64
}

fn r_alpha(k: u64) -> u64 {
    if k % 2 == 0 {
        1
    } else {
        2
    }
}

/// Primes dividing `prod_{i=1}^{k} (alpha + 3i)`, with `alpha = 1` for even `k`
/// and `alpha = 2` for odd `k`.
pub fn r_set(k: u64) -> Result<Vec<u64>> {
    if k < 2 {
        return Err(Error::InvalidParams("R(k) needs k >= 2".into()));
    }
    let alpha = r_alpha(k);
    let top = alpha + 3 * k;
    Ok(primes_up_to(top)
        .into_iter()
        .filter(|&p| (1..=k).any(|i| (alpha + 3 * i) % p == 0))
        .collect())
}

/// `|R(k)|` from direct computation next to two closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RSetReport {
    pub k: u64,
    pub alpha: u64,
    pub primes: Vec<u64>,
    pub direct: u64,
    /// `pi_l(3k+alpha) + pi_l((3k+alpha)/2) - 1` with `l = alpha`.
    pub printed_formula: i64,
    /// `pi_l(3k+alpha) + pi_{3-l}((3k+alpha)/2)`: primes of the own class up to the
    /// top term, plus primes of the other class whose double is a term.
    pub class_count_formula: u64,
}

impl RSetReport {
    pub fn printed_matches(&self) -> bool {
        self.printed_formula == self.direct as i64
    }
}

pub fn r_set_report(k: u64) -> Result<RSetReport> {
    let primes = r_set(k)?;
    let alpha = r_alpha(k);
    let top = (3 * k + alpha) as f64;
    let own = residue_prime_count(top, 3, alpha);
    let printed = own as i64 + residue_prime_count(top / 2.0, 3, alpha) as i64 - 1;
    let corrected = own + residue_prime_count(top / 2.0, 3, 3 - alpha);
    Ok(RSetReport {
        k,
        alpha,
        direct: primes.len() as u64,
        primes,
        printed_formula: printed,
        class_count_formula: corrected,
    })
}

/// Which prime count sits inside `L_0(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PiConvention {
    /// `pi(4k+3)` everywhere, matching the exponent.
    #[default]
    Consistent,
    /// `pi(4k)` inside `L_0(p)` as printed.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `((k-1)! prod_{p <= p_l} p^{L_0(p)})^{1/(k+1-pi(4k+3))}`.
    #[default]
    PrimeCorrected,
    /// `((k-1)! 2^{-ord_2((k-1)!)})^{1/(k+1-pi(4k+3))}`.
    TwoFree,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessBound {
    pub k: u64,
    pub l: u64,
    pub variant: BoundVariant,
    pub convention: PiConvention,
    pub exponent: u64,
    /// `(p, L_0(p))` for the primes used.
    pub l0: Vec<(u64, i64)>,
    /// Largest integer `r` with `r^exponent <= radicand`.
    pub floor_root: u64,
    pub value: f64,
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn floor_root(x: &BigUint, t: u64) -> u64 {
    let approx = (big_ln(x) / t as f64).exp();
    let mut lo = (approx * 0.999).floor().max(0.0) as u64;
    let mut hi = (approx * 1.001).ceil() as u64 + 2;
    let pow_le = |r: u64| BigUint::from(r).pow(t as u32) <= *x;
    while !pow_le(lo) {
        lo /= 2;
    }
    while pow_le(hi) {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pow_le(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Evaluates the smoothness bound for `d = 4`. The radicand is an exact integer and
/// the root is bracketed in integers before reporting a float.
pub fn smoothness_bound(
    k: u64,
    l: u64,
    variant: BoundVariant,
    convention: PiConvention,
) -> Result<SmoothnessBound> {
    if k < 2 {
        return Err(Error::InvalidParams("k must be at least 2".into()));
    }
    let t = k as i64 + 1 - pi(4 * k + 3) as i64;
    if t <= 0 {
        return Err(Error::NonpositiveExponent(t));
    }
    let inner_t = match convention {
        PiConvention::Consistent => t,
        PiConvention::Printed => k as i64 + 1 - pi(4 * k) as i64,
    };
    let mut radicand: BigUint = (1..k).map(BigUint::from).product();
    if radicand.is_zero() {
        radicand = BigUint::one();
    }
    let mut l0 = Vec::new();
    let mut divisor = BigUint::one();
    match variant {
        BoundVariant::TwoFree => {
            let e = ord_factorial(2, k - 1);
            divisor <<= e;
            l0.push((2, -(e as i64)));
        }
        BoundVariant::PrimeCorrected => {
            let mut primes = Vec::new();
            let mut bound = 16;
            while primes.len() < l as usize {
                primes = primes_up_to(bound);
                bound *= 2;
            }
            for &p in primes.iter().take(l as usize) {
                let exp = if 4 % p == 0 {
                    -(ord_factorial(p, k - 1) as i64)
                } else {
                    let h = bracket(p, k, t)?;
                    let mut floor_sum = 0i64;
                    let mut pu = 1u64;
                    for _ in 0..h {
                        pu *= p;
                        floor_sum += ((k - 1) / pu) as i64;
                    }
                    (h as i64 * inner_t - floor_sum).min(0)
                };
                divisor *= BigUint::from(p).pow((-exp) as u32);
                l0.push((p, exp));
            }
        }
    }
    radicand /= divisor;
    let value = (big_ln(&radicand) / t as f64).exp();
    Ok(SmoothnessBound {
        k,
        l,
        variant,
        convention,
        exponent: t as u64,
        l0,
        floor_root: floor_root(&radicand, t as u64),
        value,
    })
}

/// The `h >= 0` with `[(k-1)/p^{h+1}] <= t < [(k-1)/p^h]`.
fn bracket(p: u64, k: u64, t: i64) -> Result<u64> {
    let t = t as u64;
    let mut h = 0u64;
    let mut ph = 1u64;
    loop {
        let here = (k - 1) / ph;
        let next = (k - 1) / (ph * p);
        if next <= t && t < here {
            return Ok(h);
        }
        if here <= t {
            return Err(Error::NoBracket { p, k });
        }
        h += 1;
        ph *= p;
    }
}

/// Both sides of `log(8 e v0) < 4 log(4 k v0) / log(4k+3) * (1 + 1.2762 / log(4k+3))`.
pub fn growth_sides(k: u64, v0: u64) -> (f64, f64) {
    let v0 = v0 as f64;
    let k = k as f64;
    let lhs = (v0 * 8.0).ln() + 1.0;
    let lk = (4.0 * k + 3.0).ln();
    let rhs = 4.0 * (v0 * 4.0 * k).ln() / lk * (1.0 + 1.2762 / lk);
    (lhs, rhs)
}

pub fn growth_inequality(k: u64, v0: u64) -> bool {
    let (lhs, rhs) = growth_sides(k, v0);
    lhs < rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_counts() {
        assert_eq!(residue_prime_count(10.0, 3, 1), 1);
        assert_eq!(residue_prime_count(10.0, 3, 2), 2);
        assert_eq!(residue_prime_count(1.0, 3, 1), 0);
        assert_eq!(residue_prime_count(1.0, 3, 2), 0);
    }

    #[test]
    fn r_set_examples() {
        assert_eq!(r_set(2).unwrap(), vec![2, 7]);
        assert_eq!(r_set(3).unwrap(), vec![2, 5, 11]);
        assert_eq!(r_set(4).unwrap(), vec![2, 5, 7, 13]);
        assert!(r_set(1).is_err());
    }

    #[test]
    fn class_count_formula_matches_direct() {
        for k in 2..400 {
            let r = r_set_report(k).unwrap();
            assert_eq!(r.class_count_formula, r.direct, "k={k}");
        }
    }

    #[test]
    fn printed_formula_disagrees_somewhere() {
        let mismatches = (2..400).filter(|&k| !r_set_report(k).unwrap().printed_matches()).count();
        assert!(mismatches > 0);
    }

    #[test]
    fn bound_below_threshold_for_mid_range() {
        let worst = (67..=400)
            .map(|k| {
                smoothness_bound(k, 3, BoundVariant::PrimeCorrected, PiConvention::Consistent)
                    .unwrap()
                    .value
            })
            .fold(0.0, f64::max);
        assert!(worst < 1.1e7, "worst = {worst}");
    }

    #[test]
    fn bound_golden_values() {
        let b = smoothness_bound(67, 3, BoundVariant::PrimeCorrected, PiConvention::Consistent)
            .unwrap();
        assert_eq!(b.exponent, 10);
        assert_eq!(b.floor_root, 3_670_784);
        let b = smoothness_bound(401, 3, BoundVariant::PrimeCorrected, PiConvention::Consistent)
            .unwrap();
        assert_eq!(b.exponent, 149);
        assert_eq!(b.floor_root, 106_866);
        let b = smoothness_bound(400, 3, BoundVariant::PrimeCorrected, PiConvention::Consistent)
            .unwrap();
        assert_eq!(b.floor_root, 104_582);
    }

    #[test]
    fn floor_root_is_exact() {
        for k in [67u64, 150, 400, 401] {
            for variant in [BoundVariant::PrimeCorrected, BoundVariant::TwoFree] {
                let b = smoothness_bound(k, 3, variant, PiConvention::Consistent).unwrap();
                assert!(b.value >= b.floor_root as f64 && b.value < b.floor_root as f64 + 1.0);
            }
        }
    }

    #[test]
    fn nonpositive_exponent() {
        assert!(matches!(
            smoothness_bound(10, 3, BoundVariant::PrimeCorrected, PiConvention::Consistent),
            Err(Error::NonpositiveExponent(_))
        ));
    }

    #[test]
    fn growth_examples() {
        assert!(!growth_inequality(401, 138));
        assert!(growth_inequality(1, 138));
        let (lhs, rhs) = growth_sides(401, 138);
        assert!((lhs - 8.0073).abs() < 1e-3);
        assert!(rhs < lhs);
        assert!(growth_sides(401, 138).1 > growth_sides(800, 138).1);
    }
}
