//! p-adic valuations of integers, factorials and the running products of `G`.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ghl::GhlParams;

/// `nu_p(r)`, with `Infinite` reserved for `r = 0`.
///
/// Variant order makes every finite value compare below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

// JSON carries finite values as numbers and infinity as the string "inf".
impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Valuation::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

/// Deterministic primality for `u64` (trial division by 6k +- 1).
pub fn is_prime(p: u64) -> bool {
    if p < 4 {
        return p >= 2;
    }
    if p % 2 == 0 || p % 3 == 0 {
        return false;
    }
    let mut i = 5u64;
    while i.saturating_mul(i) <= p {
        if p % i == 0 || p % (i + 2) == 0 {
            return false;
        }
        i += 6;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Valuation of a machine integer; `p` is assumed prime.
pub(crate) fn nu_small(p: u64, r: i128) -> Valuation {
    if r == 0 {
        return Valuation::Infinite;
    }
    let p = p as u128;
    let mut r = r.unsigned_abs();
    let mut v = 0;
    while r % p == 0 {
        r /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Exact `nu_p(r)` for an arbitrary-precision integer.
pub fn nu(p: u64, r: &BigInt) -> Result<Valuation> {
    require_prime(p)?;
    Ok(nu_big_unchecked(p, r))
}

pub(crate) fn nu_big_unchecked(p: u64, r: &BigInt) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    if let Ok(small) = i128::try_from(r) {
        return nu_small(p, small);
    }
    let pb = BigInt::from(p);
    let mut r = r.abs();
    let mut v = 0;
    loop {
        let (q, rem) = r.div_rem(&pb);
        if !rem.is_zero() {
            break;
        }
        r = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// `nu_p(r)` for a machine integer.
pub fn nu_i64(p: u64, r: i64) -> Result<Valuation> {
    require_prime(p)?;
    Ok(nu_small(p, r as i128))
}

/// Sum of the base-`p` digits of `m`.
pub fn digit_sum(p: u64, mut m: u64) -> u64 {
    let mut s = 0;
    while m > 0 {
        s += m % p;
        m /= p;
    }
    s
}

/// `ord_p(m!) = (m - s_p(m)) / (p - 1)`.
pub fn ord_factorial(p: u64, m: u64) -> u64 {
    (m - digit_sum(p, m)) / (p - 1)
}

/// `ord_p(binom(n, k))`, zero when `k > n`.
pub fn ord_binomial(p: u64, n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    ord_factorial(p, n) - ord_factorial(p, k) - ord_factorial(p, n - k)
}

/// Valuation of a single factor `alpha + (u + i) d`; never zero since `gcd(alpha, d) = 1`.
pub(crate) fn ord_term(p: u64, params: &GhlParams, i: i64) -> u64 {
    nu_small(p, params.term(i) as i128).finite().unwrap_or(0)
}

/// `nu_p(prod_{i=l+1}^{n} (alpha + (u+i) d))`, the product attached to coefficient `l` of `G`.
pub fn ord_tail_product(p: u64, params: &GhlParams, l: usize) -> Result<Valuation> {
    require_prime(p)?;
    if l > params.n {
        return Err(Error::IndexOutOfRange { index: l, max: params.n });
    }
    let v = ((l + 1)..=params.n).map(|i| ord_term(p, params, i as i64)).sum();
    Ok(Valuation::Finite(v))
}

/// `nu_p(Delta_j)` for `j = 0..=n`, where `Delta_j = prod_{i=1}^{j} (alpha + (u+i) d)`.
pub fn ord_delta_prefix(p: u64, params: &GhlParams) -> Result<Vec<u64>> {
    require_prime(p)?;
    let mut out = Vec::with_capacity(params.n + 1);
    let mut acc = 0;
    out.push(0);
    for i in 1..=params.n {
        acc += ord_term(p, params, i as i64);
        out.push(acc);
    }
    Ok(out)
}

/// `phi_j = ord_p(Delta_j) / j` for `j = 1..=n`.
pub fn phi_sequence(p: u64, params: &GhlParams) -> Result<Vec<Ratio<i64>>> {
    let prefix = ord_delta_prefix(p, params)?;
    Ok((1..=params.n)
        .map(|j| Ratio::new(prefix[j] as i64, j as i64))
        .collect())
}
