//! Generalized Hermite–Laguerre polynomials with exact integer coefficients.
//!
//! For `q = u + alpha/d` in lowest terms and seed integers `a_0..a_n`,
//!
//! ```text
//! G(x) = sum_j a_j x^j prod_{i=j+1}^{n} (alpha + (u + i) d)
//! ```
//!
//! The alternating binomial seed gives `d^n n! L_n^{(q)}(x/d)`. Irreducibility is
//! usually studied for the power substitution `G(x^delta)` with `delta in {1, d}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(d, u, alpha, n, delta)` of `G_q(x^delta)` with `q = u + alpha/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhlParams {
    pub d: u64,
    pub u: i64,
    pub alpha: u64,
    pub n: usize,
    pub delta: u64,
}

impl GhlParams {
    pub fn new(d: u64, u: i64, alpha: u64, n: usize, delta: u64) -> Result<Self> {
        let params = Self { d, u, alpha, n, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParams(format!("d = {} must be at least 2", self.d)));
        }
        if self.alpha < 1 || self.alpha >= self.d {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must satisfy 1 <= alpha < d = {}",
                self.alpha, self.d
            )));
        }
        if self.alpha.gcd(&self.d) != 1 {
            return Err(Error::InvalidParams(format!(
                "gcd(alpha, d) = gcd({}, {}) != 1",
                self.alpha, self.d
            )));
        }
        if self.n < 1 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if self.delta != 1 && self.delta != self.d {
            return Err(Error::InvalidParams(format!(
                "delta = {} must be 1 or d = {}",
                self.delta, self.d
            )));
        }
        Ok(())
    }

    /// Same parameters with a different substitution exponent.
    pub fn with_delta(&self, delta: u64) -> Result<Self> {
        Self::new(self.d, self.u, self.alpha, self.n, delta)
    }

    /// The factor `alpha + (u + i) d`.
    pub fn term(&self, i: i64) -> i64 {
        self.alpha as i64 + (self.u + i) * self.d as i64
    }

    /// `alpha + d(u + n)`, the factor whose primes drive most of the special cases.
    pub fn top_term(&self) -> i64 {
        self.term(self.n as i64)
    }

    pub fn q(&self) -> Ratio<i64> {
        Ratio::new(self.u * self.d as i64 + self.alpha as i64, self.d as i64)
    }

    /// Degree of `G(x^delta)`.
    pub fn total_degree(&self) -> usize {
        self.n * self.delta as usize
    }
}

/// Which preset produced a seed; carried into certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    Ones,
    Laguerre,
    /// `(-1)^j binom(n, j) d^j`; with it `G(x^d) = d^n n! L_n^{(q)}(x^d)` exactly.
    LaguerreScaled,
    Custom,
}

impl SeedKind {
    pub fn is_laguerre(self) -> bool {
        matches!(self, SeedKind::Laguerre | SeedKind::LaguerreScaled)
    }
}

/// Seed coefficients `a_0..a_n` with `a_0 a_n != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedCoefficients {
    values: Vec<BigInt>,
    kind: SeedKind,
}

impl SeedCoefficients {
    pub fn new(values: Vec<BigInt>) -> Result<Self> {
        Self::with_kind(values, SeedKind::Custom)
    }

    fn with_kind(values: Vec<BigInt>, kind: SeedKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSeed("need at least two coefficients".into()));
        }
        if values[0].is_zero() || values[values.len() - 1].is_zero() {
            return Err(Error::InvalidSeed("a_0 and a_n must be nonzero".into()));
        }
        Ok(Self { values, kind })
    }

    pub fn ones(n: usize) -> Result<Self> {
        check_seed_degree(n)?;
        Self::with_kind(vec![BigInt::one(); n + 1], SeedKind::Ones)
    }

    pub fn laguerre(n: usize) -> Result<Self> {
        check_seed_degree(n)?;
        Self::with_kind(alternating_binomials(n), SeedKind::Laguerre)
    }

    pub fn laguerre_scaled(n: usize, d: u64) -> Result<Self> {
        check_seed_degree(n)?;
        let mut power = BigInt::one();
        let values = alternating_binomials(n)
            .into_iter()
            .map(|a| {
                let v = a * &power;
                power *= d;
                v
            })
            .collect();
        Self::with_kind(values, SeedKind::LaguerreScaled)
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn kind(&self) -> SeedKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// `a_0 a_n`.
    pub fn end_product(&self) -> BigInt {
        &self.values[0] * &self.values[self.values.len() - 1]
    }

    /// True when `p` divides `a_0 a_n`.
    pub fn end_product_divisible_by(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        (&self.values[0] % &p).is_zero() || (&self.values[self.n()] % &p).is_zero()
    }
}

fn check_seed_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    Ok(())
}

fn alternating_binomials(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    for j in 0..=n {
        row.push(if j % 2 == 0 { c.clone() } else { -c.clone() });
        c = c * (n - j) / (j + 1);
    }
    row
}

/// The alternating binomial seed `a_j = (-1)^j binom(n, j)`.
pub fn laguerre_seed(n: usize) -> Result<SeedCoefficients> {
    SeedCoefficients::laguerre(n)
}

/// Dense polynomial over the integers, lowest power first, never the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    /// Trims trailing zeros; rejects the zero polynomial.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("zero polynomial".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[self.coeffs.len() - 1]
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Multiplies by `x^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Parses the line format: one decimal coefficient per line, lowest power
    /// first, `#` starts a comment, blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let c: BigInt = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("not an integer: {line:?}"),
            })?;
            coeffs.push(c);
        }
        Self::new(coeffs)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.coeffs {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && i > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Builds `G(x)` (no power substitution; `params.delta` is ignored here).
pub fn build_ghl(params: &GhlParams, seed: &SeedCoefficients) -> Result<IntegerPolynomial> {
    params.validate()?;
    if seed.values.len() != params.n + 1 {
        return Err(Error::SeedLength {
            n: params.n,
            got: seed.values.len(),
        });
    }
    let n = params.n;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    let mut tail = BigInt::one();
    for j in (0..=n).rev() {
        coeffs[j] = &seed.values[j] * &tail;
        tail *= params.term(j as i64);
    }
    IntegerPolynomial::new(coeffs)
}

/// Builds `G(x^delta)` for the `delta` stored in `params`.
pub fn build_substituted(
    params: &GhlParams,
    seed: &SeedCoefficients,
) -> Result<IntegerPolynomial> {
    substitute_power(&build_ghl(params, seed)?, params.delta)
}

/// `f(x) -> f(x^delta)`.
pub fn substitute_power(poly: &IntegerPolynomial, delta: u64) -> Result<IntegerPolynomial> {
    if delta == 0 {
        return Err(Error::InvalidParams("delta must be positive".into()));
    }
    let delta = delta as usize;
    let mut coeffs = vec![BigInt::zero(); poly.degree() * delta + 1];
    for (i, c) in poly.coeffs.iter().enumerate() {
        coeffs[i * delta] = c.clone();
    }
    IntegerPolynomial::new(coeffs)
}

/// Physicists' Hermite polynomial `H_m`, assembled from `G` with `d = 2`:
/// `H_{2n} = (-1)^n 2^n G_{-1/2}(2x^2)` and `H_{2n+1} = (-1)^n 2^{n+1} x G_{1/2}(2x^2)`
/// under the Laguerre seed. The factors `2^j` and the sign are folded into the seed.
pub fn hermite_polynomial(m: usize) -> Result<IntegerPolynomial> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be positive".into()));
    }
    if m == 1 {
        return IntegerPolynomial::from_i64(&[0, 2]);
    }
    let n = m / 2;
    let odd = m % 2 == 1;
    let (u, extra) = if odd { (0, 1) } else { (-1, 0) };
    let params = GhlParams::new(2, u, 1, n, 2)?;
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let mut power = BigInt::one() << (n + extra);
    let values = alternating_binomials(n)
        .into_iter()
        .map(|a| {
            let v = &sign * a * &power;
            power <<= 1;
            v
        })
        .collect();
    let seed = SeedCoefficients::new(values)?;
    let g = build_substituted(&params, &seed)?;
    Ok(if odd { g.shift(1) } else { g })
}
