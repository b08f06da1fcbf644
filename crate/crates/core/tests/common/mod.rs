//! Brute-force factor search for small integer polynomials, independent of the
//! Newton-polygon code. Candidate factors come from subsets of numerically computed
//! roots and are confirmed by exact division.

#![allow(dead_code)]

use ghl_core::IntegerPolynomial;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let m = coeffs.len() - 1;
    let lead = coeffs[m];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..m].iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut z: Vec<Complex64> = (0..m)
        .map(|i| Complex64::from_polar(radius * 0.9, 0.4 + i as f64 * std::f64::consts::TAU / m as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..m {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn divides(f: &IntegerPolynomial, g: &IntegerPolynomial) -> bool {
    let mut rem: Vec<BigRational> = f.coeffs().iter().map(|c| BigRational::from(c.clone())).collect();
    let gl = BigRational::from(g.leading().clone());
    let dg = g.degree();
    for top in (dg..rem.len()).rev() {
        let q = &rem[top] / &gl;
        if q.is_zero() {
            continue;
        }
        for (i, c) in g.coeffs().iter().enumerate() {
            rem[top - dg + i] -= &q * BigRational::from(c.clone());
        }
    }
    rem[..dg].iter().all(|c| c.is_zero())
}

fn small_divisors(x: &BigInt) -> Vec<BigInt> {
    let x = x.abs();
    match x.to_u64() {
        Some(v) if v <= 1_000_000 => (1..=v).filter(|d| v % d == 0).map(BigInt::from).collect(),
        _ => vec![BigInt::from(1), x],
    }
}

/// A nontrivial factor of `f` of degree at most `deg f / 2`, or `None`.
pub fn find_factor(f: &IntegerPolynomial) -> Option<IntegerPolynomial> {
    let m = f.degree();
    assert!(m <= 16, "oracle is meant for tiny degrees");
    let coeffs: Vec<f64> = f.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let z = roots(&coeffs);
    let content = f.coeffs().iter().fold(BigInt::zero(), |a, c| a.gcd(c));
    let lead_part = f.leading() / &content;
    let scales = small_divisors(&lead_part);
    for mask in 1u32..(1 << m) {
        let k = mask.count_ones() as usize;
        if k > m / 2 {
            continue;
        }
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for (i, r) in z.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let mut next = vec![Complex64::zero(); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * r;
                }
                prod = next;
            }
        }
        if prod.iter().any(|c| c.im.abs() > 1e-6 * (1.0 + c.re.abs())) {
            continue;
        }
        for s in &scales {
            let sf = s.to_f64().unwrap();
            let scaled: Vec<f64> = prod.iter().map(|c| c.re * sf).collect();
            if scaled.iter().any(|c| (c - c.round()).abs() > 1e-5 * (1.0 + c.abs())) {
                continue;
            }
            let g: Vec<BigInt> = scaled.iter().map(|c| BigInt::from(c.round() as i128)).collect();
            if let Ok(g) = IntegerPolynomial::new(g) {
                if g.degree() == k && divides(f, &g) {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// Exact linear-factor test over rational roots `a/b` with `a | f(0)` and `b | lead`.
/// Panics when the end coefficients are too large to enumerate divisors.
pub fn rational_root(f: &IntegerPolynomial) -> Option<BigRational> {
    let small = |c: &BigInt| c.abs().to_u64().filter(|&v| v <= 10_000_000);
    let c0 = small(f.constant()).expect("constant term too large");
    let lead = small(f.leading()).expect("leading coefficient too large");
    for a in (1..=c0).filter(|a| c0 % a == 0) {
        for b in (1..=lead).filter(|b| lead % b == 0) {
            for sign in [1i64, -1] {
                let x = BigRational::new(BigInt::from(sign * a as i64), BigInt::from(b));
                let value = f
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, c| acc * &x + BigRational::from(c.clone()));
                if value.is_zero() {
                    return Some(x);
                }
            }
        }
    }
    None
}
