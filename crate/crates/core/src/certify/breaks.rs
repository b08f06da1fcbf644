use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghl::GhlParams;
use crate::valuation::ord_factorial;

/// Claimed 2-adic breaks `0 = n_0 < n_1 < ... < n_s = n` for `d = 3` when
/// `alpha + 3(u + n) = 2^a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakSequence {
    pub eta: u32,
    pub s: u32,
    pub a: u32,
    pub breaks: Vec<usize>,
}

impl BreakSequence {
    /// The sequence for `alpha = 1 + eta` and offset `u`, which fixes
    /// `n = -u + 2^eta (1 + 4 + ... + 4^(s-1))`.
    pub fn from_family(eta: u32, s: u32, u: i64) -> Result<Self> {
        if eta > 1 || s == 0 || s > 30 {
            return Err(Error::InvalidParams(format!("eta = {eta}, s = {s}")));
        }
        let geometric = (4u64.pow(s) - 1) / 3;
        let n = (1u64 << eta) as i64 * geometric as i64 - u;
        if n < 1 {
            return Err(Error::InvalidParams(format!("n = {n} is not positive")));
        }
        let mut breaks = vec![0usize];
        let mut acc = 0u64;
        for i in 1..s {
            acc += 1u64 << (eta + 2 * (s - i));
            breaks.push(acc as usize);
        }
        breaks.push(n as usize);
        Ok(BreakSequence {
            eta,
            s,
            a: 2 * s + eta,
            breaks,
        })
    }

    pub fn n(&self) -> usize {
        *self.breaks.last().unwrap_or(&0)
    }

    /// `delta * n_i`.
    pub fn scaled(&self, delta: u64) -> Vec<usize> {
        self.breaks.iter().map(|b| b * delta as usize).collect()
    }
}

pub(crate) fn two_power_exponent(x: i64) -> Option<u32> {
    (x > 1 && x & (x - 1) == 0).then(|| x.trailing_zeros())
}

pub fn expected_breaks(params: &GhlParams) -> Result<BreakSequence> {
    params.validate()?;
    if params.d != 3 {
        return Err(Error::WrongFamily(format!("d = {} but the 2-adic breaks need d = 3", params.d)));
    }
    let top = params.top_term();
    let a = two_power_exponent(top)
        .ok_or_else(|| Error::WrongFamily(format!("alpha + 3(u + n) = {top} is not a power of 2")))?;
    let eta = (params.alpha - 1) as u32;
    let bs = BreakSequence::from_family(eta, (a - eta) / 2, params.u)
        .map_err(|e| Error::WrongFamily(e.to_string()))?;
    if bs.a != a || bs.n() != params.n {
        return Err(Error::Internal(format!(
            "break sequence for a = {a} has n = {}, expected {}",
            bs.n(),
            params.n
        )));
    }
    Ok(bs)
}

/// One row of the break check: `legendre` is `nu_2((x-1)!)`, `closed_form` the printed value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakRow {
    pub i: u32,
    pub x: usize,
    pub legendre: i64,
    pub closed_form: i64,
}

impl BreakRow {
    pub fn matches(&self) -> bool {
        self.legendre == self.closed_form
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakValuationReport {
    /// `nu((n_i - 1)!) = n_i - a + i` for `1 <= i <= s-1`.
    pub interior: Vec<BreakRow>,
    /// `nu((n - 1)!) = n - s + u + 1 - 2^eta`.
    pub last: BreakRow,
}

impl BreakValuationReport {
    pub fn interior_ok(&self) -> bool {
        self.interior.iter().all(BreakRow::matches)
    }

    pub fn all_match(&self) -> bool {
        self.interior_ok() && self.last.matches()
    }
}

pub fn break_valuation_report(bs: &BreakSequence, u: i64) -> BreakValuationReport {
    let (s, a) = (bs.s as i64, bs.a as i64);
    let interior = (1..bs.s)
        .map(|i| {
            let x = bs.breaks[i as usize];
            BreakRow {
                i,
                x,
                legendre: ord_factorial(2, x as u64 - 1) as i64,
                closed_form: x as i64 - a + i as i64,
            }
        })
        .collect();
    let n = bs.n();
    let last = BreakRow {
        i: bs.s,
        x: n,
        legendre: ord_factorial(2, n as u64 - 1) as i64,
        closed_form: n as i64 - s + u + 1 - (1i64 << bs.eta),
    };
    BreakValuationReport { interior, last }
}

pub fn verify_break_valuations(bs: &BreakSequence, u: i64) -> bool {
    break_valuation_report(bs, u).all_match()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(u: i64, alpha: u64, n: usize) -> GhlParams {
        GhlParams::new(3, u, alpha, n, 1).unwrap()
    }

    #[test]
    fn break_examples() {
        let bs = expected_breaks(&params(-1, 2, 43)).unwrap();
        assert_eq!((bs.a, bs.eta, bs.s), (7, 1, 3));
        assert_eq!(bs.breaks, vec![0, 32, 40, 43]);
        assert_eq!(expected_breaks(&params(0, 2, 42)).unwrap().breaks, vec![0, 32, 40, 42]);
        let bs = expected_breaks(&params(-1, 1, 6)).unwrap();
        assert_eq!((bs.a, bs.eta, bs.s), (4, 0, 2));
        assert_eq!(bs.breaks, vec![0, 4, 6]);
        assert!(matches!(expected_breaks(&params(0, 2, 16)), Err(Error::WrongFamily(_))));
        let four = GhlParams::new(4, 0, 1, 2, 1).unwrap();
        assert!(matches!(expected_breaks(&four), Err(Error::WrongFamily(_))));
    }

    #[test]
    fn break_valuation_examples() {
        let bs = expected_breaks(&params(-1, 1, 6)).unwrap();
        let report = break_valuation_report(&bs, -1);
        assert_eq!(report.interior[0].legendre, 1);
        assert_eq!(report.last.legendre, 3);
        assert!(report.all_match());

        let bs = expected_breaks(&params(-1, 2, 43)).unwrap();
        let report = break_valuation_report(&bs, -1);
        assert_eq!(report.interior[1].x, 40);
        assert_eq!(report.interior[1].legendre, 35);
        assert!(report.interior_ok());
        // nu(42!) = 42 - s_2(42) = 39, one more than the closed form gives here.
        assert_eq!(report.last.legendre, 39);
        assert_eq!(report.last.closed_form, 38);
        assert!(!verify_break_valuations(&bs, -1));
    }

    #[test]
    fn last_break_identity_by_family() {
        for s in 1..=16 {
            for (eta, u) in [(0, -1), (0, 0), (1, 0)] {
                let bs = BreakSequence::from_family(eta, s, u).unwrap();
                assert!(verify_break_valuations(&bs, u), "eta={eta} u={u} s={s}");
            }
            let bs = BreakSequence::from_family(1, s, -1).unwrap();
            let report = break_valuation_report(&bs, -1);
            assert!(report.interior_ok());
            assert_eq!(report.last.legendre, report.last.closed_form + 1);
        }
    }

    #[test]
    fn family_roundtrip() {
        for s in 1..=12 {
            for eta in 0..=1 {
                for u in [-1i64, 0] {
                    let bs = BreakSequence::from_family(eta, s, u).unwrap();
                    let Ok(p) = GhlParams::new(3, u, 1 + eta as u64, bs.n(), 1) else {
                        continue;
                    };
                    assert_eq!(p.top_term(), 1 << bs.a);
                    assert_eq!(expected_breaks(&p).unwrap(), bs);
                }
            }
        }
    }
}
