use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT: usize = 1 << 20;

/// Smallest prime factor of every integer in `0..=limit` (entries 0 and 1 are 0).
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Self {
        Self::with_segment(limit, DEFAULT_SEGMENT)
    }

    /// Segments are sieved independently in parallel; output does not depend on
    /// the segment size or thread count.
    pub fn with_segment(limit: u64, segment: usize) -> Self {
        assert!(limit < u32::MAX as u64, "limit {limit} exceeds the u32 table range");
        let segment = segment.max(64);
        let base = primes_up_to(limit.isqrt());
        let mut spf = vec![0u32; limit as usize + 1];
        spf.par_chunks_mut(segment)
            .enumerate()
            .for_each(|(idx, chunk)| {
                let start = (idx * segment) as u64;
                let end = start + chunk.len() as u64;
                for &p in &base {
                    let mut m = (p * p).max(start.div_ceil(p) * p);
                    while m < end {
                        let slot = &mut chunk[(m - start) as usize];
                        if *slot == 0 {
                            *slot = p as u32;
                        }
                        m += p;
                    }
                }
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let m = start + off as u64;
                    if *slot == 0 && m >= 2 {
                        *slot = m as u32;
                    }
                }
            });
        SpfTable { limit, spf }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn require(&self, needed: u64) -> Result<()> {
        if needed > self.limit {
            Err(Error::TableTooSmall {
                limit: self.limit,
                needed,
            })
        } else {
            Ok(())
        }
    }

    pub fn spf(&self, m: u64) -> Result<u64> {
        self.require(m)?;
        Ok(self.spf[m as usize] as u64)
    }

    pub fn is_prime(&self, m: u64) -> bool {
        m >= 2 && m <= self.limit && self.spf[m as usize] as u64 == m
    }

    /// Greatest prime factor with `P(1) = 1`.
    pub fn gpf(&self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::InvalidParams("P(0) is undefined".into()));
        }
        self.require(m)?;
        Ok(self.gpf_unchecked(m))
    }

    pub(crate) fn gpf_unchecked(&self, mut m: u64) -> u64 {
        let mut best = 1;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            best = p;
            m /= p;
        }
        best
    }

    /// Prime factorization as `(p, e)` pairs in increasing `p`.
    pub fn factorize(&self, mut m: u64) -> Result<Vec<(u64, u32)>> {
        self.require(m)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            m /= p;
        }
        Ok(out)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(|&m| self.spf[m as usize] as u64 == m)
    }
}

/// Plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}
