//! Ω(n), the number of prime factors counted with multiplicity.

use crate::arith::sieve::{isqrt, PrimeSieve};
use crate::error::{Error, Result};

/// Default segment length for streamed factor tables.
pub const SEGMENT_LEN: u64 = 1 << 16;

/// Ω(n) by trial division with the sieved primes up to √n.
pub fn omega(n: u64, sieve: &PrimeSieve) -> Result<u32> {
    if n < 1 {
        return Err(Error::domain("Ω(n) needs n >= 1"));
    }
    let root = isqrt(n);
    if root > sieve.limit() {
        return Err(Error::domain(format!(
            "Ω({n}) needs primes up to {root}, sieve only reaches {}",
            sieve.limit()
        )));
    }
    let mut rest = n;
    let mut count = 0;
    for p in sieve.primes_in(2, root) {
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            rest /= p;
            count += 1;
        }
    }
    if rest > 1 {
        count += 1;
    }
    Ok(count)
}

/// Ω over the interval `[lo, hi]`.
///
/// Built by walking every prime power `p^k <= hi` with `p <= √hi` through the
/// interval: each hit adds one to Ω and multiplies `p` into the factored part.
/// What remains unfactored is a single prime above √hi, or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTable {
    lo: u64,
    hi: u64,
    omega: Vec<u8>,
}

impl FactorTable {
    pub fn build(lo: u64, hi: u64, sieve: &PrimeSieve) -> Result<Self> {
        if lo < 1 || hi < lo {
            return Err(Error::domain(format!("invalid factor-table range [{lo}, {hi}]")));
        }
        let root = isqrt(hi);
        if root > sieve.limit() {
            return Err(Error::domain(format!(
                "factor table up to {hi} needs primes up to {root}, sieve only reaches {}",
                sieve.limit()
            )));
        }
        let len = (hi - lo + 1) as usize;
        let mut omega = vec![0u8; len];
        let mut factored = vec![1u64; len];

        for p in sieve.primes_in(2, root) {
            let mut pk = p;
            loop {
                let first = lo.div_ceil(pk) * pk;
                let mut m = first;
                while m <= hi {
                    let i = (m - lo) as usize;
                    omega[i] += 1;
                    factored[i] *= p;
                    m += pk;
                }
                match pk.checked_mul(p) {
                    Some(next) if next <= hi => pk = next,
                    _ => break,
                }
            }
        }
        for (i, (om, f)) in omega.iter_mut().zip(&factored).enumerate() {
            if *f != lo + i as u64 {
                *om += 1;
            }
        }
        Ok(Self { lo, hi, omega })
    }

    /// Tables covering `[lo, hi]` in consecutive pieces of at most `seg_len` entries.
    pub fn segments<'a>(
        lo: u64,
        hi: u64,
        seg_len: u64,
        sieve: &'a PrimeSieve,
    ) -> impl Iterator<Item = Result<FactorTable>> + 'a {
        let seg_len = seg_len.max(1);
        let count = if hi >= lo { (hi - lo) / seg_len + 1 } else { 0 };
        (0..count).map(move |k| {
            let a = lo + k * seg_len;
            let b = (a + seg_len - 1).min(hi);
            FactorTable::build(a, b, sieve)
        })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Ω(n) for `n` in `[lo, hi]`.
    pub fn omega(&self, n: u64) -> Option<u32> {
        if n < self.lo || n > self.hi {
            return None;
        }
        Some(self.omega[(n - self.lo) as usize] as u32)
    }

    /// Ω values for `lo..=hi` in order.
    pub fn values(&self) -> &[u8] {
        &self.omega
    }

    /// Is `n` a `P_r`, i.e. Ω(n) <= r?
    pub fn is_almost_prime(&self, n: u64, r: u32) -> Option<bool> {
        self.omega(n).map(|o| o <= r)
    }
}
