//! Bit-packed odd-only sieve of Eratosthenes, built segment by segment.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest supported sieve limit.
pub const MAX_LIMIT: u64 = 1 << 40;

/// Environment variable capping the sieve bitmap, in MiB.
pub const MEM_ENV: &str = "SIEVEKIT_MEM_MB";
pub const DEFAULT_MEM_MB: u64 = 2048;

// 32 KiB words per segment: 2^21 odd numbers, about an L2 cache worth of bits.
const SEGMENT_WORDS: usize = 1 << 12;

/// Memory budget from `SIEVEKIT_MEM_MB`, or the default.
pub fn memory_budget_bytes() -> u64 {
    std::env::var(MEM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_MEM_MB)
        .saturating_mul(1 << 20)
}

/// Primality bitmap for `0..=limit`. Bit `i` stands for the odd number `2i + 1`.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeSieve {
    /// Sieve up to `limit` under the budget from the environment.
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, memory_budget_bytes())
    }

    pub fn with_budget(limit: u64, budget_bytes: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > MAX_LIMIT {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the maximum 2^40"
            )));
        }
        let odd_count = limit / 2 + 1;
        let words = odd_count.div_ceil(64);
        let bytes = words * 8;
        if bytes > budget_bytes {
            return Err(Error::Resource(format!(
                "sieve up to {limit} needs {} MiB, budget is {} MiB (set {MEM_ENV})",
                bytes.div_ceil(1 << 20),
                budget_bytes >> 20
            )));
        }

        let base = small_odd_primes(isqrt(limit));
        let mut bits = vec![!0u64; words as usize];
        bits.par_chunks_mut(SEGMENT_WORDS)
            .enumerate()
            .for_each(|(seg, chunk)| sieve_segment(chunk, (seg * SEGMENT_WORDS * 64) as u64, &base));

        // 1 is not prime; clear bits past the limit.
        bits[0] &= !1;
        let last_odd = if limit % 2 == 1 { limit } else { limit - 1 };
        let last_index = last_odd / 2;
        let tail = (last_index % 64) + 1;
        if tail < 64 {
            let w = (last_index / 64) as usize;
            bits[w] &= (1u64 << tail) - 1;
        }
        for w in bits.iter_mut().skip((last_index / 64 + 1) as usize) {
            *w = 0;
        }

        Ok(Self { limit, bits })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n == 2 {
            return true;
        }
        if n.is_multiple_of(2) || n > self.limit {
            return false;
        }
        let i = n / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// π(limit).
    pub fn count(&self) -> u64 {
        1 + self.bits.iter().map(|w| w.count_ones() as u64).sum::<u64>()
    }

    /// Number of primes `<= n` (for `n <= limit`).
    pub fn count_upto(&self, n: u64) -> u64 {
        self.primes_in(2, n.min(self.limit)).count() as u64
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> Primes<'_> {
        self.primes_in(2, self.limit)
    }

    /// Primes in `[lo, hi]` (clipped to the limit), ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Primes<'_> {
        let hi = hi.min(self.limit);
        let emit_two = lo <= 2 && hi >= 2;
        let start = lo.max(3) / 2;
        let end = if hi >= 3 { hi.saturating_sub(1) / 2 + 1 } else { 0 };
        let (word, current) = if start < end {
            let w = start / 64;
            (w, self.bits[w as usize] & (!0u64 << (start % 64)))
        } else {
            (u64::MAX, 0)
        };
        Primes {
            sieve: self,
            emit_two,
            word,
            current,
            end,
        }
    }
}

pub struct Primes<'a> {
    sieve: &'a PrimeSieve,
    emit_two: bool,
    word: u64,
    current: u64,
    end: u64,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            if self.current != 0 {
                let idx = self.word * 64 + self.current.trailing_zeros() as u64;
                if idx >= self.end {
                    self.current = 0;
                    self.word = u64::MAX;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(2 * idx + 1);
            }
            if self.word == u64::MAX || (self.word + 1) * 64 >= self.end {
                self.word = u64::MAX;
                return None;
            }
            self.word += 1;
            self.current = self.sieve.bits[self.word as usize];
        }
    }
}

fn sieve_segment(chunk: &mut [u64], first_index: u64, base: &[u64]) {
    // chunk covers odd numbers 2i+1 for i in [first_index, first_index + 64*len)
    let len = chunk.len() as u64 * 64;
    let end_index = first_index + len;
    for &p in base {
        let sq = p * p;
        let sq_index = sq / 2;
        if sq_index >= end_index {
            break;
        }
        // first odd multiple of p at or after the segment start, not below p^2
        let lo_value = 2 * first_index + 1;
        let mut m = if sq >= lo_value {
            sq
        } else {
            let k = lo_value.div_ceil(p);
            let k = if k % 2 == 0 { k + 1 } else { k };
            k * p
        };
        while m / 2 < end_index {
            let i = m / 2 - first_index;
            chunk[(i / 64) as usize] &= !(1u64 << (i % 64));
            m += 2 * p;
        }
    }
}

/// Odd primes up to `n` by a plain sieve.
fn small_odd_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Integer cube root.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r > 0 && r.checked_pow(3).is_none_or(|c| c > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(3).is_some_and(|c| c <= n) {
        r += 1;
    }
    r
}
