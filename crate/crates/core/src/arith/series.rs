//! The singular series `C(N)` and the sieve density product `W(z)`.

use crate::arith::sieve::PrimeSieve;
use crate::error::{Error, Result};
use crate::sieve_functions::EULER_GAMMA;

pub const DEFAULT_TRUNCATION: u64 = 100_000_000;
pub const MIN_TRUNCATION: u64 = 10_000;

/// Upper bound for π(x) / (x / log x), valid for all x > 1 (Rosser–Schoenfeld).
const PI_RATIO_BOUND: f64 = 1.255_06;

/// `∏_{2 < p <= T} (1 - 1/(p-1)²)`, the N-independent factor of `C(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwinConstant {
    pub value: f64,
    pub truncation_prime: u64,
    /// Certified bound on `value - ∏_{p > 2} (1 - 1/(p-1)²)`, which is nonnegative.
    pub tail_bound: f64,
}

impl TwinConstant {
    /// Sieve up to `truncation` and form the product.
    pub fn compute(truncation: u64) -> Result<Self> {
        check_truncation(truncation)?;
        let sieve = PrimeSieve::new(truncation)?;
        Self::from_sieve(&sieve, truncation)
    }

    /// Product over the primes of an existing sieve up to `truncation <= sieve.limit()`.
    pub fn from_sieve(sieve: &PrimeSieve, truncation: u64) -> Result<Self> {
        check_truncation(truncation)?;
        if truncation > sieve.limit() {
            return Err(Error::domain(format!(
                "truncation {truncation} exceeds the sieve limit {}",
                sieve.limit()
            )));
        }
        // Kahan-compensated sum of log factors
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut prime_count = 1u64;
        for p in sieve.primes_in(3, truncation) {
            prime_count += 1;
            let q = (p - 1) as f64;
            let term = (-1.0 / (q * q)).ln_1p() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        Ok(Self {
            value: sum.exp(),
            truncation_prime: truncation,
            tail_bound: tail_bound(truncation, prime_count),
        })
    }
}

fn check_truncation(t: u64) -> Result<()> {
    if t < MIN_TRUNCATION {
        return Err(Error::domain(format!(
            "truncation prime must be at least {MIN_TRUNCATION}, got {t}"
        )));
    }
    Ok(())
}

/// Bound on `∑_{p > T} 1/(p-1)²`, which dominates the relative tail of the product.
///
/// Two certified estimates, the smaller is returned:
/// * every `p - 1` is even and at least `T`, so the sum is below `∑_{j >= ⌈T/2⌉} 1/(4j²)`;
/// * partial summation with the exact `π(T)` and `π(x) < 1.25506 x / log x`
///   gives `-π(T)/(T-1)² + 2.51012/log T · (1/(T-1) + 1/(2(T-1)²))`.
pub fn tail_bound(truncation: u64, prime_count: u64) -> f64 {
    let t = truncation as f64;
    let j0 = truncation.div_ceil(2) as f64;
    let even = (1.0 / j0 + 1.0 / (j0 * j0)) / 4.0;
    let tm1 = t - 1.0;
    let partial = -(prime_count as f64) / (tm1 * tm1)
        + 2.0 * PI_RATIO_BOUND / t.ln() * (1.0 / tm1 + 1.0 / (2.0 * tm1 * tm1));
    even.min(partial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeriesResult {
    pub n: u64,
    pub value: f64,
    pub twin_constant: f64,
    pub truncation_prime: u64,
    pub tail_bound: f64,
    /// Odd primes dividing N.
    pub odd_prime_divisors: Vec<u64>,
}

/// `C(N) = ∏_{p | N, p > 2} (p-1)/(p-2) · ∏_{p > 2} (1 - 1/(p-1)²)`, the second
/// product truncated at `truncation_prime`.
pub fn singular_series(n: u64, truncation_prime: u64) -> Result<SingularSeriesResult> {
    check_even(n)?;
    let twin = TwinConstant::compute(truncation_prime)?;
    singular_series_with(n, &twin)
}

/// As [`singular_series`], reusing a precomputed twin constant.
pub fn singular_series_with(n: u64, twin: &TwinConstant) -> Result<SingularSeriesResult> {
    check_even(n)?;
    let divisors = odd_prime_divisors(n);
    let factor: f64 = divisors
        .iter()
        .map(|&p| (p - 1) as f64 / (p - 2) as f64)
        .product();
    Ok(SingularSeriesResult {
        n,
        value: twin.value * factor,
        twin_constant: twin.value,
        truncation_prime: twin.truncation_prime,
        tail_bound: twin.tail_bound,
        odd_prime_divisors: divisors,
    })
}

fn check_even(n: u64) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!("N must be even and at least 4, got {n}")));
    }
    Ok(())
}

fn odd_prime_divisors(mut n: u64) -> Vec<u64> {
    while n.is_multiple_of(2) {
        n /= 2;
    }
    let mut out = Vec::new();
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `W(z) = ∏_{p < z, p ∤ N} (1 - ω(p)/p)` with `ω(p) = p/(p-1)`, i.e. factors
/// `1 - 1/(p-1)`. For even N the prime 2 divides N and contributes nothing.
pub fn sieve_product_w(n: u64, z: f64, sieve: &PrimeSieve) -> Result<f64> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::domain(format!(
            "W(z) needs even N (the factor at p = 2 would vanish), got {n}"
        )));
    }
    if !(z > 2.0) || z > sieve.limit() as f64 {
        return Err(Error::domain(format!(
            "z must lie in (2, {}], got {z}",
            sieve.limit()
        )));
    }
    let below = z.ceil() as u64 - 1;
    Ok(sieve
        .primes_in(3, below)
        .filter(|&p| (p as f64) < z && !n.is_multiple_of(p))
        .map(|p| (p - 2) as f64 / (p - 1) as f64)
        .product())
}

/// `W(z) log N / (2 α e^{-γ} C(N))` at `z = N^{1/α}`; tends to 1 as N grows.
pub fn w_asymptotic_ratio(n: u64, alpha: f64, c_n: f64, sieve: &PrimeSieve) -> Result<f64> {
    let log_n = (n as f64).ln();
    let z = (log_n / alpha).exp();
    let w = sieve_product_w(n, z, sieve)?;
    Ok(w * log_n / (2.0 * alpha * (-EULER_GAMMA).exp() * c_n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_small_cases() {
        let s = PrimeSieve::new(100).unwrap();
        let w = sieve_product_w(10, 10.0, &s).unwrap();
        assert!((w - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(sieve_product_w(6, 3.0, &s).unwrap(), 1.0);
        assert!(sieve_product_w(9, 10.0, &s).is_err());
        assert!(sieve_product_w(10, 2.0, &s).is_err());
        assert!(sieve_product_w(10, 101.0, &s).is_err());
    }

    #[test]
    fn w_is_nonincreasing_in_z() {
        let s = PrimeSieve::new(10_000).unwrap();
        let n = 1_000_002;
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let z = 2.5 + k as f64 * 7.3;
            let w = sieve_product_w(n, z, &s).unwrap();
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn series_factors() {
        let twin = TwinConstant::compute(100_000).unwrap();
        let c10 = singular_series_with(10, &twin).unwrap();
        assert_eq!(c10.odd_prime_divisors, vec![5]);
        assert!((c10.value - 4.0 / 3.0 * twin.value).abs() < 1e-15);
        assert!((c10.value - 0.8802).abs() < 1e-4);
        let pow2 = singular_series_with(1 << 20, &twin).unwrap();
        assert_eq!(pow2.value, twin.value);
        let c30 = singular_series_with(30, &twin).unwrap();
        assert!(c30.value > c10.value);
        assert!(singular_series_with(15, &twin).is_err());
        assert!(singular_series(10, 9_999).is_err());
    }

    #[test]
    fn divisors() {
        assert_eq!(odd_prime_divisors(2 * 3 * 3 * 5 * 101), vec![3, 5, 101]);
        assert_eq!(odd_prime_divisors(1_000_000_002), vec![3, 43, 983, 3943]);
        assert!(odd_prime_divisors(1 << 40).is_empty());
    }

    #[test]
    fn tail_bound_is_certified_and_tight() {
        let twin = TwinConstant::compute(20_000).unwrap();
        let longer = TwinConstant::compute(400_000).unwrap();
        let diff = twin.value - longer.value;
        assert!(diff > 0.0 && diff < twin.tail_bound);
        assert!(twin.tail_bound < 1.0 / (20_000.0 - 1.0));
    }
}
