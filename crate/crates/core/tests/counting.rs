//! Exact counting against trial-division oracles.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sievekit::arith::PrimeSieve;
use sievekit::counting::{scan_grid, CountMode, CountQuery, Counter, SiftReport};
use sievekit::delta::{DeltaParams, SieveLevel};

fn trial_omega(mut m: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= m {
        while m.is_multiple_of(d) {
            m /= d;
            count += 1;
        }
        d += 1;
    }
    count + u32::from(m > 1)
}

fn trial_prime(n: u64) -> bool {
    n >= 2 && trial_omega(n) == 1
}

/// The counted set of `p`, straight from the definitions.
fn naive_set(q: &CountQuery) -> BTreeSet<u64> {
    let n = q.n;
    let nf = n as f64;
    let inside = |x: u64| match q.mode {
        CountMode::Full => x <= n,
        CountMode::SmallPrimes(t) => (x as f64) <= nf.powf(t),
        CountMode::ShortInterval(k) => {
            let h = nf.powf(k);
            (x as f64) >= nf / 2.0 - h && (x as f64) <= nf / 2.0 + h
        }
    };
    (2..n)
        .filter(|&p| trial_prime(p) && inside(p))
        .filter(|&p| {
            let m = n - p;
            (m > 1 || q.include_unit)
                && trial_omega(m) <= q.r
                && (!matches!(q.mode, CountMode::ShortInterval(_)) || inside(m))
        })
        .collect()
}

#[test]
fn all_modes_match_the_naive_definition() {
    let sieve = PrimeSieve::new(3000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    let modes = [
        CountMode::Full,
        CountMode::SmallPrimes(0.5),
        CountMode::SmallPrimes(0.838),
        CountMode::ShortInterval(0.6),
        CountMode::ShortInterval(0.919),
    ];
    for n in (6..=3000).step_by(2) {
        for mode in modes {
            for r in 1..=4 {
                for include_unit in [false, true] {
                    let q = CountQuery {
                        include_unit,
                        ..CountQuery::new(n, r, mode)
                    };
                    let want = naive_set(&q).len() as u64;
                    assert_eq!(c.count(&q).unwrap().count, want, "{q:?}");
                }
            }
        }
    }
}

#[test]
fn interval_mode_is_symmetric() {
    let sieve = PrimeSieve::new(10_000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    for n in (1000..=10_000).step_by(178) {
        for kappa in [0.7, 0.8, 0.919] {
            let q = CountQuery::new(n, 3, CountMode::ShortInterval(kappa));
            let set = naive_set(&q);
            for &p in &set {
                if trial_prime(n - p) {
                    assert!(set.contains(&(n - p)), "N = {n}, p = {p}");
                }
            }
            assert_eq!(c.count(&q).unwrap().count, set.len() as u64);
        }
    }
}

#[test]
fn counts_are_monotone_in_r_and_theta() {
    let sieve = PrimeSieve::new(200_000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    for n in [1_000u64, 30_030, 65_536, 199_998] {
        let mut prev = 0;
        for r in 1..=4 {
            let k = c.count(&CountQuery::new(n, r, CountMode::Full)).unwrap().count;
            assert!(k >= prev);
            prev = k;
        }
        let mut prev = 0;
        for i in 1..=20 {
            let theta = i as f64 / 20.0;
            let k = c.count(&CountQuery::new(n, 3, CountMode::SmallPrimes(theta))).unwrap().count;
            assert!(k >= prev, "N = {n}, θ = {theta}");
            prev = k;
        }
    }
}

#[test]
fn scan_examples() {
    let sieve = PrimeSieve::new(100).unwrap();
    let t = CountQuery::new(0, 3, CountMode::Full);
    let out = scan_grid(&[10, 12, 14], &t, &sieve).unwrap();
    let counts: Vec<u64> = out.into_iter().map(|r| r.unwrap().count).collect();
    assert_eq!(counts, vec![4, 4, 5]);
    assert!(scan_grid(&[], &t, &sieve).unwrap().is_empty());
}

/// Direct evaluation of the sifted sums for the small-primes mode.
fn naive_sift(n: u64, theta: f64, lambda: f64) -> (SiftReport, u64) {
    let nf = n as f64;
    let z = nf.powf(1.0 / lambda);
    let sifting: Vec<u64> = (2..=z as u64)
        .filter(|&p| trial_prime(p) && (p as f64) < z && !n.is_multiple_of(p))
        .collect();
    let weighting: Vec<u64> = (2..)
        .take_while(|&q: &u64| q * q * q < n)
        .filter(|&q| trial_prime(q) && q as f64 >= z && !n.is_multiple_of(q))
        .collect();
    let mut r = SiftReport {
        n,
        z,
        s1: 0,
        s2: 0,
        weighted: 0.0,
        d13: 0,
        exceptions: 0,
        holds: true,
    };
    let mut repeated = 0;
    for p in (2..n - 1).filter(|&p| trial_prime(p) && (p as f64) <= nf.powf(theta)) {
        let m = n - p;
        let om = trial_omega(m);
        r.d13 += u64::from(om <= 3);
        if sifting.iter().any(|&d| m.is_multiple_of(d)) {
            continue;
        }
        r.s1 += 1;
        let w = weighting.iter().filter(|&&q| m.is_multiple_of(q)).count() as u64;
        r.s2 += w;
        if w <= 1 && om >= 4 {
            r.exceptions += 1;
            // an exception needs a repeated factor in [z, N^(1/3)) unless p | N
            if !n.is_multiple_of(p) {
                assert!(
                    weighting.iter().any(|&q| m.is_multiple_of(q * q)),
                    "N = {n}, p = {p}, m = {m}"
                );
            }
        }
        if weighting.iter().any(|&q| m.is_multiple_of(q * q)) {
            repeated += 1;
        }
    }
    r.weighted = r.s1 as f64 - r.s2 as f64 / 2.0;
    r.holds = r.d13 as f64 >= r.weighted - r.exceptions as f64;
    (r, repeated)
}

#[test]
fn sift_matches_direct_evaluation() {
    let sieve = PrimeSieve::new(100_000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    for (n, theta, lambda) in [
        (20_000u64, 1.0, 9.0),
        (30_030, 1.0, 9.0),
        (65_536, 0.9, 9.5),
        (99_990, 1.0, 10.0),
        (98_304, 0.8, 9.0),
    ] {
        let level = SieveLevel::from_lambda(lambda, true).unwrap();
        let got = c
            .sift(n, DeltaParams::small_primes(theta).with_level(level))
            .unwrap();
        let (want, repeated) = naive_sift(n, theta, lambda);
        assert!((got.z - want.z).abs() < 1e-12);
        assert_eq!(SiftReport { z: want.z, ..got }, want, "N = {n}");
        assert!(got.holds);
        assert!(got.exceptions <= repeated + got.s1);
    }
}

#[test]
fn sift_short_interval_mode_holds() {
    let sieve = PrimeSieve::new(2_000_000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    for n in [1_000_002u64, 1_500_000, 1_999_998] {
        let r = c.sift(n, DeltaParams::short_interval(0.919)).unwrap();
        let d13 = c
            .count(&CountQuery::new(n, 3, CountMode::ShortInterval(0.919)))
            .unwrap()
            .count;
        assert_eq!(r.d13, d13);
        assert!(r.holds, "{r:?}");
    }
}

fn sample(rng: &mut StdRng, lo: f64, hi: f64) -> u64 {
    let x = (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp() as u64;
    x & !1
}

#[test]
fn weighted_inequality_on_sampled_n() {
    let sieve = PrimeSieve::new(1_000_000).unwrap();
    let c = Counter::new(&sieve).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    // λ = 11.99 needs N >= 3^11.99 for z >= 3
    let literal = DeltaParams::small_primes(1.0);
    let exploratory = literal.with_level(SieveLevel::from_lambda(9.0, true).unwrap());
    for (params, lo) in [(literal, 526_000.0), (exploratory, 20_000.0)] {
        for _ in 0..100 {
            let n = sample(&mut rng, lo, 1e6);
            let r = c.sift(n, params).unwrap();
            assert!(r.holds, "{r:?}");
            if r.exceptions == 0 {
                assert!(r.d13 as f64 >= r.weighted);
            }
            assert!(r.exceptions as f64 / r.s1.max(1) as f64 <= 0.05, "{r:?}");
        }
    }
}
