//! Exact counts of `N - p = P_r` and the weighted sieve of small-prime type,
//! evaluated by enumeration.
//!
//! Everything is driven by a streamed [`FactorTable`] over the values
//! `m = N - p`; a value counts when `N - m` is prime and lies in the mode's
//! range of `p`.

use std::fmt;

use rayon::prelude::*;

use crate::arith::factor::SEGMENT_LEN;
use crate::arith::{icbrt, singular_series_with, FactorTable, PrimeSieve, TwinConstant};
use crate::delta::{main_term_from_margin, margin, DeltaMode, DeltaParams};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

/// Largest N accepted by default.
pub const DEFAULT_DESK_LIMIT: u64 = 1_000_000_000;

/// Truncation of the twin-type constant used for predicted main terms.
pub const PREDICTION_TRUNCATION: u64 = 1_000_000;

/// Highest almost-prime order supported.
pub const MAX_ORDER: u32 = 4;

/// Which primes `p` take part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountMode {
    /// All `p <= N`.
    Full,
    /// `p <= N^θ`.
    SmallPrimes(f64),
    /// `N/2 - N^κ <= p, N - p <= N/2 + N^κ`.
    ShortInterval(f64),
}

impl CountMode {
    pub fn name(&self) -> &'static str {
        match self {
            CountMode::Full => "full",
            CountMode::SmallPrimes(_) => "small_primes",
            CountMode::ShortInterval(_) => "short_interval",
        }
    }

    /// θ or κ; `None` in full mode.
    pub fn param(&self) -> Option<f64> {
        match *self {
            CountMode::Full => None,
            CountMode::SmallPrimes(x) | CountMode::ShortInterval(x) => Some(x),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(x) = self.param() {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::domain(format!(
                    "{} parameter must lie in (0, 1], got {x}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// Inclusive range of admissible `p` (before primality), and the
    /// interval `N - p` must also lie in, if any.
    fn prime_range(&self, n: u64) -> (u64, u64, Option<(u64, u64)>) {
        match *self {
            CountMode::Full => (2, n - 1, None),
            CountMode::SmallPrimes(theta) => {
                let cap = (n as f64).powf(theta).floor() as u64;
                (2, cap.min(n - 1), None)
            }
            CountMode::ShortInterval(kappa) => {
                let half = n / 2;
                let h = ((n as f64).powf(kappa).floor() as u64).min(half);
                let (lo, hi) = (half - h, half + h);
                (lo.max(2), hi.min(n - 1), Some((lo, hi)))
            }
        }
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<DeltaParams> for CountMode {
    fn from(p: DeltaParams) -> Self {
        match p.mode {
            DeltaMode::SmallPrimes => CountMode::SmallPrimes(p.param),
            DeltaMode::ShortInterval => CountMode::ShortInterval(p.param),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountQuery {
    pub n: u64,
    pub r: u32,
    pub mode: CountMode,
    /// Count `N - p = 1` as a `P_r` (Ω(1) = 0).
    pub include_unit: bool,
}

impl CountQuery {
    pub fn new(n: u64, r: u32, mode: CountMode) -> Self {
        Self {
            n,
            r,
            mode,
            include_unit: false,
        }
    }

    pub fn with_n(self, n: u64) -> Self {
        Self { n, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 6 || !self.n.is_multiple_of(2) {
            return Err(Error::domain(format!("N must be even and at least 6, got {}", self.n)));
        }
        if !(1..=MAX_ORDER).contains(&self.r) {
            return Err(Error::domain(format!("r must lie in 1..={MAX_ORDER}, got {}", self.r)));
        }
        self.mode.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountReport {
    pub query: CountQuery,
    pub count: u64,
    /// Main term of the lower bound; 0 outside the small-primes and
    /// short-interval modes at r = 3.
    pub predicted_main_term: f64,
    /// `count / predicted_main_term` when the prediction is positive.
    pub ratio: Option<f64>,
}

/// Counts of admissible `p` by Ω(N - p): indices 0..=4 exact, index 5 for Ω >= 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OmegaHistogram(pub [u64; 6]);

impl OmegaHistogram {
    /// Number of admissible `p` with Ω(N - p) <= r.
    pub fn at_most(&self, r: u32) -> u64 {
        self.0.iter().take(r.min(MAX_ORDER) as usize + 1).sum()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiftReport {
    pub n: u64,
    pub z: f64,
    /// Admissible `p` with `N - p` free of sifting primes `< z`.
    pub s1: u64,
    /// Sum over primes `q ∈ [z, N^{1/3})`, `q ∤ N`, of survivors divisible by `q`.
    pub s2: u64,
    /// `s1 - s2/2`.
    pub weighted: f64,
    /// Admissible `p` with `N - p` a `P₃`.
    pub d13: u64,
    /// Survivors that keep positive weight although `N - p` is not a `P₃`.
    pub exceptions: u64,
    /// `d13 >= weighted - exceptions`.
    pub holds: bool,
}

/// Counting context: a shared prime sieve plus the constants needed for
/// predicted main terms.
#[derive(Debug, Clone)]
pub struct Counter<'a> {
    sieve: &'a PrimeSieve,
    twin: TwinConstant,
    quad: QuadratureConfig,
    desk_limit: u64,
}

impl<'a> Counter<'a> {
    pub fn new(sieve: &'a PrimeSieve) -> Result<Self> {
        Ok(Self {
            sieve,
            twin: TwinConstant::compute(PREDICTION_TRUNCATION)?,
            quad: QuadratureConfig::default(),
            desk_limit: DEFAULT_DESK_LIMIT,
        })
    }

    pub fn with_desk_limit(mut self, limit: u64) -> Self {
        self.desk_limit = limit;
        self
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quad = cfg;
        self
    }

    pub fn sieve(&self) -> &PrimeSieve {
        self.sieve
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n > self.desk_limit {
            return Err(Error::Resource(format!(
                "N = {n} exceeds the desk limit {}",
                self.desk_limit
            )));
        }
        if n > self.sieve.limit() {
            return Err(Error::domain(format!(
                "N = {n} needs primes up to N, sieve only reaches {}",
                self.sieve.limit()
            )));
        }
        Ok(())
    }

    /// Histogram of Ω(N - p) over the admissible primes of `q`'s mode.
    pub fn histogram(&self, q: &CountQuery) -> Result<OmegaHistogram> {
        q.validate()?;
        self.check_n(q.n)?;
        let n = q.n;
        let (p_lo, p_hi, interval) = q.mode.prime_range(n);
        let mut hist = OmegaHistogram::default();
        if p_lo > p_hi {
            return Ok(hist);
        }
        let m_lo = n - p_hi;
        let m_hi = n - p_lo;
        if m_lo == 0 && m_hi == 0 {
            return Ok(hist);
        }
        for table in FactorTable::segments(m_lo.max(1), m_hi, SEGMENT_LEN, self.sieve) {
            let table = table?;
            for (i, &om) in table.values().iter().enumerate() {
                let m = table.lo() + i as u64;
                let p = n - m;
                if !self.sieve.is_prime(p) || (m == 1 && !q.include_unit) {
                    continue;
                }
                if interval.is_some_and(|(a, b)| m < a || m > b) {
                    continue;
                }
                hist.0[(om as usize).min(5)] += 1;
            }
        }
        Ok(hist)
    }

    pub fn count(&self, q: &CountQuery) -> Result<CountReport> {
        let hist = self.histogram(q)?;
        let count = hist.at_most(q.r);
        let predicted = self.predicted_main_term(q)?;
        Ok(CountReport {
            query: *q,
            count,
            predicted_main_term: predicted,
            ratio: (predicted > 0.0).then(|| count as f64 / predicted),
        })
    }

    fn predicted_main_term(&self, q: &CountQuery) -> Result<f64> {
        let params = match q.mode {
            CountMode::SmallPrimes(x) => DeltaParams::small_primes(x),
            CountMode::ShortInterval(x) => DeltaParams::short_interval(x),
            CountMode::Full => return Ok(0.0),
        };
        if q.r != 3 || params.validate().is_err() {
            return Ok(0.0);
        }
        let c_n = singular_series_with(q.n, &self.twin)?.value;
        let m = margin(params, &self.quad)?;
        Ok(main_term_from_margin(q.n, params, m, c_n))
    }

    /// Evaluate the weighted sieve `S₁ - S₂/2` exactly and compare with `D₁,₃`.
    pub fn sift(&self, n: u64, params: DeltaParams) -> Result<SiftReport> {
        let mode = CountMode::from(params);
        CountQuery::new(n, 3, mode).validate()?;
        params.level.validate()?;
        self.check_n(n)?;

        let log_n = (n as f64).ln();
        let z = (log_n / params.lambda()).exp();
        if !(z >= 3.0) {
            return Err(Error::domain(format!(
                "sieving limit z = N^(1/{}) = {z:.4} is below 3 for N = {n}",
                params.lambda()
            )));
        }
        let cube = icbrt(n);
        // q < N^{1/3} <=> q <= icbrt(N) unless N is a perfect cube
        let q_max = if cube * cube * cube == n { cube - 1 } else { cube };
        let z_floor = z.floor() as u64;
        let sifting: Vec<u64> = self
            .sieve
            .primes_in(2, z_floor)
            .filter(|&p| (p as f64) < z && !n.is_multiple_of(p))
            .collect();
        let weighting: Vec<u64> = self
            .sieve
            .primes_in(z_floor, q_max)
            .filter(|&q| (q as f64) >= z && !n.is_multiple_of(q))
            .collect();

        let (p_lo, p_hi, interval) = mode.prime_range(n);
        let mut report = SiftReport {
            n,
            z,
            s1: 0,
            s2: 0,
            weighted: 0.0,
            d13: 0,
            exceptions: 0,
            holds: true,
        };
        if p_lo <= p_hi {
            let m_lo = (n - p_hi).max(2);
            let m_hi = n - p_lo;
            let mut sifted = Vec::new();
            let mut w = Vec::new();
            for table in FactorTable::segments(m_lo, m_hi, SEGMENT_LEN, self.sieve) {
                let table = table?;
                let (lo, len) = (table.lo(), table.values().len());
                sifted.clear();
                sifted.resize(len, false);
                w.clear();
                w.resize(len, 0u8);
                for &p in &sifting {
                    let mut m = lo.div_ceil(p) * p;
                    while m <= table.hi() {
                        sifted[(m - lo) as usize] = true;
                        m += p;
                    }
                }
                for &q in &weighting {
                    let mut m = lo.div_ceil(q) * q;
                    while m <= table.hi() {
                        w[(m - lo) as usize] += 1;
                        m += q;
                    }
                }
                for (i, &om) in table.values().iter().enumerate() {
                    let m = lo + i as u64;
                    let p = n - m;
                    if !self.sieve.is_prime(p) || interval.is_some_and(|(a, b)| m < a || m > b) {
                        continue;
                    }
                    if om <= 3 {
                        report.d13 += 1;
                    }
                    if sifted[i] {
                        continue;
                    }
                    report.s1 += 1;
                    report.s2 += w[i] as u64;
                    if w[i] <= 1 && om >= 4 {
                        report.exceptions += 1;
                    }
                }
            }
        }
        report.weighted = report.s1 as f64 - report.s2 as f64 / 2.0;
        report.holds = report.d13 as f64 >= report.weighted - report.exceptions as f64;
        Ok(report)
    }

    /// One report per N, in input order; failures stay local to their entry.
    pub fn scan(&self, ns: &[u64], template: &CountQuery) -> Vec<Result<CountReport>> {
        ns.par_iter()
            .map(|&n| self.count(&template.with_n(n)))
            .collect()
    }
}

/// Count with a fresh [`Counter`] over `sieve`.
pub fn count_representations(q: &CountQuery, sieve: &PrimeSieve) -> Result<CountReport> {
    Counter::new(sieve)?.count(q)
}

pub fn sift_weighted(n: u64, params: DeltaParams, sieve: &PrimeSieve) -> Result<SiftReport> {
    Counter::new(sieve)?.sift(n, params)
}

pub fn scan_grid(ns: &[u64], template: &CountQuery, sieve: &PrimeSieve) -> Result<Vec<Result<CountReport>>> {
    Ok(Counter::new(sieve)?.scan(ns, template))
}
