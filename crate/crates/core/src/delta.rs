//! The weighted-sieve constants `Δ₁…Δ₄`, their margins, the admissibility
//! thresholds and the main-term lower bounds built from them.
//!
//! Small-primes mode (primes `p <= N^θ`) produces `Δ₁, Δ₂`; short-interval
//! mode (`|p - N/2| <= N^κ`) produces `Δ₃, Δ₄`. The margin `Δ_a - Δ_b/2` must
//! be positive for the lower bound on the number of `N - p = P₃` to be
//! nontrivial.
//!
//! All formulas use the sieve level `λ = 11.99` (sieving limit `z = N^{1/λ}`)
//! with the literal constants `5.995, 6.995, 7.995, 13.99, 23.98`. Other
//! levels are available only as [`SieveLevel::Exploratory`], which derives
//! the constants from `λ` by the substitution below; these formulas are an
//! extrapolation, not an established result.
//!
//! | literal | exploratory |
//! |---------|-------------|
//! | 5.995   | λ/2         |
//! | 11.99   | λ           |
//! | 6.995   | λ/2 + 1     |
//! | 7.995   | λ/2 + 2     |
//! | 23.98   | 2λ          |
//! | 13.99   | λ + 2       |

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};

/// The sieve level used throughout, `z = N^{1/11.99}`.
pub const DEFAULT_LAMBDA: f64 = 11.99;

/// Guard band for exploratory sieve levels.
pub const LAMBDA_RANGE: (f64, f64) = (9.0, 16.0);

/// Initial bisection brackets for [`find_threshold`].
pub const THETA_BRACKET: (f64, f64) = (0.70, 1.0);
pub const KAPPA_BRACKET: (f64, f64) = (0.86, 1.0);

pub const THRESHOLD_BRACKET_WIDTH: f64 = 1e-7;
pub const THRESHOLD_MAX_ITERATIONS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaMode {
    /// `p <= N^θ`, constants `Δ₁, Δ₂`.
    SmallPrimes,
    /// `N/2 - N^κ <= p <= N/2 + N^κ`, constants `Δ₃, Δ₄`.
    ShortInterval,
}

impl DeltaMode {
    pub fn name(self) -> &'static str {
        match self {
            DeltaMode::SmallPrimes => "small_primes",
            DeltaMode::ShortInterval => "short_interval",
        }
    }

    pub fn bracket(self) -> (f64, f64) {
        match self {
            DeltaMode::SmallPrimes => THETA_BRACKET,
            DeltaMode::ShortInterval => KAPPA_BRACKET,
        }
    }
}

impl fmt::Display for DeltaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sieve level `λ`. Anything other than 11.99 must be requested explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SieveLevel {
    #[default]
    Literal,
    Exploratory(f64),
}

impl SieveLevel {
    /// `Literal` for 11.99 (bitwise), `Exploratory` otherwise.
    pub fn from_lambda(lambda: f64, exploratory: bool) -> Result<Self> {
        if lambda == DEFAULT_LAMBDA {
            return Ok(SieveLevel::Literal);
        }
        if !exploratory {
            return Err(Error::domain(format!(
                "sieve level λ = {lambda} differs from {DEFAULT_LAMBDA}; non-default levels require exploratory mode"
            )));
        }
        let level = SieveLevel::Exploratory(lambda);
        level.validate()?;
        Ok(level)
    }

    pub fn lambda(self) -> f64 {
        match self {
            SieveLevel::Literal => DEFAULT_LAMBDA,
            SieveLevel::Exploratory(l) => l,
        }
    }

    pub fn validate(self) -> Result<()> {
        let l = self.lambda();
        if !(l >= LAMBDA_RANGE.0 && l <= LAMBDA_RANGE.1) {
            return Err(Error::domain(format!(
                "sieve level λ must lie in [{}, {}], got {l}",
                LAMBDA_RANGE.0, LAMBDA_RANGE.1
            )));
        }
        Ok(())
    }

    pub fn is_exploratory(self) -> bool {
        matches!(self, SieveLevel::Exploratory(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParams {
    pub mode: DeltaMode,
    /// θ or κ depending on `mode`.
    pub param: f64,
    pub level: SieveLevel,
}

/// Coefficients of the two constants as affine functions of the mode parameter.
///
/// With `x = θ` (resp. `κ`): the log argument of `Δ_a` is `a·x - b`, the
/// integrals run over `[2, a·x - b - 1]`, and the first term of `Δ_b` is
/// `log((c·x - d)/(e·x - g))`.
struct Coefficients {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    g: f64,
}

impl DeltaParams {
    pub fn small_primes(theta: f64) -> Self {
        Self {
            mode: DeltaMode::SmallPrimes,
            param: theta,
            level: SieveLevel::Literal,
        }
    }

    pub fn short_interval(kappa: f64) -> Self {
        Self {
            mode: DeltaMode::ShortInterval,
            param: kappa,
            level: SieveLevel::Literal,
        }
    }

    pub fn new(mode: DeltaMode, param: f64) -> Self {
        Self {
            mode,
            param,
            level: SieveLevel::Literal,
        }
    }

    pub fn with_level(mut self, level: SieveLevel) -> Self {
        self.level = level;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.level.lambda()
    }

    fn coefficients(&self) -> Coefficients {
        match (self.mode, self.level) {
            (DeltaMode::SmallPrimes, SieveLevel::Literal) => Coefficients {
                a: 5.995,
                b: 1.0,
                c: 11.99,
                d: 2.0,
                e: 3.0,
                g: 2.0,
            },
            (DeltaMode::ShortInterval, SieveLevel::Literal) => Coefficients {
                a: 11.99,
                b: 6.995,
                c: 23.98,
                d: 13.99,
                e: 6.0,
                g: 5.0,
            },
            (DeltaMode::SmallPrimes, SieveLevel::Exploratory(l)) => Coefficients {
                a: l / 2.0,
                b: 1.0,
                c: l,
                d: 2.0,
                e: 3.0,
                g: 2.0,
            },
            (DeltaMode::ShortInterval, SieveLevel::Exploratory(l)) => Coefficients {
                a: l,
                b: l / 2.0 + 1.0,
                c: 2.0 * l,
                d: l + 2.0,
                e: 6.0,
                g: 5.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.level.validate()?;
        let x = self.param;
        let name = match self.mode {
            DeltaMode::SmallPrimes => "θ",
            DeltaMode::ShortInterval => "κ",
        };
        if !(x.is_finite() && x <= 1.0) {
            return Err(Error::domain(format!("{name} must be at most 1, got {x}")));
        }
        let k = self.coefficients();
        match self.mode {
            DeltaMode::SmallPrimes if !(x > 2.0 / 3.0) => {
                return Err(Error::domain(format!(
                    "θ must exceed 2/3 (3θ - 2 > 0), got {x}"
                )))
            }
            DeltaMode::ShortInterval if !(x > 5.0 / 6.0) => {
                return Err(Error::domain(format!(
                    "κ must exceed 5/6 (6κ - 5 > 0), got {x}"
                )))
            }
            _ => {}
        }
        if !(k.a * x - k.b > 1.0) {
            return Err(Error::domain(format!(
                "{name} = {x} makes the leading logarithm of Δ nonpositive"
            )));
        }
        if !(k.c * x - k.d > 0.0) {
            return Err(Error::domain(format!("{name} = {x} leaves the Δ_b logarithm undefined")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReport {
    pub params: DeltaParams,
    /// `Δ₁` or `Δ₃`.
    pub delta_a: f64,
    /// `Δ₂` or `Δ₄`.
    pub delta_b: f64,
    /// `delta_a - delta_b / 2`.
    pub margin: f64,
    /// Certified quadrature error of `margin`.
    pub error_bound: f64,
}

/// Compute the two constants and their margin.
pub fn delta_pair(params: DeltaParams, cfg: &QuadratureConfig) -> Result<DeltaReport> {
    params.validate()?;
    let k = params.coefficients();
    let x = params.param;

    // L = a x - b; both integrals run over [2, L - 1] (empty when L <= 3)
    let big_l = k.a * x - k.b;
    let upper = k.a * x - (k.b + 1.0);
    let weight = |s: f64| (s - 1.0).ln() / s;

    let int_a = integrate(|s| weight(s) * (big_l / (s + 1.0)).ln(), 2.0, upper, cfg)?;
    let int_b = integrate(
        |s| weight(s) * (big_l * (big_l - s) / (s + 1.0)).ln(),
        2.0,
        upper,
        cfg,
    )?;

    let delta_a = Estimate::exact(big_l.ln()) + int_a;
    let delta_b = Estimate::exact(((k.c * x - k.d) / (k.e * x - k.g)).ln()) + int_b;
    let margin = delta_a + delta_b.scale(-0.5);

    Ok(DeltaReport {
        params,
        delta_a: delta_a.value,
        delta_b: delta_b.value,
        margin: margin.value,
        error_bound: margin.error,
    })
}

/// Margin only; convenience for scans.
pub fn margin(params: DeltaParams, cfg: &QuadratureConfig) -> Result<f64> {
    delta_pair(params, cfg).map(|r| r.margin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub mode: DeltaMode,
    pub lambda: f64,
    pub threshold: f64,
    pub margin_at_threshold: f64,
    pub iterations: u32,
    pub bracket_width: f64,
}

/// Locate the sign change of the margin by bisection over the mode's bracket.
pub fn find_threshold(
    mode: DeltaMode,
    level: SieveLevel,
    cfg: &QuadratureConfig,
) -> Result<ThresholdResult> {
    find_threshold_in(mode, level, mode.bracket(), cfg)
}

/// As [`find_threshold`] with an explicit initial bracket.
pub fn find_threshold_in(
    mode: DeltaMode,
    level: SieveLevel,
    bracket: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<ThresholdResult> {
    let (mut lo, mut hi) = bracket;
    let eval = |x: f64| margin(DeltaParams::new(mode, x).with_level(level), cfg);

    let m_lo = eval(lo)?;
    let m_hi = eval(hi)?;
    if !(m_lo < 0.0 && m_hi > 0.0) {
        return Err(Error::Bracket {
            lower: lo,
            upper: hi,
            margin_lower: m_lo,
            margin_upper: m_hi,
        });
    }

    let mut iterations = 0;
    while hi - lo > THRESHOLD_BRACKET_WIDTH && iterations < THRESHOLD_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let threshold = 0.5 * (lo + hi);
    Ok(ThresholdResult {
        mode,
        lambda: level.lambda(),
        threshold,
        margin_at_threshold: eval(threshold)?,
        iterations,
        bracket_width: hi - lo,
    })
}

/// Main term of the lower bound for the number of `N - p = P₃`:
/// `8/θ² · margin · C(N) N^θ / log² N` or `16/(2κ-1) · margin · C(N) N^κ / log² N`.
pub fn main_term_bound(
    n: u64,
    params: DeltaParams,
    singular_series: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!("N must be even and at least 4, got {n}")));
    }
    if !(singular_series > 0.0 && singular_series.is_finite()) {
        return Err(Error::domain(format!(
            "C(N) must be positive, got {singular_series}"
        )));
    }
    let report = delta_pair(params, cfg)?;
    Ok(main_term_from_margin(n, params, report.margin, singular_series))
}

pub(crate) fn main_term_from_margin(n: u64, params: DeltaParams, margin: f64, c_n: f64) -> f64 {
    let nf = n as f64;
    let log_n = nf.ln();
    let x = params.param;
    let lead = match params.mode {
        DeltaMode::SmallPrimes => 8.0 / (x * x),
        DeltaMode::ShortInterval => 16.0 / (2.0 * x - 1.0),
    };
    lead * margin * c_n * nf.powf(x) / (log_n * log_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn literal_constants_match_generalized_ones() {
        for mode in [DeltaMode::SmallPrimes, DeltaMode::ShortInterval] {
            for x in [0.92, 0.95, 1.0] {
                let lit = delta_pair(DeltaParams::new(mode, x), &cfg()).unwrap();
                let gen = delta_pair(
                    DeltaParams::new(mode, x).with_level(SieveLevel::Exploratory(DEFAULT_LAMBDA)),
                    &cfg(),
                )
                .unwrap();
                assert!((lit.margin - gen.margin).abs() < 1e-12, "{mode} {x}");
            }
        }
    }

    #[test]
    fn short_interval_is_small_primes_at_two_kappa_minus_one() {
        for kappa in [0.919, 0.95, 1.0] {
            let si = delta_pair(DeltaParams::short_interval(kappa), &cfg()).unwrap();
            let sp = delta_pair(DeltaParams::small_primes(2.0 * kappa - 1.0), &cfg()).unwrap();
            assert!((si.delta_a - sp.delta_a).abs() < 1e-9);
            assert!((si.delta_b - sp.delta_b).abs() < 1e-9);
        }
    }

    #[test]
    fn domain_guards() {
        assert!(delta_pair(DeltaParams::small_primes(0.5), &cfg()).is_err());
        assert!(delta_pair(DeltaParams::small_primes(2.0 / 3.0), &cfg()).is_err());
        assert!(delta_pair(DeltaParams::small_primes(1.01), &cfg()).is_err());
        assert!(delta_pair(DeltaParams::short_interval(0.83), &cfg()).is_err());
        assert!(delta_pair(
            DeltaParams::small_primes(0.9).with_level(SieveLevel::Exploratory(8.0)),
            &cfg()
        )
        .is_err());
        assert!(SieveLevel::from_lambda(12.5, false).is_err());
        assert_eq!(SieveLevel::from_lambda(11.99, false).unwrap(), SieveLevel::Literal);
        assert_eq!(
            SieveLevel::from_lambda(12.5, true).unwrap(),
            SieveLevel::Exploratory(12.5)
        );
    }

    #[test]
    fn margin_field_is_consistent() {
        let r = delta_pair(DeltaParams::small_primes(0.9), &cfg()).unwrap();
        assert_eq!(r.margin, r.delta_a - 0.5 * r.delta_b);
        assert!(r.delta_a > 0.0 && r.delta_b > 0.0);
    }

    #[test]
    fn tiny_integration_range_near_two_thirds() {
        // 5.995 * 0.67 - 2 = 2.01665: the integral over [2, 2.01665] is tiny
        let r = delta_pair(DeltaParams::small_primes(0.67), &cfg()).unwrap();
        let lead = (5.995f64 * 0.67 - 1.0).ln();
        let integral = r.delta_a - lead;
        assert!(integral > 0.0);
        // integrand g vanishes at both ends of [2, up]; bound it by the
        // product of the two factors' maxima, and compare with Simpson's rule
        let big_l = 5.995f64 * 0.67 - 1.0;
        let up = big_l - 1.0;
        let g = |s: f64| (s - 1.0).ln() / s * (big_l / (s + 1.0)).ln();
        let width = up - 2.0;
        assert!(integral < width * ((up - 1.0).ln() / 2.0) * (big_l / 3.0).ln());
        let mid = 0.5 * (2.0 + up);
        let simpson = width / 6.0 * (g(2.0) + 4.0 * g(mid) + g(up));
        assert!((integral - simpson).abs() < 1e-3 * simpson);
    }

    #[test]
    fn bound_is_linear_in_margin() {
        let p = DeltaParams::small_primes(1.0);
        assert_eq!(main_term_from_margin(1_000_000, p, 0.0, 1.0), 0.0);
        let one = main_term_from_margin(1_000_000, p, 1.0, 1.0);
        let two = main_term_from_margin(1_000_000, p, 2.0, 1.0);
        assert!((two - 2.0 * one).abs() < 1e-9 * one);
    }

    #[test]
    fn bound_rejects_odd_n() {
        assert!(main_term_bound(1_000_001, DeltaParams::small_primes(1.0), 1.0, &cfg()).is_err());
        assert!(main_term_bound(1_000_000, DeltaParams::small_primes(1.0), 0.0, &cfg()).is_err());
    }

    #[test]
    fn bracket_without_sign_change() {
        let err = find_threshold_in(DeltaMode::SmallPrimes, SieveLevel::Literal, (0.9, 1.0), &cfg())
            .unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }), "{err:?}");
        let err = find_threshold_in(DeltaMode::ShortInterval, SieveLevel::Literal, (0.86, 0.9), &cfg())
            .unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }), "{err:?}");
    }

    #[test]
    fn exploratory_levels_move_the_threshold() {
        let lit = find_threshold(DeltaMode::SmallPrimes, SieveLevel::Literal, &cfg()).unwrap();
        let lower = find_threshold(DeltaMode::SmallPrimes, SieveLevel::Exploratory(10.0), &cfg())
            .unwrap();
        assert!(lower.threshold > lit.threshold);
        assert_eq!(lower.lambda, 10.0);
    }
}
