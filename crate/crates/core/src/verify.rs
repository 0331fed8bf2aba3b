//! The fixed verification pipeline behind `sievekit verify`.

use crate::arith::{PrimeSieve, TwinConstant};
use crate::counting::{CountMode, CountQuery, Counter};
use crate::delta::{delta_pair, margin, DeltaMode, DeltaParams, SieveLevel};
use crate::error::Result;
use crate::quadrature::QuadratureConfig;
use crate::report::{Record, Value};
use crate::sieve_functions::{Branch, SieveFn, SieveFunctions, EULER_GAMMA};

/// Lower bound claimed for both margins at the threshold parameters.
pub const CLAIMED_MARGIN: f64 = 0.0009;
pub const CLAIMED_THETA: f64 = 0.838;
pub const CLAIMED_KAPPA: f64 = 0.919;
pub const MARGIN_ERROR_LIMIT: f64 = 1e-7;
pub const CONTINUITY_TOL: f64 = 1e-8;
pub const DDE_TOL: f64 = 1e-5;
pub const DDE_STEP: f64 = 1e-4;
pub const DDE_POINTS: [f64; 5] = [2.5, 3.5, 4.5, 5.5, 6.5];
pub const ANCHOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub claimed: String,
    pub computed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerifyReport {
    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self
            .checks
            .iter()
            .map(|c| {
                Record::new()
                    .field("name", c.name.as_str())
                    .field("claimed", c.claimed.as_str())
                    .bound("computed", c.computed)
                    .field("pass", c.pass)
            })
            .collect();
        out.push(
            Record::new()
                .field("name", "overall")
                .field("claimed", "")
                .field("computed", Value::Missing)
                .field("pass", self.overall),
        );
        out
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quick: bool,
    pub quadrature: QuadratureConfig,
    /// Value of Euler's constant handed to the sieve functions (fault injection).
    pub gamma: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            quadrature: QuadratureConfig::default(),
            gamma: EULER_GAMMA,
        }
    }
}

impl VerifyOptions {
    fn twin_truncations(&self) -> (u64, u64) {
        if self.quick {
            (1_000_000, 10_000_000)
        } else {
            (10_000_000, 100_000_000)
        }
    }

    fn oracle_range(&self) -> (u64, u64) {
        if self.quick {
            (6, 500)
        } else {
            (6, 5000)
        }
    }
}

/// `{first} ∪ {0.01 k}` up to 1, the grid on which margins must stay positive.
pub fn margin_grid(first: f64) -> Vec<f64> {
    let start = (first * 100.0).floor() as u32 + 1;
    std::iter::once(first)
        .chain((start..=100).map(|k| k as f64 / 100.0))
        .collect()
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let cfg = &opts.quadrature;
    let mut checks = Vec::new();
    let mut push = |name: String, claimed: String, computed: f64, pass: bool| {
        checks.push(Check {
            name,
            claimed,
            computed,
            pass,
        })
    };

    for (mode, x) in [
        (DeltaMode::SmallPrimes, CLAIMED_THETA),
        (DeltaMode::ShortInterval, CLAIMED_KAPPA),
    ] {
        let r = delta_pair(DeltaParams::new(mode, x), cfg)?;
        push(
            format!("margin_{}_{x}", mode.name()),
            format!(">= {CLAIMED_MARGIN}"),
            r.margin,
            r.margin >= CLAIMED_MARGIN,
        );
        push(
            format!("margin_error_{}_{x}", mode.name()),
            format!("< {MARGIN_ERROR_LIMIT:e}"),
            r.error_bound,
            r.error_bound < MARGIN_ERROR_LIMIT,
        );
        let min = margin_grid(x)
            .into_iter()
            .map(|p| margin(DeltaParams::new(mode, p).with_level(SieveLevel::Literal), cfg))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        push(
            format!("min_margin_{}_grid", mode.name()),
            "> 0".into(),
            min,
            min > 0.0,
        );
    }

    let sf = SieveFunctions::new(*cfg).with_gamma(opts.gamma);
    for (func, s, left, right) in [
        (SieveFn::Upper, 3.0, Branch::First, Branch::Second),
        (SieveFn::Upper, 5.0, Branch::Second, Branch::Third),
        (SieveFn::Lower, 4.0, Branch::First, Branch::Second),
        (SieveFn::Lower, 6.0, Branch::Second, Branch::Third),
    ] {
        let jump = (sf.eval_branch(func, left, s)?.value - sf.eval_branch(func, right, s)?.value).abs();
        push(
            format!("continuity_{}_{s}", func.symbol()),
            format!("<= {CONTINUITY_TOL:e}"),
            jump,
            jump <= CONTINUITY_TOL,
        );
    }

    // closed-form values against the reference constant
    let e_gamma = EULER_GAMMA.exp();
    for (func, s, expected) in [
        (SieveFn::Upper, 2.0, e_gamma),
        (SieveFn::Upper, 3.0, 2.0 * e_gamma / 3.0),
        (SieveFn::Lower, 2.0, 0.0),
        (SieveFn::Lower, 4.0, e_gamma * 3f64.ln() / 2.0),
    ] {
        let diff = (sf.eval(func, s)?.value - expected).abs();
        push(
            format!("anchor_{}_{s}", func.symbol()),
            format!("<= {ANCHOR_TOL:e}"),
            diff,
            diff <= ANCHOR_TOL,
        );
    }

    for s in DDE_POINTS {
        let r = sf.dde_residual(s, DDE_STEP)?;
        push(format!("dde_residual_{s}"), format!("< {DDE_TOL:e}"), r, r < DDE_TOL);
    }

    let (t1, t2) = opts.twin_truncations();
    let sieve = PrimeSieve::new(t2)?;
    let short = TwinConstant::from_sieve(&sieve, t1)?;
    let long = TwinConstant::from_sieve(&sieve, t2)?;
    let change = short.value - long.value;
    push(
        format!("twin_constant_change_{t1}_{t2}"),
        format!("< tail bound {:.3e}", short.tail_bound),
        change,
        change >= 0.0 && change < short.tail_bound,
    );
    if !opts.quick {
        push(
            format!("twin_constant_tail_bound_{t1}"),
            "< 1e-7".into(),
            short.tail_bound,
            short.tail_bound < 1e-7,
        );
    }

    let (lo, hi) = opts.oracle_range();
    let mismatches = oracle_mismatches(lo, hi, &sieve)?;
    push(
        format!("oracle_counts_{lo}_{hi}"),
        "0 mismatches".into(),
        mismatches as f64,
        mismatches == 0,
    );

    let overall = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { checks, overall })
}

/// Number of (N, r) with N even in `[lo, hi]` and r ∈ {1, 2, 3} where the
/// segmented count differs from trial division of every `N - p`.
fn oracle_mismatches(lo: u64, hi: u64, sieve: &PrimeSieve) -> Result<u64> {
    let counter = Counter::new(sieve)?;
    let mut bad = 0;
    for n in (lo..=hi).filter(|n| n % 2 == 0) {
        let mut naive = [0u64; 4];
        for p in sieve.primes_in(2, n - 2) {
            let om = trial_omega(n - p);
            for (r, slot) in naive.iter_mut().enumerate().skip(1) {
                if om <= r as u32 {
                    *slot += 1;
                }
            }
        }
        let hist = counter.histogram(&CountQuery::new(n, 1, CountMode::Full))?;
        bad += (1..=3).filter(|&r| hist.at_most(r) != naive[r as usize]).count() as u64;
    }
    Ok(bad)
}

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
