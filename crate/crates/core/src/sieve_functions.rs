//! Upper and lower linear-sieve functions `F(s)` and `f(s)`.
//!
//! Both are evaluated from their piecewise closed forms: `F` on `0 < s <= 7`
//! (three branches with breakpoints 3 and 5) and `f` on `0 < s <= 8` (zero up
//! to 2, then three branches with breakpoints 4 and 6). At a breakpoint the
//! lower branch is used.
//!
//! The pair satisfies the delay system `(sF)' = f(s-1)`, `(sf)' = F(s-1)` for
//! `s >= 2`; [`dde_residual`] measures how well the evaluated functions do.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_nested, Estimate, QuadratureConfig};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const UPPER_MAX: f64 = 7.0;
pub const LOWER_MAX: f64 = 8.0;

/// Breakpoints of the closed forms (including the start of the delay system at 2).
pub const BREAKPOINTS: [f64; 7] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];

/// Which of the two sieve functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SieveFn {
    /// `F`, the upper-bound function.
    Upper,
    /// `f`, the lower-bound function.
    Lower,
}

impl SieveFn {
    pub fn symbol(self) -> &'static str {
        match self {
            SieveFn::Upper => "F",
            SieveFn::Lower => "f",
        }
    }

    /// Human-readable domain, used in diagnostics.
    pub fn domain(self) -> &'static str {
        match self {
            SieveFn::Upper => "(0, 7]",
            SieveFn::Lower => "(0, 8]",
        }
    }
}

impl fmt::Display for SieveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Piecewise formula that produced a value.
///
/// `Zero` is only used by `f` on `(0, 2]`. For `F` the branches cover
/// `(0,3]`, `[3,5]`, `[5,7]`; for `f` they cover `[2,4]`, `[4,6]`, `[6,8]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Zero,
    First,
    Second,
    Third,
}

impl Branch {
    pub fn index(self) -> u8 {
        match self {
            Branch::Zero => 0,
            Branch::First => 1,
            Branch::Second => 2,
            Branch::Third => 3,
        }
    }

    /// Closed interval on which `func` may be evaluated with this branch.
    pub fn range(self, func: SieveFn) -> Option<(f64, f64)> {
        match (func, self) {
            (SieveFn::Upper, Branch::Zero) => None,
            (SieveFn::Upper, Branch::First) => Some((0.0, 3.0)),
            (SieveFn::Upper, Branch::Second) => Some((3.0, 5.0)),
            (SieveFn::Upper, Branch::Third) => Some((5.0, 7.0)),
            (SieveFn::Lower, Branch::Zero) => Some((0.0, 2.0)),
            (SieveFn::Lower, Branch::First) => Some((2.0, 4.0)),
            (SieveFn::Lower, Branch::Second) => Some((4.0, 6.0)),
            (SieveFn::Lower, Branch::Third) => Some((6.0, 8.0)),
        }
    }

    /// The branch used for `s`, breakpoints going to the lower branch.
    pub fn select(func: SieveFn, s: f64) -> Result<Branch> {
        let max = match func {
            SieveFn::Upper => UPPER_MAX,
            SieveFn::Lower => LOWER_MAX,
        };
        if !(s > 0.0 && s <= max) {
            return Err(Error::domain(format!(
                "{func}(s) is defined for s in {}, got s = {s}",
                func.domain()
            )));
        }
        Ok(match func {
            SieveFn::Upper if s <= 3.0 => Branch::First,
            SieveFn::Upper if s <= 5.0 => Branch::Second,
            SieveFn::Upper => Branch::Third,
            SieveFn::Lower if s <= 2.0 => Branch::Zero,
            SieveFn::Lower if s <= 4.0 => Branch::First,
            SieveFn::Lower if s <= 6.0 => Branch::Second,
            SieveFn::Lower => Branch::Third,
        })
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A sieve-function value with its certified quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveFunctionValue {
    pub func: SieveFn,
    pub s: f64,
    pub value: f64,
    pub error_bound: f64,
    pub branch: Branch,
}

/// Kernel of the correction double integral in the third branch of `f`.
///
/// The closed form as commonly printed uses `log(s/(u+2))`; integrating
/// `(sf)' = F(s-1)` from 6 gives `log((s-1)/(u+1))` instead, and only the
/// latter keeps `f` increasing and the delay system satisfied on `[6, 8]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowerKernel {
    #[default]
    DelayConsistent,
    AsPrinted,
}

/// Evaluator for `F` and `f` with a fixed quadrature configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveFunctions {
    cfg: QuadratureConfig,
    gamma: f64,
    kernel: LowerKernel,
}

impl SieveFunctions {
    pub fn new(cfg: QuadratureConfig) -> Self {
        Self {
            cfg,
            gamma: EULER_GAMMA,
            kernel: LowerKernel::default(),
        }
    }

    /// Override the value of Euler's constant. Only meant for fault injection.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_lower_kernel(mut self, kernel: LowerKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    fn two_exp_gamma(&self) -> f64 {
        2.0 * self.gamma.exp()
    }

    pub fn eval(&self, func: SieveFn, s: f64) -> Result<SieveFunctionValue> {
        let branch = Branch::select(func, s)?;
        self.eval_branch(func, branch, s)
    }

    pub fn upper(&self, s: f64) -> Result<SieveFunctionValue> {
        self.eval(SieveFn::Upper, s)
    }

    pub fn lower(&self, s: f64) -> Result<SieveFunctionValue> {
        self.eval(SieveFn::Lower, s)
    }

    /// Evaluate with an explicitly chosen branch; `s` must lie in its closed range.
    pub fn eval_branch(&self, func: SieveFn, branch: Branch, s: f64) -> Result<SieveFunctionValue> {
        let (lo, hi) = branch.range(func).ok_or_else(|| {
            Error::domain(format!("{func} has no branch {branch}"))
        })?;
        let lo_ok = if lo == 0.0 { s > 0.0 } else { s >= lo };
        if !(lo_ok && s <= hi) {
            return Err(Error::domain(format!(
                "branch {branch} of {func} covers [{lo}, {hi}], got s = {s}"
            )));
        }
        let est = match func {
            SieveFn::Upper => self.upper_branch(branch, s)?,
            SieveFn::Lower => self.lower_branch(branch, s)?,
        };
        Ok(SieveFunctionValue {
            func,
            s,
            value: est.value,
            error_bound: est.error,
            branch,
        })
    }

    fn upper_branch(&self, branch: Branch, s: f64) -> Result<Estimate> {
        let c = self.two_exp_gamma() / s;
        let bracket = match branch {
            Branch::First => Estimate::exact(1.0),
            Branch::Second => Estimate::exact(1.0) + self.log_ratio_integral(s - 1.0)?,
            Branch::Third => {
                Estimate::exact(1.0)
                    + self.log_ratio_integral(s - 1.0)?
                    + self.upper_correction(s)?
            }
            Branch::Zero => unreachable!("checked by eval_branch"),
        };
        Ok(bracket.scale(c))
    }

    fn lower_branch(&self, branch: Branch, s: f64) -> Result<Estimate> {
        if branch == Branch::Zero {
            return Ok(Estimate::ZERO);
        }
        let c = self.two_exp_gamma() / s;
        let log_term = Estimate::exact((s - 1.0).ln());
        let bracket = match branch {
            Branch::First => log_term,
            Branch::Second => log_term + self.lower_nested(s)?,
            Branch::Third => log_term + self.lower_nested(s)? + self.lower_correction(s)?,
            Branch::Zero => unreachable!(),
        };
        Ok(bracket.scale(c))
    }

    /// `\int_2^{x} log(t-1)/t dt`
    fn log_ratio_integral(&self, x: f64) -> Result<Estimate> {
        log_ratio_integral(x, &self.cfg)
    }

    /// `\int_2^{s-3} log(t-1)/t \int_{t+2}^{s-1} log((u-1)/(t+1))/u du dt`
    fn upper_correction(&self, s: f64) -> Result<Estimate> {
        let inner_cfg = self.cfg.tightened(10.0);
        integrate_nested(
            |t| {
                let weight = (t - 1.0).ln() / t;
                let inner = integrate(
                    |u| ((u - 1.0) / (t + 1.0)).ln() / u,
                    t + 2.0,
                    s - 1.0,
                    &inner_cfg,
                )?;
                Ok(inner.scale(weight))
            },
            2.0,
            s - 3.0,
            &self.cfg,
        )
    }

    /// `\int_3^{s-1} (1/t) \int_2^{t-1} log(u-1)/u du dt`
    fn lower_nested(&self, s: f64) -> Result<Estimate> {
        let inner_cfg = self.cfg.tightened(10.0);
        integrate_nested(
            |t| Ok(log_ratio_integral(t - 1.0, &inner_cfg)?.scale(1.0 / t)),
            3.0,
            s - 1.0,
            &self.cfg,
        )
    }

    /// `\int_2^{s-4} log(t-1)/t \int_{t+2}^{s-2} log((u-1)/(t+1)) K(s,u)/u du dt`
    fn lower_correction(&self, s: f64) -> Result<Estimate> {
        let inner_cfg = self.cfg.tightened(10.0);
        let kernel = self.kernel;
        integrate_nested(
            |t| {
                let weight = (t - 1.0).ln() / t;
                let inner = integrate(
                    |u| {
                        let k = match kernel {
                            LowerKernel::DelayConsistent => ((s - 1.0) / (u + 1.0)).ln(),
                            LowerKernel::AsPrinted => (s / (u + 2.0)).ln(),
                        };
                        ((u - 1.0) / (t + 1.0)).ln() * k / u
                    },
                    t + 2.0,
                    s - 2.0,
                    &inner_cfg,
                )?;
                Ok(inner.scale(weight))
            },
            2.0,
            s - 4.0,
            &self.cfg,
        )
    }

    /// Finite-difference residual of the delay system at `s`.
    ///
    /// Returns the larger of `|(sF)'(s) - f(s-1)|` and `|(sf)'(s) - F(s-1)|`,
    /// each term taken only where the functions involved are defined. The
    /// derivatives are central differences with step `h`.
    pub fn dde_residual(&self, s: f64, h: f64) -> Result<f64> {
        if !(h > 0.0 && h <= 1e-3) {
            return Err(Error::domain(format!("step h must lie in (0, 1e-3], got {h}")));
        }
        if !(s.is_finite() && s >= 2.0 + 2.0 * h) {
            return Err(Error::domain(format!(
                "the delay system holds for s >= 2; need s >= 2 + 2h, got s = {s}"
            )));
        }
        if let Some(b) = BREAKPOINTS.iter().find(|&&b| (s - b).abs() < 2.0 * h) {
            return Err(Error::domain(format!(
                "s = {s} is within 2h of the breakpoint {b}"
            )));
        }

        let mut residual: Option<f64> = None;
        let mut record = |r: f64| {
            residual = Some(residual.map_or(r, |cur: f64| cur.max(r)));
        };

        if s + h <= UPPER_MAX {
            let plus = self.upper(s + h)?.value * (s + h);
            let minus = self.upper(s - h)?.value * (s - h);
            let shifted = self.lower(s - 1.0)?.value;
            record(((plus - minus) / (2.0 * h) - shifted).abs());
        }
        if s + h <= LOWER_MAX && s - 1.0 <= UPPER_MAX {
            let plus = self.lower(s + h)?.value * (s + h);
            let minus = self.lower(s - h)?.value * (s - h);
            let shifted = self.upper(s - 1.0)?.value;
            record(((plus - minus) / (2.0 * h) - shifted).abs());
        }

        residual.ok_or_else(|| {
            Error::domain(format!("neither delay identity can be evaluated at s = {s}"))
        })
    }
}

/// `\int_2^{x} log(t-1)/t dt`, zero when `x <= 2`.
fn log_ratio_integral(x: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    integrate(|t| (t - 1.0).ln() / t, 2.0, x, cfg)
}

/// `F(s)` with the standard constants.
pub fn eval_upper(s: f64, cfg: &QuadratureConfig) -> Result<SieveFunctionValue> {
    SieveFunctions::new(*cfg).upper(s)
}

/// `f(s)` with the standard constants.
pub fn eval_lower(s: f64, cfg: &QuadratureConfig) -> Result<SieveFunctionValue> {
    SieveFunctions::new(*cfg).lower(s)
}

pub fn dde_residual(s: f64, h: f64, cfg: &QuadratureConfig) -> Result<f64> {
    SieveFunctions::new(*cfg).dde_residual(s, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf() -> SieveFunctions {
        SieveFunctions::new(QuadratureConfig::default())
    }

    #[test]
    fn closed_form_endpoints() {
        let e = EULER_GAMMA.exp();
        let f2 = sf().upper(2.0).unwrap();
        assert_eq!(f2.value, 2.0 * e / 2.0);
        assert_eq!(f2.error_bound, 0.0);
        assert_eq!(f2.branch, Branch::First);
        assert!((f2.value - 1.781_072_4).abs() < 1e-7);

        let f3 = sf().upper(3.0).unwrap();
        assert_eq!(f3.branch, Branch::First);
        assert!((f3.value - 1.187_381_6).abs() < 1e-7);

        let l2 = sf().lower(2.0).unwrap();
        assert_eq!(l2.value, 0.0);
        assert_eq!(l2.error_bound, 0.0);
        assert_eq!(l2.branch, Branch::Zero);

        let l3 = sf().lower(3.0).unwrap();
        assert!((l3.value - 2.0 * e * 2f64.ln() / 3.0).abs() < 1e-15);
        assert!((l3.value - 0.823_03).abs() < 1e-5);

        let l4 = sf().lower(4.0).unwrap();
        assert_eq!(l4.branch, Branch::First);
        assert!((l4.value - 0.9783).abs() < 1e-4);
    }

    #[test]
    fn lower_vanishes_below_two() {
        for s in [1e-9, 0.5, 1.5, 2.0] {
            let v = sf().lower(s).unwrap();
            assert_eq!(v.value, 0.0);
            assert_eq!(v.error_bound, 0.0);
        }
    }

    #[test]
    fn branch_selection_prefers_lower_branch() {
        assert_eq!(Branch::select(SieveFn::Upper, 3.0).unwrap(), Branch::First);
        assert_eq!(Branch::select(SieveFn::Upper, 5.0).unwrap(), Branch::Second);
        assert_eq!(Branch::select(SieveFn::Upper, 5.0001).unwrap(), Branch::Third);
        assert_eq!(Branch::select(SieveFn::Lower, 4.0).unwrap(), Branch::First);
        assert_eq!(Branch::select(SieveFn::Lower, 6.0).unwrap(), Branch::Second);
        assert_eq!(Branch::select(SieveFn::Lower, 8.0).unwrap(), Branch::Third);
    }

    #[test]
    fn domain_errors() {
        for s in [0.0, -1.0, 7.0001, f64::NAN] {
            assert!(matches!(sf().upper(s), Err(Error::Domain(_))), "F({s})");
        }
        for s in [0.0, 8.0001] {
            assert!(matches!(sf().lower(s), Err(Error::Domain(_))), "f({s})");
        }
        assert!(sf().eval_branch(SieveFn::Upper, Branch::Second, 5.5).is_err());
        assert!(sf().eval_branch(SieveFn::Upper, Branch::Zero, 1.0).is_err());
    }

    #[test]
    fn forced_branches_agree_at_breakpoints() {
        let sf = sf();
        for (func, b, lo, hi) in [
            (SieveFn::Upper, 3.0, Branch::First, Branch::Second),
            (SieveFn::Upper, 5.0, Branch::Second, Branch::Third),
            (SieveFn::Lower, 4.0, Branch::First, Branch::Second),
            (SieveFn::Lower, 6.0, Branch::Second, Branch::Third),
        ] {
            let a = sf.eval_branch(func, lo, b).unwrap();
            let c = sf.eval_branch(func, hi, b).unwrap();
            assert!((a.value - c.value).abs() <= 2.0 * (a.error_bound + c.error_bound) + 1e-15);
        }
    }

    #[test]
    fn residual_on_constant_branch() {
        // sF(s) is constant below 3 and f(s-1) = 0 there; what remains is the
        // O(h^2) central-difference error of (sf)' = 2e^γ/(s-1)
        let r = sf().dde_residual(2.5, 1e-4).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn residual_rejects_points_near_breakpoints() {
        assert!(sf().dde_residual(3.0001, 1e-4).is_err());
        assert!(sf().dde_residual(1.5, 1e-4).is_err());
        assert!(sf().dde_residual(3.5, 2e-3).is_err());
        assert!(sf().dde_residual(3.5, 0.0).is_err());
    }

    #[test]
    fn printed_kernel_breaks_the_delay_identity() {
        let printed = sf().with_lower_kernel(LowerKernel::AsPrinted);
        assert!(printed.dde_residual(7.5, 1e-4).unwrap() > 1e-5);
        assert!(sf().dde_residual(7.5, 1e-4).unwrap() < 1e-7);
        // and f decreases past 7.1 under the printed kernel
        assert!(printed.lower(8.0).unwrap().value < printed.lower(7.0).unwrap().value);
    }

    #[test]
    fn gamma_override_scales_values() {
        let shifted = sf().with_gamma(EULER_GAMMA + 1e-3);
        let a = shifted.upper(2.0).unwrap().value;
        assert!((a / sf().upper(2.0).unwrap().value - 1e-3f64.exp()).abs() < 1e-12);
    }
}
