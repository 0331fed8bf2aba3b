//! Numerical verification toolkit for Chen-type results on `N - p = P₃`.
//!
//! * [`sieve_functions`]: the linear-sieve functions `F(s)`, `f(s)`.
//! * [`delta`]: the constants `Δ₁…Δ₄`, their margins and thresholds.
//! * [`arith`]: prime sieve, Ω(n), `C(N)` and `W(z)`.
//! * [`counting`]: exact representation counts and the weighted sieve check.
//! * [`report`] and [`cli`]: output formatting and the command-line front end.
//! * [`verify`]: the fixed verification pipeline.

pub mod arith;
pub mod cli;
pub mod counting;
pub mod delta;
pub mod error;
pub mod quadrature;
pub mod report;
pub mod sieve_functions;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::{Estimate, QuadratureConfig};
