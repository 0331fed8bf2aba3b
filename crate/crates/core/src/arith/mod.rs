//! Primes, Ω(n), the singular series and the sieve density product.

pub mod factor;
pub mod series;
pub mod sieve;

pub use factor::{omega, FactorTable};
pub use series::{
    sieve_product_w, singular_series, singular_series_with, w_asymptotic_ratio,
    SingularSeriesResult, TwinConstant,
};
pub use sieve::{icbrt, isqrt, PrimeSieve};
