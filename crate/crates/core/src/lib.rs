//! Finite-field hypergeometric functions, elliptic-curve trace sweeps and
//! moment statistics for one-parameter families.

pub mod cache;
pub mod curves;
pub mod error;
pub mod ffield;
pub mod hypfun;
pub mod moments;
pub mod poly;
pub mod scalar;
pub mod theory;
pub mod verify;

pub use error::{Error, Result};

pub type GaussTable64 = ffield::GaussTable<f64>;
pub type GaussTable32 = ffield::GaussTable<f32>;
/// Exact rational used for limits and coefficients.
pub type ExactRational = num_rational::BigRational;
/// Small exact rational used for hypergeometric parameters.
pub type Rational = num_rational::Rational64;
