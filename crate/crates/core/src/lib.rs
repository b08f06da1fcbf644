//! Exact-arithmetic irreducibility tooling for generalized Hermite–Laguerre polynomials.

pub mod certify;
pub mod criteria;
pub mod error;
pub mod ghl;
pub mod newton;
pub mod sieve;
mod ratio_serde;
pub mod valuation;

pub use error::{Error, Result};
pub use ghl::{GhlParams, IntegerPolynomial, SeedCoefficients, SeedKind};
pub use valuation::Valuation;
