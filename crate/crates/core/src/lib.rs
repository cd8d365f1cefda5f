//! Exact computation of F-thresholds, ν-invariants, Frobenius roots and test
//! ideals of polynomials over prime fields.

pub mod basep;
pub mod error;
pub mod ideals;
pub mod lctscan;
pub mod nu;
pub mod polyfp;
pub mod testideals;
pub mod thresholds;

pub use basep::{CarryProfile, DigitStream, ExtNat, Prime, Rational};
pub use error::{Error, Result};
pub use ideals::Ideal;
pub use polyfp::{parse, Ctx, Monomial, Polynomial, VarContext};
