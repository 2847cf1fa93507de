//! Verification toolkit for moments of generalized quadratic Gauss sums
//! weighted by `|L(1, chi)|`, for prime moduli.

pub mod charsum;
pub mod error;
pub mod field;
pub mod gauss;
pub mod lfunc;
pub mod moments;
pub mod par;
pub mod precision;

pub use error::{Error, Result};
pub mod sweep;
