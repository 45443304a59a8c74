//! Numerical lab for normalized determinants, chaotic order, Kantorovich and
//! Specht type inequalities, and Levi-form based maximality tests.

pub mod error;
pub mod fsdet;
pub mod levi;
pub mod maximality;
pub mod orders;
pub mod sampling;
pub mod spectra;

pub use error::{Error, Result};
