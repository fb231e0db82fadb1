//! Exact computation of partial Hecke L-values at `s = 0` for real quadratic
//! fields through Shintani cone decompositions, linearity coefficients for
//! parametrized families, and a residue sieve for class-number-one problems.

pub mod acceptance;
pub mod arith;
pub mod biro;
pub mod cfrac;
pub mod characters;
pub mod error;
pub mod linearity;
pub mod quadfield;
pub mod serial;
pub mod shintani;

pub use error::{Error, Result};
