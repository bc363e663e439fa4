//! Exact arithmetic for unimodular lattices.
//!
//! - [`qseries`]: truncated power series on a quarter-integer exponent grid and
//!   the Jacobi theta generators.
//! - [`thetafit`]: decomposition of odd unimodular theta series in the
//!   `theta3^(n-8j) Delta8^j` basis, the matching shadow series, and a solver
//!   for the coefficients under shadow constraints.
//! - [`lattice`]: Gram-matrix lattices, even sublattices, shadows, exact
//!   short-vector enumeration, theta series by enumeration, frames.
//! - [`neighbor`]: the odd 2-neighbor of an even unimodular lattice.
//! - [`z8code`]: codes over Z/8, Euclidean weight, Construction A.

#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod error;
pub mod rational;
pub mod qseries;
pub mod thetafit;
pub mod lattice;
pub mod neighbor;
pub mod z8code;

pub use error::{Error, Result};
