//! Theta functions on the type-I bounded symmetric domain attached to an
//! imaginary quadratic field, the finite characteristic groups of a matrix
//! pair `(T, P)`, and Riemann-type relations between them.
//!
//! The crate is organised bottom-up:
//!
//! - [`kfield`]: exact arithmetic in `K = Q(√−d)` and matrices over `K`;
//! - [`lattice`]: integer lattices, Hermite/Smith normal forms, the groups `G1`, `G2`;
//! - [`theta`]: rigorous truncated evaluation of every theta series;
//! - [`relation`]: construction and numerical verification of relations;
//! - [`presets`]: the worked relations as named configurations and a suite runner;
//! - [`json`]: the wire formats shared with the command-line front-end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::module_inception)]

pub mod error;
pub mod json;
pub mod kfield;
pub mod lattice;
pub mod presets;
pub mod relation;
pub mod theta;

pub use error::{Error, ErrorKind, Result};
