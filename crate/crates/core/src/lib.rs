//! Heat kernels of the hyperbolic spaces `H^n` and the Li-Yau type gradient
//! estimates they satisfy.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: hyperboloid-model points, distances and distance gradients.
//! * [`kernel`]: `K_n(t, r)` in log space with its radial and time
//!   log-derivatives, plus the profile `alpha_n` and the `Z` function.
//! * [`estimates`]: every gradient-estimate bound as a signed-slack predicate.
//! * [`series`]: exact rational power series used to re-check the coefficient
//!   sign arguments behind the sharp `H^3` estimate.
//! * [`verify`]: grid scans, kernel superpositions, Harnack and concavity suites,
//!   and the comparison table.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod geometry;
pub mod kernel;
pub mod quadrature;
pub mod series;
pub mod verify;

pub use error::{Error, Result};

/// Version tag written into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
