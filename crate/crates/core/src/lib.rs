//! Analytical discrete ordinates (ADO) solvers for the linear transport
//! equation in slab and two-dimensional Cartesian geometry.
//!
//! The slab solver reduces the discrete-ordinates system to a half-order
//! eigenproblem and builds the solution from exponential modes plus a
//! particular part for polynomial sources. The nodal solver integrates the
//! 2D equation transversally over rectangular regions, solves one such
//! eigenproblem per axis and region, and couples the regions through edge
//! averages in one sparse linear system. Reference solvers and Richardson
//! tooling for checking both live alongside.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod convergence;
pub mod error;
pub mod nodal;
pub mod oracle;
pub mod quadrature;
pub mod scattering;
pub mod slab;

mod linalg;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use convergence::RefinementSeries;
pub use error::{AdoError, Result};
pub use nodal::{NodalProblem, NodalSolution};
pub use oracle::OracleConfig;
pub use quadrature::{half_range_gauss, HalfRangeQuadrature, Scheme, SphereQuadrature};
pub use scattering::PhaseFunction;
pub use slab::{SlabProblem, SlabSolution};
