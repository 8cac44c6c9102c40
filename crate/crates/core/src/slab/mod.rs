//! Plane-parallel transport by the analytical discrete ordinates method.

mod basis;
mod problem;
mod solution;

pub use basis::{build_basis, DegenerateMode, Mode, SpectralBasis, DEGENERATE_THRESHOLD};
pub use problem::{BoundaryData, Reflection, SlabProblem, SlabSource, MAX_SOURCE_DEGREE};
pub use solution::{solve, solve_with_basis, SlabSolution};
