//! Two-dimensional nodal ADO solver for rectangular multi-region domains.
//!
//! Each region carries two transverse-integrated one-dimensional problems,
//! one per axis, coupled by their edge averages. The global system is
//! assembled once and solved by sparse LU or preconditioned GMRES.

mod basis;
mod ordering;
mod problem;
mod solve;
mod sparse;

pub use basis::{
    axis_matrices, build_all_bases, build_region_basis, scattering_kernel, Average, AxisBasis,
    RegionBasis,
};
pub use ordering::{order_directions, DirectionOrdering, OrderingScheme};
pub use problem::{
    Boundaries, EdgeCondition, LinearSolver, Material, NodalProblem, PhaseForm, MAX_UNKNOWNS,
};
pub use solve::{assemble_and_solve, NodalSolution};
