//! Fixed problems shared by the benchmarks.

use ado_core::benchmark::fig7;
use ado_core::quadrature::level_symmetric;
use ado_core::slab::{BoundaryData, SlabSource};
use ado_core::{half_range_gauss, NodalProblem, PhaseFunction, SlabProblem};

/// Beam-driven anisotropic slab with a linear internal source.
pub fn slab(order: usize) -> SlabProblem {
    SlabProblem::new(0.0, 2.0, 0.95, half_range_gauss(order).expect("valid order"))
        .with_phase(PhaseFunction::henyey_greenstein(0.5, 8).expect("valid g"))
        .with_incident(BoundaryData::Constant(1.0), BoundaryData::Zero)
        .with_source(SlabSource::Polynomial {
            plus: vec![1.0, 0.5],
            minus: vec![1.0, -0.5],
        })
}

/// The unit-square source benchmark on an `n × n` mesh with `LQ_order`.
pub fn square(n: usize, order: usize) -> NodalProblem {
    fig7(0.9, level_symmetric(order).expect("valid order"), n, n).expect("even mesh")
}
