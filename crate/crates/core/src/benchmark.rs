//! Built-in benchmark configurations.

use crate::error::{AdoError, Result};
use crate::nodal::{Material, NodalProblem};
use crate::quadrature::SphereQuadrature;

/// Side of the square benchmark domain, cm.
pub const FIG7_SIDE: f64 = 1.0;
/// Upper corner of the source square `[0, 0.5]²`, cm.
pub const FIG7_SOURCE_EDGE: f64 = 0.5;
pub const FIG7_SIGMA_T: f64 = 1.0;
pub const FIG7_SOURCE: f64 = 1.0;

/// Homogeneous unit square with a unit source in its lower-left quarter and
/// vacuum edges, split into `h × k` equal regions.
pub fn fig7(sigma_s: f64, quad: SphereQuadrature, h: usize, k: usize) -> Result<NodalProblem> {
    if h == 0 || k == 0 || h % 2 == 1 || k % 2 == 1 {
        return Err(AdoError::InvalidProblem(format!(
            "the benchmark mesh must be even in both directions to resolve the source square (got {h}x{k})"
        )));
    }
    let grid = |n: usize| -> Vec<f64> { (0..=n).map(|i| FIG7_SIDE * i as f64 / n as f64).collect() };
    let mut p = NodalProblem::homogeneous(
        grid(h),
        grid(k),
        Material::isotropic(FIG7_SIGMA_T, sigma_s),
        quad,
    );
    for r in 0..p.regions() {
        if fig7_in_source(&p, r) {
            p.region_source[r] = FIG7_SOURCE;
        }
    }
    p.validate()?;
    Ok(p)
}

/// Whether region `r` lies inside the source square.
pub fn fig7_in_source(p: &NodalProblem, r: usize) -> bool {
    let (x, y) = p.region_extent(r);
    x[1] <= FIG7_SOURCE_EDGE + 1e-12 && y[1] <= FIG7_SOURCE_EDGE + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::level_symmetric;

    #[test]
    fn two_by_two_layout() {
        let p = fig7(0.9, level_symmetric(4).unwrap(), 2, 2).unwrap();
        assert_eq!(p.region_source, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.system_size(), 192);
        let p = fig7(0.3, level_symmetric(4).unwrap(), 4, 4).unwrap();
        assert_eq!(p.region_source.iter().filter(|&&s| s == 1.0).count(), 4);
    }

    #[test]
    fn odd_mesh_is_rejected() {
        assert!(fig7(0.9, level_symmetric(4).unwrap(), 1, 1).is_err());
        assert!(fig7(0.9, level_symmetric(4).unwrap(), 2, 3).is_err());
    }
}
