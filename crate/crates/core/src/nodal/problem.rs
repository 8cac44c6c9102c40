use crate::error::{AdoError, Result};
use crate::quadrature::SphereQuadrature;
use crate::scattering::PhaseFunction;

/// Unknown count above which the direct nodal solve refuses to run.
pub const MAX_UNKNOWNS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    /// Extinction (total) coefficient `β`.
    pub sigma_t: f64,
    pub sigma_s: f64,
    pub phase: PhaseFunction,
}

impl Material {
    pub fn isotropic(sigma_t: f64, sigma_s: f64) -> Self {
        Self {
            sigma_t,
            sigma_s,
            phase: PhaseFunction::isotropic(),
        }
    }
}

/// Incoming intensity on one domain edge.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum EdgeCondition {
    #[default]
    Vacuum,
    /// Same value for every incoming direction.
    Uniform(f64),
    /// One value per stored direction; entries for outgoing directions are
    /// ignored.
    PerDirection(Vec<f64>),
}

impl EdgeCondition {
    pub fn value(&self, direction: usize) -> f64 {
        match self {
            EdgeCondition::Vacuum => 0.0,
            EdgeCondition::Uniform(v) => *v,
            EdgeCondition::PerDirection(v) => v[direction],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Boundaries {
    pub left: EdgeCondition,
    pub right: EdgeCondition,
    pub bottom: EdgeCondition,
    pub top: EdgeCondition,
}

/// How the scattering kernel enters the region matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseForm {
    /// Direct evaluation of `p(Ω·Ω')`.
    #[default]
    Exact,
    /// Associated-Legendre expansion with azimuthal selectors.
    Expanded,
}

/// Linear solver for the global nodal system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LinearSolver {
    /// Sparse LU.
    #[default]
    Direct,
    /// Restarted GMRES preconditioned by the per-region diagonal blocks.
    Gmres {
        tolerance: f64,
        restart: usize,
        max_iterations: usize,
    },
}

/// Rectangular multi-region problem. Region `r = k·H + h` covers
/// `[x_h, x_{h+1}] × [y_k, y_{k+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalProblem {
    pub x_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    pub materials: Vec<Material>,
    pub region_material: Vec<usize>,
    /// Constant isotropic source per region.
    pub region_source: Vec<f64>,
    pub boundaries: Boundaries,
    pub quad: SphereQuadrature,
    pub phase_form: PhaseForm,
    pub solver: LinearSolver,
}

impl NodalProblem {
    /// One material everywhere, no sources, vacuum edges.
    pub fn homogeneous(
        x_grid: Vec<f64>,
        y_grid: Vec<f64>,
        material: Material,
        quad: SphereQuadrature,
    ) -> Self {
        let regions = (x_grid.len().saturating_sub(1)) * (y_grid.len().saturating_sub(1));
        Self {
            x_grid,
            y_grid,
            materials: vec![material],
            region_material: vec![0; regions],
            region_source: vec![0.0; regions],
            boundaries: Boundaries::default(),
            quad,
            phase_form: PhaseForm::Exact,
            solver: LinearSolver::Direct,
        }
    }

    pub fn h(&self) -> usize {
        self.x_grid.len() - 1
    }

    pub fn k(&self) -> usize {
        self.y_grid.len() - 1
    }

    pub fn regions(&self) -> usize {
        self.h() * self.k()
    }

    pub fn region_index(&self, h: usize, k: usize) -> usize {
        k * self.h() + h
    }

    /// `(h, k)` position of region `r`.
    pub fn region_position(&self, r: usize) -> (usize, usize) {
        (r % self.h(), r / self.h())
    }

    /// `([x0, x1], [y0, y1])` extent of region `r`.
    pub fn region_extent(&self, r: usize) -> ([f64; 2], [f64; 2]) {
        let (h, k) = self.region_position(r);
        (
            [self.x_grid[h], self.x_grid[h + 1]],
            [self.y_grid[k], self.y_grid[k + 1]],
        )
    }

    pub fn material(&self, r: usize) -> &Material {
        &self.materials[self.region_material[r]]
    }

    /// Number of unknowns of the global system, `4M·H·K`.
    pub fn system_size(&self) -> usize {
        4 * self.quad.len() * self.regions()
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = |g: &[f64]| g.len() >= 2 && g.windows(2).all(|p| p[0] < p[1]);
        if !increasing(&self.x_grid) || !increasing(&self.y_grid) {
            return Err(AdoError::InvalidProblem(
                "grid lines must be strictly increasing with at least one region per axis".into(),
            ));
        }
        let r = self.regions();
        if self.region_material.len() != r || self.region_source.len() != r {
            return Err(AdoError::InvalidProblem(format!(
                "expected {r} region materials and sources"
            )));
        }
        if self.region_material.iter().any(|&m| m >= self.materials.len()) {
            return Err(AdoError::InvalidProblem("region material index out of range".into()));
        }
        for (i, m) in self.materials.iter().enumerate() {
            if !(m.sigma_t >= m.sigma_s && m.sigma_s >= 0.0 && m.sigma_t > 0.0) {
                return Err(AdoError::InvalidProblem(format!(
                    "material {i} must satisfy sigma_t >= sigma_s >= 0 and sigma_t > 0"
                )));
            }
        }
        let m = self.quad.len();
        for edge in [
            &self.boundaries.left,
            &self.boundaries.right,
            &self.boundaries.bottom,
            &self.boundaries.top,
        ] {
            if let EdgeCondition::PerDirection(v) = edge {
                if v.len() != m {
                    return Err(AdoError::InvalidProblem(format!(
                        "edge data has {} entries for {m} directions",
                        v.len()
                    )));
                }
            }
        }
        Ok(())
    }
}
