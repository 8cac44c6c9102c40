use crate::error::{AdoError, Result};
use crate::quadrature::HalfRangeQuadrature;
use crate::scattering::PhaseFunction;

/// Highest polynomial degree in `τ` accepted for the internal source.
pub const MAX_SOURCE_DEGREE: usize = 4;

/// Incident distribution `F(μ)` on one face, `μ ∈ (0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    Zero,
    Constant(f64),
    /// `amplitude · μ^power`
    CosinePower { amplitude: f64, power: i32 },
    /// Values at the quadrature nodes, in node order.
    Tabulated(Vec<f64>),
}

impl BoundaryData {
    pub fn values(&self, quad: &HalfRangeQuadrature) -> Result<Vec<f64>> {
        let mu = quad.nodes();
        Ok(match self {
            BoundaryData::Zero => vec![0.0; mu.len()],
            BoundaryData::Constant(c) => vec![*c; mu.len()],
            BoundaryData::CosinePower { amplitude, power } => {
                mu.iter().map(|m| amplitude * m.powi(*power)).collect()
            }
            BoundaryData::Tabulated(v) => {
                if v.len() != mu.len() {
                    return Err(AdoError::InvalidProblem(format!(
                        "tabulated boundary data has {} values for {} nodes",
                        v.len(),
                        mu.len()
                    )));
                }
                v.clone()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BoundaryData::Zero => true,
            BoundaryData::Constant(c) => *c == 0.0,
            BoundaryData::CosinePower { amplitude, .. } => *amplitude == 0.0,
            BoundaryData::Tabulated(v) => v.iter().all(|&x| x == 0.0),
        }
    }
}

/// Internal source `Q(τ, ±μ)`, polynomial in `s = τ − τ_a`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SlabSource {
    #[default]
    None,
    /// Same polynomial for every node of a given direction sign.
    Polynomial { plus: Vec<f64>, minus: Vec<f64> },
    /// One coefficient row per node and sign.
    PerNode {
        plus: Vec<Vec<f64>>,
        minus: Vec<Vec<f64>>,
    },
}

impl SlabSource {
    /// Isotropic constant source `q`.
    pub fn constant(q: f64) -> Self {
        SlabSource::Polynomial {
            plus: vec![q],
            minus: vec![q],
        }
    }

    /// Coefficients per node, `[node][power]`, for the `+μ` and `−μ` sets.
    pub(crate) fn per_node(&self, n: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let check = |c: &Vec<f64>| -> Result<()> {
            if c.len() > MAX_SOURCE_DEGREE + 1 {
                return Err(AdoError::UnsupportedSource(format!(
                    "polynomial degree {} exceeds {MAX_SOURCE_DEGREE}",
                    c.len() - 1
                )));
            }
            Ok(())
        };
        match self {
            SlabSource::None => Ok((vec![vec![]; n], vec![vec![]; n])),
            SlabSource::Polynomial { plus, minus } => {
                check(plus)?;
                check(minus)?;
                Ok((vec![plus.clone(); n], vec![minus.clone(); n]))
            }
            SlabSource::PerNode { plus, minus } => {
                if plus.len() != n || minus.len() != n {
                    return Err(AdoError::UnsupportedSource(format!(
                        "per-node source needs {n} rows per sign"
                    )));
                }
                plus.iter().chain(minus).try_for_each(check)?;
                Ok((plus.clone(), minus.clone()))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SlabSource::None => true,
            SlabSource::Polynomial { plus, minus } => {
                plus.iter().chain(minus).all(|&c| c == 0.0)
            }
            SlabSource::PerNode { plus, minus } => {
                plus.iter().chain(minus).flatten().all(|&c| c == 0.0)
            }
        }
    }
}

/// Specular and diffuse reflection coefficients of one face.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Reflection {
    pub specular: f64,
    pub diffuse: f64,
}

impl Reflection {
    pub fn total(&self) -> f64 {
        self.specular + self.diffuse
    }
}

/// Plane-parallel transfer problem on `(τ_a, τ_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabProblem {
    pub tau_a: f64,
    pub tau_b: f64,
    pub albedo: f64,
    pub phase: PhaseFunction,
    pub left: Reflection,
    pub right: Reflection,
    /// Incident on `τ_a` in `+μ` directions.
    pub f1: BoundaryData,
    /// Incident on `τ_b` in `−μ` directions.
    pub f2: BoundaryData,
    pub source: SlabSource,
    pub quad: HalfRangeQuadrature,
}

impl SlabProblem {
    /// Vacuum slab with no sources, isotropic scattering.
    pub fn new(tau_a: f64, tau_b: f64, albedo: f64, quad: HalfRangeQuadrature) -> Self {
        Self {
            tau_a,
            tau_b,
            albedo,
            phase: PhaseFunction::isotropic(),
            left: Reflection::default(),
            right: Reflection::default(),
            f1: BoundaryData::Zero,
            f2: BoundaryData::Zero,
            source: SlabSource::None,
            quad,
        }
    }

    pub fn with_phase(mut self, phase: PhaseFunction) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_incident(mut self, f1: BoundaryData, f2: BoundaryData) -> Self {
        self.f1 = f1;
        self.f2 = f2;
        self
    }

    pub fn with_reflection(mut self, left: Reflection, right: Reflection) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn with_source(mut self, source: SlabSource) -> Self {
        self.source = source;
        self
    }

    pub fn thickness(&self) -> f64 {
        self.tau_b - self.tau_a
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_b > self.tau_a) || !self.tau_a.is_finite() || !self.tau_b.is_finite() {
            return Err(AdoError::InvalidProblem(format!(
                "slab bounds must satisfy tau_a < tau_b (got {} and {})",
                self.tau_a, self.tau_b
            )));
        }
        if !(0.0..=1.0).contains(&self.albedo) {
            return Err(AdoError::InvalidProblem(format!(
                "albedo {} outside [0, 1]",
                self.albedo
            )));
        }
        for (name, r) in [("left", self.left), ("right", self.right)] {
            let ok = (0.0..=1.0).contains(&r.specular)
                && (0.0..=1.0).contains(&r.diffuse)
                && r.total() <= 1.0 + 1e-15;
            if !ok {
                return Err(AdoError::InvalidProblem(format!(
                    "{name} reflection coefficients must lie in [0, 1] with sum <= 1"
                )));
            }
        }
        Ok(())
    }

    /// Conservative medium between two perfect mirrors: the steady problem
    /// has no unique solution.
    pub fn is_conservative_mirror(&self) -> bool {
        self.albedo == 1.0
            && (self.left.total() - 1.0).abs() < 1e-15
            && (self.right.total() - 1.0).abs() < 1e-15
    }
}
