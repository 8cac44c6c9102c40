//! Angular quadrature sets.
//!
//! The half-range rule drives the slab solver. The sphere sets carry the
//! directions of the four upper octants (`xi > 0`) with weights summing to
//! `2π`; the lower hemisphere is the `xi -> -xi` mirror and is folded into
//! the phase-function terms by the 2D solver.

mod gauss;
mod level_symmetric;

pub use gauss::{gauss_legendre, half_range_gauss, HalfRangeQuadrature};

use crate::error::{AdoError, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Family of a sphere quadrature set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Classical level-symmetric `LQ_N`.
    LevelSymmetric,
    /// Legendre-Chebyshev quadrangular `P_N T_N`.
    LegendreChebyshevQuad,
    /// Legendre-Chebyshev triangular `P_N T_N S_N`.
    LegendreChebyshevTri,
}

impl Scheme {
    pub fn build(self, order: usize) -> Result<SphereQuadrature> {
        match self {
            Scheme::LevelSymmetric => level_symmetric(order),
            Scheme::LegendreChebyshevQuad => legendre_chebyshev_quad(order),
            Scheme::LegendreChebyshevTri => legendre_chebyshev_tri(order),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::LevelSymmetric => "lqn",
            Scheme::LegendreChebyshevQuad => "pntn",
            Scheme::LegendreChebyshevTri => "pntnsn",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lqn" | "lq" | "level-symmetric" => Ok(Scheme::LevelSymmetric),
            "pntn" | "quad" => Ok(Scheme::LegendreChebyshevQuad),
            "pntnsn" | "tri" => Ok(Scheme::LegendreChebyshevTri),
            other => Err(format!(
                "unknown quadrature scheme `{other}` (expected lqn, pntn or pntnsn)"
            )),
        }
    }
}

/// A discrete direction `(mu, eta, xi)` with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub mu: f64,
    pub eta: f64,
    pub xi: f64,
    pub weight: f64,
}

impl Direction {
    pub fn dot(&self, other: &Direction) -> f64 {
        self.mu * other.mu + self.eta * other.eta + self.xi * other.xi
    }

    /// The `xi -> -xi` mirror.
    pub fn lower_mirror(&self) -> Direction {
        Direction {
            xi: -self.xi,
            ..*self
        }
    }
}

/// Sign pattern of `(mu, eta)` for the four upper octants, in storage order.
pub const OCTANT_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];

/// Upper-hemisphere direction set, stored octant-major and level-major
/// within each octant.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    scheme: Scheme,
    order: usize,
    per_octant: usize,
    directions: Vec<Direction>,
}

impl SphereQuadrature {
    fn from_first_octant(scheme: Scheme, order: usize, first: Vec<Direction>) -> Self {
        let per_octant = first.len();
        let directions = OCTANT_SIGNS
            .iter()
            .flat_map(|&(sm, se)| {
                first.iter().map(move |d| Direction {
                    mu: sm * d.mu,
                    eta: se * d.eta,
                    ..*d
                })
            })
            .collect();
        Self {
            scheme,
            order,
            per_octant,
            directions,
        }
    }

    /// Wraps an explicit direction list (unit vectors, `ξ > 0`, positive
    /// weights). No symmetry is assumed.
    pub fn from_directions(scheme: Scheme, order: usize, directions: Vec<Direction>) -> Result<Self> {
        let valid = directions.iter().all(|d| {
            d.xi > 0.0
                && d.weight > 0.0
                && (d.mu * d.mu + d.eta * d.eta + d.xi * d.xi - 1.0).abs() < 1e-12
        });
        if directions.is_empty() || !valid {
            return Err(AdoError::InvalidProblem(
                "directions must be upper-hemisphere unit vectors with positive weights".into(),
            ));
        }
        Ok(Self {
            scheme,
            order,
            per_octant: directions.len() / 4,
            directions,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Directions per octant.
    pub fn per_octant(&self) -> usize {
        self.per_octant
    }

    /// Total number of stored directions `M` (four octants).
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn total_weight(&self) -> f64 {
        self.directions.iter().map(|d| d.weight).sum()
    }

    /// `|Σ w μ^a η^b ξ^c − ∫ μ^a η^b ξ^c dΩ|` over the upper hemisphere.
    pub fn moment_error(&self, a: u32, b: u32, c: u32) -> f64 {
        let approx: f64 = self
            .directions
            .iter()
            .map(|d| d.weight * d.mu.powi(a as i32) * d.eta.powi(b as i32) * d.xi.powi(c as i32))
            .sum();
        (approx - hemisphere_moment(a, b, c)).abs()
    }
}

/// `Γ(n/2)` for positive integer `n`.
fn gamma_half(n: u32) -> f64 {
    debug_assert!(n > 0);
    let mut value = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if n.is_multiple_of(2) { 2 } else { 1 };
    while k < n {
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

/// Even exponent triples `(a, b, c)` of total degree `≤ 2N − 2`, the range an
/// `N`-level polar rule can resolve.
pub fn even_moment_audit(order: usize) -> Vec<(u32, u32, u32)> {
    let top = 2 * order.max(1) as u32 - 2;
    let mut out = Vec::new();
    for deg in (0..=top).step_by(2) {
        for a in (0..=deg).step_by(2) {
            for b in (0..=deg - a).step_by(2) {
                out.push((a, b, deg - a - b));
            }
        }
    }
    out
}

/// Exact `∫ μ^a η^b ξ^c dΩ` over the hemisphere `ξ > 0`, from the Beta-function
/// form of the octant integral `Γ(α)Γ(β)Γ(γ) / (4 Γ(α+β+γ))`, `α = (a+1)/2`.
pub fn hemisphere_moment(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    gamma_half(a + 1) * gamma_half(b + 1) * gamma_half(c + 1) / gamma_half(a + b + c + 3)
}

fn check_even(order: usize) -> Result<()> {
    if order < 2 || order % 2 == 1 {
        return Err(AdoError::InvalidOrder {
            order,
            reason: "sphere quadrature orders must be even and at least 2",
        });
    }
    Ok(())
}

/// Level-symmetric `LQ_N` for even `N ≤ 20`.
pub fn level_symmetric(order: usize) -> Result<SphereQuadrature> {
    check_even(order)?;
    if order > 20 {
        return Err(AdoError::UnsupportedOrder {
            order,
            reason: "level-symmetric sets are limited to N <= 20",
        });
    }
    let table = level_symmetric::table(order).expect("tables cover every even order up to 20");
    let levels = table.levels();
    let half = order / 2;
    // Octant total of 1 in the table maps to π/2 per octant.
    let scale = PI / 2.0;
    let mut first = Vec::with_capacity(order * (order + 2) / 8);
    for i in 1..=half {
        // Increasing azimuth within a level means decreasing mu index.
        for j in (1..=half + 1 - i).rev() {
            let k = half + 2 - i - j;
            first.push(Direction {
                mu: levels[j - 1],
                eta: levels[k - 1],
                xi: levels[i - 1],
                weight: scale * table.weight([i, j, k]),
            });
        }
    }
    Ok(SphereQuadrature::from_first_octant(
        Scheme::LevelSymmetric,
        order,
        first,
    ))
}

/// Positive Gauss-Legendre roots (ascending) with their weights.
fn polar_levels(order: usize) -> Result<Vec<(f64, f64)>> {
    let (x, w) = gauss_legendre(order)?;
    Ok(x.into_iter()
        .zip(w)
        .filter(|(xi, _)| *xi > 0.0)
        .collect())
}

fn direction_at(xi: f64, phi: f64, weight: f64) -> Direction {
    let sin_theta = (1.0 - xi * xi).sqrt();
    Direction {
        mu: sin_theta * phi.cos(),
        eta: sin_theta * phi.sin(),
        xi,
        weight,
    }
}

/// Legendre-Chebyshev quadrangular `P_N T_N`: `N²/4` directions per octant.
pub fn legendre_chebyshev_quad(order: usize) -> Result<SphereQuadrature> {
    check_even(order)?;
    let n_az = order / 2;
    let mut first = Vec::with_capacity(n_az * n_az);
    for (xi, w) in polar_levels(order)? {
        // Chebyshev azimuths: equal weights, midpoints of π/(2N)-wide cells.
        let weight = w * PI / order as f64;
        for j in 1..=n_az {
            let phi = (2 * j - 1) as f64 * PI / (2 * order) as f64;
            first.push(direction_at(xi, phi, weight));
        }
    }
    Ok(SphereQuadrature::from_first_octant(
        Scheme::LegendreChebyshevQuad,
        order,
        first,
    ))
}

/// Legendre-Chebyshev triangular `P_N T_N S_N`: `N(N+2)/8` directions per
/// octant, `N − 2i + 2` azimuths over `(0, π)` at level `i`.
pub fn legendre_chebyshev_tri(order: usize) -> Result<SphereQuadrature> {
    check_even(order)?;
    let nf = order as f64;
    let mut first = Vec::with_capacity(order * (order + 2) / 8);
    for (idx, (xi, w)) in polar_levels(order)?.into_iter().enumerate() {
        let i = (idx + 1) as f64;
        let count = order - 2 * idx;
        let denom = nf - 2.0 * i + 2.0;
        // w_i / (N − 2i + 2) on the unit-normalized scale; π maps it to 2π total.
        let weight = PI * w / denom;
        for j in 1..=count / 2 {
            let phi = PI / 2.0 * (1.0 - (nf - 2.0 * j as f64 - 2.0 * i + 3.0) / denom);
            first.push(direction_at(xi, phi, weight));
        }
    }
    Ok(SphereQuadrature::from_first_octant(
        Scheme::LegendreChebyshevTri,
        order,
        first,
    ))
}
