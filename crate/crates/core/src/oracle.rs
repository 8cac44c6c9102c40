//! Brute-force reference solvers: Case's discrete eigenvalue by bisection,
//! source iteration on a fine slab mesh, and diamond-difference sweeps in
//! two dimensions. None of them touches the spectral solvers.

use std::f64::consts::PI;

use crate::error::{AdoError, Result};
use crate::nodal::{NodalProblem, Material};
use crate::quadrature::{Direction, SphereQuadrature};
use crate::scattering::legendre_all;
use crate::slab::SlabProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Cells across the slab, or per axis of the 2D domain.
    pub resolution: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            resolution: 20_000,
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

impl OracleConfig {
    pub fn new(resolution: usize, tolerance: f64, max_iterations: usize) -> Result<Self> {
        let cfg = Self {
            resolution,
            tolerance,
            max_iterations,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(AdoError::InvalidProblem("oracle resolution must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(AdoError::InvalidProblem("oracle tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(AdoError::InvalidProblem("oracle needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Root `ν₀ > 1` of `1 = ϖ ν artanh(1/ν)` for isotropic scattering.
pub fn case_discrete_eigenvalue(albedo: f64) -> Result<f64> {
    if !(albedo > 0.0 && albedo < 1.0) {
        return Err(AdoError::Domain {
            value: albedo,
            lo: 0.0,
            hi: 1.0,
        });
    }
    // ϖ ν artanh(1/ν) decreases from +∞ to ϖ on (1, ∞)
    let f = |nu: f64| albedo * nu * (1.0 / nu).atanh() - 1.0;
    let (mut lo, mut hi) = (1.0 + 1e-12, 1e6);
    if f(lo) <= 0.0 {
        return Ok(lo);
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fine-mesh slab intensities at the node directions of the problem.
#[derive(Debug, Clone)]
pub struct SlabReference {
    pub tau: Vec<f64>,
    pub mu: Vec<f64>,
    /// `I(τ_j, μ_k)`, indexed `[j][k]`.
    pub plus: Vec<Vec<f64>>,
    /// `I(τ_j, −μ_k)`.
    pub minus: Vec<Vec<f64>>,
    pub density: Vec<f64>,
    pub iterations: usize,
}

impl SlabReference {
    /// Density at `tau`, linear between mesh nodes.
    pub fn density_at(&self, tau: f64) -> Result<f64> {
        interpolate(&self.tau, &self.density, tau)
    }

    pub fn intensity_at(&self, tau: f64, k: usize, positive: bool) -> Result<f64> {
        let col: Vec<f64> = if positive { &self.plus } else { &self.minus }
            .iter()
            .map(|row| row[k])
            .collect();
        interpolate(&self.tau, &col, tau)
    }
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> Result<f64> {
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let slack = 1e-12 * (hi - lo);
    if !(at >= lo - slack && at <= hi + slack) {
        return Err(AdoError::Domain { value: at, lo, hi });
    }
    let h = (hi - lo) / (x.len() - 1) as f64;
    let j = (((at - lo) / h).floor() as usize).min(x.len() - 2);
    let t = ((at - x[j]) / h).clamp(0.0, 1.0);
    Ok(y[j] + t * (y[j + 1] - y[j]))
}

/// `(1 − e^{−h})` and `1 − (1 − e^{−h})/h`, accurate for small `h`.
fn step_factors(h: f64) -> (f64, f64) {
    let e = -(-h).exp_m1();
    let g = if h < 1e-3 {
        h * (0.5 - h * (1.0 / 6.0 - h * (1.0 / 24.0 - h / 120.0)))
    } else {
        1.0 - e / h
    };
    (e, g)
}

/// Source iteration with a linear-source integrating factor along each
/// node direction. Reflection conditions are lagged one iteration.
pub fn slab_reference(p: &SlabProblem, cfg: &OracleConfig) -> Result<SlabReference> {
    p.validate()?;
    cfg.validate()?;
    let mu = p.quad.nodes().to_vec();
    let w = p.quad.weights().to_vec();
    let n = mu.len();
    let cells = cfg.resolution;
    let h = p.thickness() / cells as f64;
    let tau: Vec<f64> = (0..=cells).map(|j| p.tau_a + j as f64 * h).collect();
    let beta = p.phase.coefficients();
    let pl: Vec<Vec<f64>> = mu.iter().map(|&m| legendre_all(beta.len() - 1, m)).collect();
    let (qp, qm) = p.source.per_node(n)?;
    let poly = |c: &[f64], s: f64| c.iter().rev().fold(0.0, |acc, &v| acc * s + v);
    let fixed_plus: Vec<Vec<f64>> = tau
        .iter()
        .map(|&t| (0..n).map(|k| poly(&qp[k], t - p.tau_a)).collect())
        .collect();
    let fixed_minus: Vec<Vec<f64>> = tau
        .iter()
        .map(|&t| (0..n).map(|k| poly(&qm[k], t - p.tau_a)).collect())
        .collect();
    let f1 = p.f1.values(&p.quad)?;
    let f2 = p.f2.values(&p.quad)?;
    let steps: Vec<(f64, f64, f64)> = mu
        .iter()
        .map(|&m| {
            let (e, g) = step_factors(h / m);
            (1.0 - e, e - g, g)
        })
        .collect();

    let mut plus = vec![vec![0.0; n]; cells + 1];
    let mut minus = vec![vec![0.0; n]; cells + 1];
    let mut density = vec![0.0; cells + 1];
    let mut sp = vec![vec![0.0; n]; cells + 1];
    let mut sm = vec![vec![0.0; n]; cells + 1];
    for it in 1..=cfg.max_iterations {
        for j in 0..=cells {
            let mut moments = vec![0.0; beta.len()];
            for (l, m) in moments.iter_mut().enumerate() {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                *m = (0..n)
                    .map(|k| w[k] * pl[k][l] * (plus[j][k] + sign * minus[j][k]))
                    .sum();
            }
            for k in 0..n {
                let (mut even, mut odd) = (0.0, 0.0);
                for l in 0..beta.len() {
                    let t = beta[l] * pl[k][l] * moments[l];
                    if l % 2 == 0 {
                        even += t;
                    } else {
                        odd += t;
                    }
                }
                sp[j][k] = 0.5 * p.albedo * (even + odd) + fixed_plus[j][k];
                sm[j][k] = 0.5 * p.albedo * (even - odd) + fixed_minus[j][k];
            }
        }
        let out_a: f64 = (0..n).map(|k| w[k] * mu[k] * minus[0][k]).sum();
        let out_b: f64 = (0..n).map(|k| w[k] * mu[k] * plus[cells][k]).sum();
        let mut next_plus = vec![vec![0.0; n]; cells + 1];
        let mut next_minus = vec![vec![0.0; n]; cells + 1];
        for k in 0..n {
            let (decay, a0, a1) = steps[k];
            next_plus[0][k] =
                f1[k] + p.left.specular * minus[0][k] + 2.0 * p.left.diffuse * out_a;
            for j in 0..cells {
                next_plus[j + 1][k] =
                    next_plus[j][k] * decay + sp[j][k] * a0 + sp[j + 1][k] * a1;
            }
            next_minus[cells][k] =
                f2[k] + p.right.specular * plus[cells][k] + 2.0 * p.right.diffuse * out_b;
            for j in (0..cells).rev() {
                next_minus[j][k] =
                    next_minus[j + 1][k] * decay + sm[j + 1][k] * a0 + sm[j][k] * a1;
            }
        }
        let next_density: Vec<f64> = (0..=cells)
            .map(|j| (0..n).map(|k| w[k] * (next_plus[j][k] + next_minus[j][k])).sum())
            .collect();
        let scale = next_density.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let change = next_density
            .iter()
            .zip(&density)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        let edge_change = (0..n)
            .map(|k| {
                (next_plus[0][k] - plus[0][k])
                    .abs()
                    .max((next_minus[cells][k] - minus[cells][k]).abs())
            })
            .fold(0.0f64, f64::max);
        plus = next_plus;
        minus = next_minus;
        density = next_density;
        let rel = if scale > 0.0 {
            change.max(edge_change) / scale
        } else {
            change.max(edge_change)
        };
        if rel < cfg.tolerance {
            return Ok(SlabReference {
                tau,
                mu,
                plus,
                minus,
                density,
                iterations: it,
            });
        }
        if it == cfg.max_iterations {
            return Err(AdoError::NoConvergence {
                iterations: it,
                change: rel,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Diamond-difference result on a uniform `nx × ny` mesh.
#[derive(Debug, Clone)]
pub struct DdSolution {
    pub nx: usize,
    pub ny: usize,
    /// Weight-normalized scalar flux per cell, row-major in `y`.
    pub cell_flux: Vec<f64>,
    /// Weight-normalized scalar flux per region of the problem.
    pub region_flux: Vec<f64>,
    pub iterations: usize,
    /// Cells where some direction went negative.
    pub negative_cells: usize,
}

/// Kernel `σ_s/(4π) w_n [p(Ω_n·Ω_d) + p(Ω̄_n·Ω_d)]` built straight from the
/// phase function.
fn kernel(mat: &Material, dirs: &[Direction]) -> Vec<Vec<f64>> {
    dirs.iter()
        .map(|d| {
            dirs.iter()
                .map(|n| {
                    let up = d.mu * n.mu + d.eta * n.eta + d.xi * n.xi;
                    let down = d.mu * n.mu + d.eta * n.eta - d.xi * n.xi;
                    mat.sigma_s / (4.0 * PI)
                        * n.weight
                        * (mat.phase.eval(up) + mat.phase.eval(down))
                })
                .collect()
        })
        .collect()
}

/// Index of the grid interval holding cell `i` of `cells` uniform cells,
/// or an error if some grid line falls between mesh lines.
fn cell_regions(grid: &[f64], cells: usize, axis: &str) -> Result<Vec<usize>> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let lines: Vec<usize> = grid
        .iter()
        .map(|&g| {
            let t = (g - lo) / (hi - lo) * cells as f64;
            if (t - t.round()).abs() > 1e-8 {
                Err(AdoError::InvalidProblem(format!(
                    "{axis} grid line {g} does not fall on the {cells}-cell oracle mesh"
                )))
            } else {
                Ok(t.round() as usize)
            }
        })
        .collect::<Result<_>>()?;
    let mut owner = vec![0; cells];
    for (r, pair) in lines.windows(2).enumerate() {
        owner[pair[0]..pair[1]].iter_mut().for_each(|o| *o = r);
    }
    Ok(owner)
}

/// Source-iterated diamond difference without negative-flux fixup.
pub fn dd2d(p: &NodalProblem, cfg: &OracleConfig) -> Result<DdSolution> {
    p.validate()?;
    cfg.validate()?;
    let quad: &SphereQuadrature = &p.quad;
    let dirs = quad.directions();
    let m = dirs.len();
    let (nx, ny) = (cfg.resolution, cfg.resolution);
    let col_region = cell_regions(&p.x_grid, nx, "x")?;
    let row_region = cell_regions(&p.y_grid, ny, "y")?;
    let dx = (p.x_grid[p.h()] - p.x_grid[0]) / nx as f64;
    let dy = (p.y_grid[p.k()] - p.y_grid[0]) / ny as f64;
    let kernels: Vec<Vec<Vec<f64>>> = p.materials.iter().map(|mt| kernel(mt, dirs)).collect();
    let cells = nx * ny;
    let region_of = |c: usize| p.region_index(col_region[c % nx], row_region[c / nx]);
    let total_w: f64 = dirs.iter().map(|d| d.weight).sum();

    // intensity[d][cell]
    let mut psi = vec![vec![0.0; cells]; m];
    let mut flux = vec![0.0; cells];
    let mut src = vec![vec![0.0; cells]; m];
    for it in 1..=cfg.max_iterations {
        for c in 0..cells {
            let r = region_of(c);
            let k = &kernels[p.region_material[r]];
            for d in 0..m {
                let scattered: f64 = (0..m).map(|n| k[d][n] * psi[n][c]).sum();
                src[d][c] = p.region_source[r] + scattered;
            }
        }
        for d in 0..m {
            let dir = dirs[d];
            let (ax, ay) = (2.0 * dir.mu.abs() / dx, 2.0 * dir.eta.abs() / dy);
            let left_in = if dir.mu > 0.0 {
                p.boundaries.left.value(d)
            } else {
                p.boundaries.right.value(d)
            };
            let bottom_in = if dir.eta > 0.0 {
                p.boundaries.bottom.value(d)
            } else {
                p.boundaries.top.value(d)
            };
            let mut x_edge = vec![bottom_in; nx];
            for jj in 0..ny {
                let j = if dir.eta > 0.0 { jj } else { ny - 1 - jj };
                let mut y_edge = left_in;
                for ii in 0..nx {
                    let i = if dir.mu > 0.0 { ii } else { nx - 1 - ii };
                    let c = j * nx + i;
                    let sigma_t = p.material(region_of(c)).sigma_t;
                    let centre =
                        (src[d][c] + ax * y_edge + ay * x_edge[i]) / (sigma_t + ax + ay);
                    y_edge = 2.0 * centre - y_edge;
                    x_edge[i] = 2.0 * centre - x_edge[i];
                    psi[d][c] = centre;
                }
            }
        }
        let next: Vec<f64> = (0..cells)
            .map(|c| (0..m).map(|d| dirs[d].weight * psi[d][c]).sum::<f64>() / total_w)
            .collect();
        let scale = next.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let change = next
            .iter()
            .zip(&flux)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        flux = next;
        let rel = if scale > 0.0 { change / scale } else { change };
        if rel < cfg.tolerance {
            let mut sums = vec![0.0; p.regions()];
            let mut counts = vec![0usize; p.regions()];
            for c in 0..cells {
                sums[region_of(c)] += flux[c];
                counts[region_of(c)] += 1;
            }
            let negative_cells = (0..cells)
                .filter(|&c| (0..m).any(|d| psi[d][c] < 0.0))
                .count();
            return Ok(DdSolution {
                nx,
                ny,
                cell_flux: flux,
                region_flux: sums.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect(),
                iterations: it,
                negative_cells,
            });
        }
        if it == cfg.max_iterations {
            return Err(AdoError::NoConvergence {
                iterations: it,
                change: rel,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Closed-form region-averaged scalar flux of a pure absorber rectangle
/// `a × b` with uniform angular source `q` and vacuum edges.
pub fn absorber_region_flux(a: f64, b: f64, sigma_t: f64, q: f64, quad: &SphereQuadrature) -> f64 {
    let dirs = quad.directions();
    let total_w: f64 = dirs.iter().map(|d| d.weight).sum();
    let mut acc = 0.0;
    for d in dirs {
        let (mu, eta) = (d.mu.abs(), d.eta.abs());
        let k = sigma_t / mu;
        let x_c = a.min(mu * b / eta);
        let e1 = -(-k * x_c).exp_m1() / k;
        let e2 = (1.0 - (-k * x_c).exp() * (1.0 + k * x_c)) / (k * k);
        let near = (eta / sigma_t) * (x_c - e1) + b * e1 - (eta / mu) * e2;
        let far = (a - x_c) * (eta / sigma_t) * -(-sigma_t * b / eta).exp_m1();
        let mean_decay = (near + far) / (a * b);
        acc += d.weight * q / sigma_t * (1.0 - mean_decay);
    }
    acc / total_w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{half_range_gauss, level_symmetric};
    use crate::slab::{BoundaryData, SlabSource};

    #[test]
    fn case_eigenvalue_limits_and_values() {
        let small = case_discrete_eigenvalue(1e-6).unwrap();
        assert!(small > 1.0 && small - 1.0 < 1e-11);
        let nu = case_discrete_eigenvalue(0.9).unwrap();
        assert!((0.9 * nu * (1.0 / nu).atanh() - 1.0).abs() < 1e-10);
        assert!((nu - 1.90320).abs() < 1e-5, "{nu}");
        let half = case_discrete_eigenvalue(0.5).unwrap();
        assert!((half - 1.044).abs() < 1e-3, "{half}");
        assert!(case_discrete_eigenvalue(1.0).is_err());
        assert!(case_discrete_eigenvalue(0.0).is_err());
    }

    #[test]
    fn config_is_validated() {
        assert!(OracleConfig::new(1, 1e-8, 10).is_err());
        assert!(OracleConfig::new(10, 0.0, 10).is_err());
        assert!(OracleConfig::new(10, 1e-8, 10).is_ok());
    }

    #[test]
    fn slab_absorber_reproduces_beam_attenuation() {
        let quad = half_range_gauss(4).unwrap();
        let p = SlabProblem::new(0.0, 2.0, 0.0, quad.clone())
            .with_incident(BoundaryData::Constant(1.0), BoundaryData::Zero);
        let r = slab_reference(&p, &OracleConfig::new(400, 1e-12, 10).unwrap()).unwrap();
        for (j, &t) in r.tau.iter().enumerate() {
            for k in 0..4 {
                let exact = (-t / quad.nodes()[k]).exp();
                assert!((r.plus[j][k] - exact).abs() < 1e-13);
                assert_eq!(r.minus[j][k], 0.0);
            }
        }
    }

    #[test]
    fn slab_scheme_is_second_order() {
        // exact solution for Q = s² in an absorber entered from the left with
        // no incidence: I(s, μ) = s² − 2μs + 2μ² − 2μ² e^{−s/μ}
        let quad = half_range_gauss(3).unwrap();
        let p = SlabProblem::new(0.0, 1.5, 0.0, quad.clone()).with_source(SlabSource::Polynomial {
            plus: vec![0.0, 0.0, 1.0],
            minus: vec![0.0, 0.0, 1.0],
        });
        let err = |cells: usize| {
            let r = slab_reference(&p, &OracleConfig::new(cells, 1e-13, 10).unwrap()).unwrap();
            let mut worst = 0.0f64;
            for (j, &s) in r.tau.iter().enumerate() {
                for k in 0..3 {
                    let m = quad.nodes()[k];
                    let exact = s * s - 2.0 * m * s + 2.0 * m * m * (1.0 - (-s / m).exp());
                    worst = worst.max((r.plus[j][k] - exact).abs());
                }
            }
            worst
        };
        let (coarse, fine) = (err(40), err(80));
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn slab_density_interpolation_rejects_outside_points() {
        let p = SlabProblem::new(0.0, 1.0, 0.5, half_range_gauss(2).unwrap())
            .with_incident(BoundaryData::Constant(1.0), BoundaryData::Zero);
        let r = slab_reference(&p, &OracleConfig::new(50, 1e-12, 1000).unwrap()).unwrap();
        assert!(r.density_at(0.5).is_ok());
        assert!(r.density_at(1.2).is_err());
    }

    #[test]
    fn slab_iteration_cap_is_reported() {
        let p = SlabProblem::new(0.0, 50.0, 0.999, half_range_gauss(4).unwrap())
            .with_incident(BoundaryData::Constant(1.0), BoundaryData::Zero);
        assert!(matches!(
            slab_reference(&p, &OracleConfig::new(100, 1e-12, 5).unwrap()),
            Err(AdoError::NoConvergence { iterations: 5, .. })
        ));
    }

    fn square(sigma_s: f64, regions: usize) -> NodalProblem {
        let g: Vec<f64> = (0..=regions).map(|i| i as f64 / regions as f64).collect();
        NodalProblem::homogeneous(
            g.clone(),
            g,
            Material::isotropic(1.0, sigma_s),
            level_symmetric(4).unwrap(),
        )
    }

    #[test]
    fn dd_zero_source_is_zero() {
        let s = dd2d(&square(0.5, 2), &OracleConfig::new(16, 1e-12, 100).unwrap()).unwrap();
        assert!(s.region_flux.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn dd_absorber_approaches_closed_form() {
        let mut p = square(0.0, 1);
        p.region_source = vec![1.0];
        let exact = absorber_region_flux(1.0, 1.0, 1.0, 1.0, &p.quad);
        let err = |n| {
            let s = dd2d(&p, &OracleConfig::new(n, 1e-13, 10).unwrap()).unwrap();
            (s.region_flux[0] - exact).abs()
        };
        let (e1, e2) = (err(64), err(128));
        assert!(e2 < 1e-4 * exact, "{e2}");
        assert!(e1 / e2 > 3.0, "{}", e1 / e2);
    }

    #[test]
    fn closed_form_absorber_tends_to_infinite_medium() {
        let q = level_symmetric(6).unwrap();
        let mut last = 0.0;
        for size in [1.0, 4.0, 16.0, 64.0] {
            let f = absorber_region_flux(size, size, 1.0, 2.0, &q);
            assert!(f > last && f < 2.0);
            last = f;
        }
        assert!((last - 2.0).abs() < 0.05);
    }

    #[test]
    fn dd_mesh_must_align() {
        let p = square(0.5, 3);
        assert!(matches!(
            dd2d(&p, &OracleConfig::new(16, 1e-12, 10).unwrap()),
            Err(AdoError::InvalidProblem(_))
        ));
    }

    #[test]
    fn dd_symmetric_benchmark() {
        let mut p = square(0.9, 2);
        p.region_source[0] = 1.0;
        let s = dd2d(&p, &OracleConfig::new(32, 1e-13, 1000).unwrap()).unwrap();
        assert!((s.region_flux[1] - s.region_flux[2]).abs() < 1e-8 * s.region_flux[1]);
    }
}
