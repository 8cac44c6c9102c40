use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;

use super::basis::{build_all_bases, scattering_kernel, Average, RegionBasis};
use super::problem::{LinearSolver, NodalProblem, MAX_UNKNOWNS};
use super::sparse::{gmres, Csr};
use crate::error::{AdoError, Result};

const CONSISTENCY_TOL: f64 = 1e-6;

/// Unknown blocks per region, `M` entries each.
const BLOCK_A: usize = 0;
const BLOCK_B: usize = 1;
const BLOCK_Z: usize = 2;
const BLOCK_W: usize = 3;

const EQUATION_NAMES: [&str; 4] = [
    "y-averaged particular",
    "x-averaged particular",
    "x-incoming continuity",
    "y-incoming continuity",
];

/// Solved nodal problem: per region `A` (y-averaged modes), `B`
/// (x-averaged modes) and the particular constants `Z`, `W`.
#[derive(Debug, Clone)]
pub struct NodalSolution {
    problem: NodalProblem,
    bases: Vec<RegionBasis>,
    kernels: Vec<DMatrix<f64>>,
    x: Vec<f64>,
    residual: f64,
    nonzeros: usize,
}

struct Layout {
    m: usize,
}

impl Layout {
    fn unknown(&self, r: usize, block: usize, k: usize) -> usize {
        r * 4 * self.m + block * self.m + k
    }
}

/// Linear form of a transverse average evaluated at one end of its region.
fn edge_form(
    p: &NodalProblem,
    bases: &[RegionBasis],
    layout: &Layout,
    r: usize,
    avg: Average,
    d: usize,
    at_end: bool,
) -> Vec<(usize, f64)> {
    let (xr, yr) = p.region_extent(r);
    let len = match avg {
        Average::YAveraged => xr[1] - xr[0],
        Average::XAveraged => yr[1] - yr[0],
    };
    let (s, u) = if at_end { (len, 0.0) } else { (0.0, len) };
    let (coef, part) = match avg {
        Average::YAveraged => (BLOCK_A, BLOCK_Z),
        Average::XAveraged => (BLOCK_B, BLOCK_W),
    };
    let ax = bases[r].axis(avg);
    let half = ax.ordering.half();
    let pos = ax.ordering.position(d);
    let (plus, i) = if pos < half { (true, pos) } else { (false, pos - half) };
    let mut out = Vec::with_capacity(2 * half + 1);
    for j in 0..half {
        let ea = (-s / ax.nu[j]).exp();
        let eb = (-u / ax.nu[j]).exp();
        let (fa, fb) = if plus {
            (ax.phi_plus[j][i], ax.phi_minus[j][i])
        } else {
            (ax.phi_minus[j][i], ax.phi_plus[j][i])
        };
        out.push((layout.unknown(r, coef, j), fa * ea));
        out.push((layout.unknown(r, coef, j + half), fb * eb));
    }
    out.push((layout.unknown(r, part, d), 1.0));
    out
}

pub fn assemble_and_solve(p: &NodalProblem) -> Result<NodalSolution> {
    p.validate()?;
    let n = p.system_size();
    if n > MAX_UNKNOWNS {
        return Err(AdoError::SystemTooLarge {
            got: n,
            limit: MAX_UNKNOWNS,
        });
    }
    let bases = build_all_bases(p)?;
    let kernels: Vec<DMatrix<f64>> = p
        .materials
        .iter()
        .map(|mat| scattering_kernel(mat, &p.quad, p.phase_form))
        .collect();
    let m = p.quad.len();
    let layout = Layout { m };
    let dirs = p.quad.directions();
    let (hh, kk) = (p.h(), p.k());

    let mut t: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = vec![0.0; n];
    let push_form = |t: &mut Vec<_>, row: usize, form: Vec<(usize, f64)>, scale: f64| {
        for (c, v) in form {
            t.push((row, c, scale * v));
        }
    };
    for r in 0..p.regions() {
        let (h, k) = p.region_position(r);
        let (xr, yr) = p.region_extent(r);
        let (dx, dy) = (xr[1] - xr[0], yr[1] - yr[0]);
        let mat = p.material(r);
        let kern = &kernels[p.region_material[r]];
        let src = p.region_source[r];
        let row = |eq: usize, d: usize| r * 4 * m + eq * m + d;
        for d in 0..m {
            let dir = dirs[d];
            // particular constants: (β − K) Z = S − η/Δy [I_x(top) − I_x(bottom)]
            for (eq, block, avg, c, len) in [
                (0, BLOCK_Z, Average::XAveraged, dir.eta, dy),
                (1, BLOCK_W, Average::YAveraged, dir.mu, dx),
            ] {
                let rw = row(eq, d);
                for nn in 0..m {
                    let diag = if nn == d { mat.sigma_t } else { 0.0 };
                    t.push((rw, layout.unknown(r, block, nn), diag - kern[(d, nn)]));
                }
                let f = c / len;
                push_form(&mut t, rw, edge_form(p, &bases, &layout, r, avg, d, true), f);
                push_form(&mut t, rw, edge_form(p, &bases, &layout, r, avg, d, false), -f);
                rhs[rw] = src;
            }

            // incoming continuity along x
            let rw = row(2, d);
            let forward = dir.mu > 0.0;
            push_form(
                &mut t,
                rw,
                edge_form(p, &bases, &layout, r, Average::YAveraged, d, !forward),
                1.0,
            );
            let neighbour = if forward {
                (h > 0).then(|| p.region_index(h - 1, k))
            } else {
                (h + 1 < hh).then(|| p.region_index(h + 1, k))
            };
            match neighbour {
                Some(nb) => push_form(
                    &mut t,
                    rw,
                    edge_form(p, &bases, &layout, nb, Average::YAveraged, d, forward),
                    -1.0,
                ),
                None => {
                    let edge = if forward {
                        &p.boundaries.left
                    } else {
                        &p.boundaries.right
                    };
                    rhs[rw] = edge.value(d);
                }
            }

            // incoming continuity along y
            let rw = row(3, d);
            let forward = dir.eta > 0.0;
            push_form(
                &mut t,
                rw,
                edge_form(p, &bases, &layout, r, Average::XAveraged, d, !forward),
                1.0,
            );
            let neighbour = if forward {
                (k > 0).then(|| p.region_index(h, k - 1))
            } else {
                (k + 1 < kk).then(|| p.region_index(h, k + 1))
            };
            match neighbour {
                Some(nb) => push_form(
                    &mut t,
                    rw,
                    edge_form(p, &bases, &layout, nb, Average::XAveraged, d, forward),
                    -1.0,
                ),
                None => {
                    let edge = if forward {
                        &p.boundaries.bottom
                    } else {
                        &p.boundaries.top
                    };
                    rhs[rw] = edge.value(d);
                }
            }
        }
    }
    let csr = Csr::from_triplets(n, t);
    let x = match p.solver {
        LinearSolver::Direct => direct_solve(&csr, &rhs, m)?,
        LinearSolver::Gmres {
            tolerance,
            restart,
            max_iterations,
        } => iterative_solve(&csr, &rhs, m, tolerance, restart, max_iterations)?,
    };
    let ax = csr.mul(&x);
    let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()))
        + csr.norm_inf() * x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let worst = (0..n)
        .map(|i| ((ax[i] - rhs[i]).abs(), i))
        .fold((0.0, 0), |a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a });
    let residual = if scale > 0.0 { worst.0 / scale } else { worst.0 };
    let limit = match p.solver {
        LinearSolver::Direct => 1e-10,
        LinearSolver::Gmres { tolerance, .. } => tolerance.max(1e-10) * 10.0,
    };
    if !residual.is_finite() || residual > limit {
        return Err(singular_at(worst.1, m));
    }
    Ok(NodalSolution {
        problem: p.clone(),
        bases,
        kernels,
        x,
        residual,
        nonzeros: csr.nnz(),
    })
}

fn singular_at(row: usize, m: usize) -> AdoError {
    let region = row / (4 * m);
    let local = row % (4 * m);
    AdoError::SingularSystem {
        region,
        block: EQUATION_NAMES[local / m],
        direction: local % m,
    }
}

fn direct_solve(a: &Csr, b: &[f64], m: usize) -> Result<Vec<f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> = a
        .triplets()
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.n, a.n, &triplets)
        .map_err(|e| AdoError::Consistency(format!("sparse assembly failed: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|_| locate_singular_block(a, m))?;
    let mut rhs = Mat::<f64>::from_fn(a.n, 1, |i, _| b[i]);
    lu.solve_in_place(rhs.as_mut());
    Ok((0..a.n).map(|i| rhs[(i, 0)]).collect())
}

/// Points at the first region whose diagonal block is numerically singular,
/// else at region 0.
fn locate_singular_block(a: &Csr, m: usize) -> AdoError {
    let size = 4 * m;
    for r in 0..a.n / size {
        let block = a.diagonal_block(r * size, size);
        let svd = block.svd(false, false);
        let smax = svd.singular_values.max();
        if let Some((idx, smin)) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        {
            if *smin <= 1e-13 * smax {
                return singular_at(r * size + idx.min(size - 1), m);
            }
        }
    }
    singular_at(0, m)
}

fn iterative_solve(
    a: &Csr,
    b: &[f64],
    m: usize,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let size = 4 * m;
    let blocks: Vec<_> = (0..a.n / size)
        .map(|r| a.diagonal_block(r * size, size).lu())
        .collect();
    let precond = |v: &[f64]| -> Vec<f64> {
        let mut out = v.to_vec();
        for (r, lu) in blocks.iter().enumerate() {
            let seg = nalgebra::DVector::from_column_slice(&v[r * size..(r + 1) * size]);
            if let Some(s) = lu.solve(&seg) {
                out[r * size..(r + 1) * size].copy_from_slice(s.as_slice());
            }
        }
        out
    };
    gmres(a, b, precond, tol, restart, max_iter)
}

impl NodalSolution {
    pub fn problem(&self) -> &NodalProblem {
        &self.problem
    }

    pub fn bases(&self) -> &[RegionBasis] {
        &self.bases
    }

    /// Scaled max-norm residual of the global system.
    pub fn system_residual(&self) -> f64 {
        self.residual
    }

    pub fn system_size(&self) -> usize {
        self.x.len()
    }

    /// Stored nonzeros of the assembled matrix.
    pub fn nonzeros(&self) -> usize {
        self.nonzeros
    }

    fn m(&self) -> usize {
        self.problem.quad.len()
    }

    fn coeff(&self, r: usize, block: usize, k: usize) -> f64 {
        self.x[r * 4 * self.m() + block * self.m() + k]
    }

    /// `(A_{1..M}, B_{1..M}, Z_{1..M}, W_{1..M})` of region `r`.
    pub fn region_coefficients(&self, r: usize) -> [&[f64]; 4] {
        let m = self.m();
        let s = &self.x[r * 4 * m..(r + 1) * 4 * m];
        [&s[..m], &s[m..2 * m], &s[2 * m..3 * m], &s[3 * m..]]
    }

    fn axis_range(&self, r: usize, avg: Average) -> [f64; 2] {
        let (xr, yr) = self.problem.region_extent(r);
        match avg {
            Average::YAveraged => xr,
            Average::XAveraged => yr,
        }
    }

    /// Evaluates the transverse average `avg` of region `r` at `coordinate`
    /// in stored direction `d`, with an optional derivative.
    fn eval(&self, r: usize, avg: Average, coordinate: f64, d: usize) -> (f64, f64) {
        let [lo, hi] = self.axis_range(r, avg);
        let (s, u) = (coordinate - lo, hi - coordinate);
        let (coef, part) = match avg {
            Average::YAveraged => (BLOCK_A, BLOCK_Z),
            Average::XAveraged => (BLOCK_B, BLOCK_W),
        };
        let ax = self.bases[r].axis(avg);
        let half = ax.ordering.half();
        let pos = ax.ordering.position(d);
        let (plus, i) = if pos < half { (true, pos) } else { (false, pos - half) };
        let mut value = self.coeff(r, part, d);
        let mut slope = 0.0;
        for j in 0..half {
            let nu = ax.nu[j];
            let (ea, eb) = ((-s / nu).exp(), (-u / nu).exp());
            let (fa, fb) = if plus {
                (ax.phi_plus[j][i], ax.phi_minus[j][i])
            } else {
                (ax.phi_minus[j][i], ax.phi_plus[j][i])
            };
            let ca = self.coeff(r, coef, j) * fa;
            let cb = self.coeff(r, coef, j + half) * fb;
            value += ca * ea + cb * eb;
            slope += (-ca * ea + cb * eb) / nu;
        }
        (value, slope)
    }

    /// `I_y(x, Ω_d)` or `I_x(y, Ω_d)` in region `r`.
    pub fn average_intensity(&self, r: usize, avg: Average, coordinate: f64, d: usize) -> Result<f64> {
        let [lo, hi] = self.axis_range(r, avg);
        if !(lo..=hi).contains(&coordinate) {
            return Err(AdoError::Domain {
                value: coordinate,
                lo,
                hi,
            });
        }
        if d >= self.m() {
            return Err(AdoError::InvalidProblem(format!("direction {d} out of range")));
        }
        Ok(self.eval(r, avg, coordinate, d).0)
    }

    /// Region average of the intensity in direction `d` from one
    /// representation.
    pub fn region_average(&self, r: usize, avg: Average, d: usize) -> f64 {
        let [lo, hi] = self.axis_range(r, avg);
        let len = hi - lo;
        let (coef, part) = match avg {
            Average::YAveraged => (BLOCK_A, BLOCK_Z),
            Average::XAveraged => (BLOCK_B, BLOCK_W),
        };
        let ax = self.bases[r].axis(avg);
        let half = ax.ordering.half();
        let pos = ax.ordering.position(d);
        let (plus, i) = if pos < half { (true, pos) } else { (false, pos - half) };
        let mut acc = self.coeff(r, part, d);
        for j in 0..half {
            let nu = ax.nu[j];
            let mean = -nu * (-len / nu).exp_m1() / len;
            let (fa, fb) = if plus {
                (ax.phi_plus[j][i], ax.phi_minus[j][i])
            } else {
                (ax.phi_minus[j][i], ax.phi_plus[j][i])
            };
            acc += (self.coeff(r, coef, j) * fa + self.coeff(r, coef, j + half) * fb) * mean;
        }
        acc
    }

    fn weighted_average(&self, r: usize, avg: Average) -> f64 {
        let dirs = self.problem.quad.directions();
        let total: f64 = dirs.iter().map(|d| d.weight).sum();
        (0..dirs.len())
            .map(|d| dirs[d].weight * self.region_average(r, avg, d))
            .sum::<f64>()
            / total
    }

    /// Weight-normalized region-averaged scalar flux. Fails if the two
    /// transverse representations disagree beyond `1e-6` relative.
    pub fn region_scalar_flux(&self, r: usize) -> Result<f64> {
        let fy = self.weighted_average(r, Average::YAveraged);
        let fx = self.weighted_average(r, Average::XAveraged);
        let scale = fx.abs().max(fy.abs());
        if (fx - fy).abs() > CONSISTENCY_TOL * scale.max(1e-300) && (fx - fy).abs() > 1e-14 {
            return Err(AdoError::Consistency(format!(
                "region {r}: y-averaged flux {fy} vs x-averaged flux {fx}"
            )));
        }
        Ok(0.5 * (fx + fy))
    }

    pub fn scalar_fluxes(&self) -> Result<Vec<f64>> {
        (0..self.problem.regions())
            .map(|r| self.region_scalar_flux(r))
            .collect()
    }

    /// Edge value of the transverse average: `I_y` at `x = x_{h-1}` or
    /// `x_h` (`C` constants), `I_x` at `y = y_{k-1}` or `y_k` (`D`).
    pub fn edge_value(&self, r: usize, avg: Average, at_end: bool, d: usize) -> f64 {
        let [lo, hi] = self.axis_range(r, avg);
        self.eval(r, avg, if at_end { hi } else { lo }, d).0
    }

    /// Relative particle-balance defect of region `r`:
    /// source − removal − net leakage over source scale.
    pub fn balance_residual(&self, r: usize) -> f64 {
        let p = &self.problem;
        let dirs = p.quad.directions();
        let mat = p.material(r);
        let kern = &self.kernels[p.region_material[r]];
        let (xr, yr) = p.region_extent(r);
        let (dx, dy) = (xr[1] - xr[0], yr[1] - yr[0]);
        let m = dirs.len();
        let avg: Vec<f64> = (0..m)
            .map(|d| self.region_average(r, Average::YAveraged, d))
            .collect();
        let src = p.region_source[r];
        let (mut source, mut removal, mut leak) = (0.0, 0.0, 0.0);
        for d in 0..m {
            let w = dirs[d].weight;
            let scattered: f64 = (0..m).map(|n| kern[(d, n)] * avg[n]).sum();
            source += w * src;
            removal += w * (mat.sigma_t * avg[d] - scattered);
            let lx = dirs[d].mu / dx
                * (self.edge_value(r, Average::YAveraged, true, d)
                    - self.edge_value(r, Average::YAveraged, false, d));
            let ly = dirs[d].eta / dy
                * (self.edge_value(r, Average::XAveraged, true, d)
                    - self.edge_value(r, Average::XAveraged, false, d));
            leak += w * (lx + ly);
        }
        let scale = source.abs().max(removal.abs()).max(leak.abs()).max(1e-300);
        (source - removal - leak).abs() / scale
    }

    /// Largest residual of the transverse-integrated equations at three
    /// points per region, axis and direction, relative to the largest
    /// source or intensity magnitude.
    pub fn ode_residual(&self) -> f64 {
        let p = &self.problem;
        let dirs = p.quad.directions();
        let m = dirs.len();
        let mut worst = 0.0f64;
        let mut scale = p.region_source.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for r in 0..p.regions() {
            let mat = p.material(r);
            let kern = &self.kernels[p.region_material[r]];
            let (xr, yr) = p.region_extent(r);
            for avg in [Average::YAveraged, Average::XAveraged] {
                let (range, other, other_avg) = match avg {
                    Average::YAveraged => (xr, yr, Average::XAveraged),
                    Average::XAveraged => (yr, xr, Average::YAveraged),
                };
                let leak: Vec<f64> = (0..m)
                    .map(|d| {
                        let c = other_avg.cosine(&dirs[d]);
                        c / (other[1] - other[0])
                            * (self.edge_value(r, other_avg, true, d)
                                - self.edge_value(r, other_avg, false, d))
                    })
                    .collect();
                for frac in [0.1, 0.5, 0.9] {
                    let at = range[0] + frac * (range[1] - range[0]);
                    let vals: Vec<(f64, f64)> = (0..m).map(|d| self.eval(r, avg, at, d)).collect();
                    for d in 0..m {
                        let scattered: f64 = (0..m).map(|n| kern[(d, n)] * vals[n].0).sum();
                        let res = avg.cosine(&dirs[d]) * vals[d].1 + mat.sigma_t * vals[d].0
                            - scattered
                            - (p.region_source[r] - leak[d]);
                        worst = worst.max(res.abs());
                        scale = scale.max(vals[d].0.abs());
                    }
                }
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}
