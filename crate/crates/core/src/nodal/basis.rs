use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;

use super::ordering::{order_directions, DirectionOrdering, OrderingScheme};
use super::problem::{Material, NodalProblem, PhaseForm};
use crate::error::{AdoError, Result};
use crate::linalg::{normalize_max, pair_eigen};
use crate::quadrature::{Direction, SphereQuadrature};
use crate::scattering::seminormalized_table;

const RESIDUAL_TOL: f64 = 1e-9;

/// Which transverse average a one-dimensional system describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Average {
    /// `I_y(x, Ω)`, averaged over `y`, solved along `x` with the x-scheme.
    YAveraged,
    /// `I_x(y, Ω)`, averaged over `x`, solved along `y` with the y-scheme.
    XAveraged,
}

impl Average {
    pub fn scheme(self) -> OrderingScheme {
        match self {
            Average::YAveraged => OrderingScheme::XScheme,
            Average::XAveraged => OrderingScheme::YScheme,
        }
    }

    /// Direction cosine along the solution variable.
    pub fn cosine(self, d: &Direction) -> f64 {
        match self {
            Average::YAveraged => d.mu,
            Average::XAveraged => d.eta,
        }
    }
}

/// Half-order spectral solution of one transverse-averaged system.
#[derive(Debug, Clone)]
pub struct AxisBasis {
    pub ordering: DirectionOrdering,
    /// Separation constants, descending.
    pub nu: Vec<f64>,
    /// `Φ(ν_j, Ω_i)` on the positive half, indexed `[j][i]`.
    pub phi_plus: Vec<Vec<f64>>,
    /// `Φ(ν_j, Ω_{i+M/2})` on the mirror half.
    pub phi_minus: Vec<Vec<f64>>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl AxisBasis {
    pub fn dimension(&self) -> usize {
        self.nu.len()
    }

    /// Largest `‖(AB)U − U/ν²‖ / ‖U‖`, `U = Φ₊ + Φ₋`.
    pub fn eigen_residual(&self) -> f64 {
        let ab = &self.a * &self.b;
        let n = self.nu.len();
        (0..n)
            .map(|j| {
                let u = DVector::from_iterator(
                    n,
                    (0..n).map(|i| self.phi_plus[j][i] + self.phi_minus[j][i]),
                );
                (&ab * &u - &u / (self.nu[j] * self.nu[j])).norm() / u.norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct RegionBasis {
    pub region: usize,
    pub y_averaged: AxisBasis,
    pub x_averaged: AxisBasis,
}

impl RegionBasis {
    pub fn axis(&self, avg: Average) -> &AxisBasis {
        match avg {
            Average::YAveraged => &self.y_averaged,
            Average::XAveraged => &self.x_averaged,
        }
    }
}

/// Scattering kernel `K[d][n] = σ_s/(4π) w_n [p(Ω_n·Ω_d) + p(Ω̄_n·Ω_d)]`
/// over the stored directions, `Ω̄` the `ξ → −ξ` mirror.
pub fn scattering_kernel(mat: &Material, q: &SphereQuadrature, form: PhaseForm) -> DMatrix<f64> {
    let dirs = q.directions();
    let m = dirs.len();
    let mut k = DMatrix::zeros(m, m);
    if mat.sigma_s == 0.0 {
        return k;
    }
    match form {
        PhaseForm::Exact => {
            for d in 0..m {
                for n in 0..m {
                    let p = mat.phase.eval(dirs[n].dot(&dirs[d]))
                        + mat.phase.eval(dirs[n].lower_mirror().dot(&dirs[d]));
                    k[(d, n)] = mat.sigma_s / (4.0 * PI) * dirs[n].weight * p;
                }
            }
        }
        PhaseForm::Expanded => {
            let ex = Expansion::new(mat, dirs);
            for d in 0..m {
                for n in 0..m {
                    let s = ex.sum(d, n, |p, a, b| (p as f64 * (a - b)).cos());
                    k[(d, n)] = mat.sigma_s / (2.0 * PI) * dirs[n].weight * s;
                }
            }
        }
    }
    k
}

/// Associated-Legendre data for the expanded kernel.
struct Expansion<'a> {
    coeffs: &'a [f64],
    /// seminormalized `P_l^p(ξ)` per direction, `[dir][p][l]`
    tables: Vec<Vec<Vec<f64>>>,
    azimuth: Vec<f64>,
}

impl<'a> Expansion<'a> {
    fn new(mat: &'a Material, dirs: &[Direction]) -> Self {
        let l_max = mat.phase.order();
        Self {
            coeffs: mat.phase.coefficients(),
            tables: dirs.iter().map(|d| seminormalized_table(l_max, d.xi)).collect(),
            azimuth: dirs.iter().map(|d| d.eta.atan2(d.mu)).collect(),
        }
    }

    /// `Σ_l Σ_{p ≤ l, l+p even} (2 − δ_{0p}) C_l^p P_l^p(ξ_d) P_l^p(ξ_n) sel(p, φ_n, φ_d)`
    fn sum(&self, d: usize, n: usize, sel: impl Fn(usize, f64, f64) -> f64) -> f64 {
        let (td, tn) = (&self.tables[d], &self.tables[n]);
        let mut acc = 0.0;
        for (l, &c) in self.coeffs.iter().enumerate() {
            for p in (l % 2..=l).step_by(2) {
                let factor = if p == 0 { 1.0 } else { 2.0 };
                acc += factor
                    * c
                    * td[p][l]
                    * tn[p][l]
                    * sel(p, self.azimuth[n], self.azimuth[d]);
            }
        }
        acc
    }
}

/// `(A, B)` for one transverse average, built from the exact phase function
/// or its expansion.
pub fn axis_matrices(
    mat: &Material,
    q: &SphereQuadrature,
    ordering: &DirectionOrdering,
    avg: Average,
    form: PhaseForm,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let dirs = q.directions();
    let half = ordering.half();
    let beta = mat.sigma_t;
    let mut a = DMatrix::zeros(half, half);
    let mut b = DMatrix::zeros(half, half);
    let cos_i = |i: usize| avg.cosine(&dirs[ordering.plus(i)]);
    match form {
        PhaseForm::Exact => {
            let p = |x: &Direction, y: &Direction| mat.phase.eval(x.dot(y));
            for i in 0..half {
                let (oi, oim) = (dirs[ordering.plus(i)], dirs[ordering.minus(i)]);
                for j in 0..half {
                    let oj = dirs[ordering.plus(j)];
                    let ojl = oj.lower_mirror();
                    let scale = mat.sigma_s / (4.0 * PI * cos_i(i)) * oj.weight;
                    a[(i, j)] = scale * (p(&oj, &oi) - p(&oj, &oim) + p(&ojl, &oi) - p(&ojl, &oim));
                    b[(i, j)] = scale * (p(&oj, &oi) + p(&oj, &oim) + p(&ojl, &oi) + p(&ojl, &oim));
                }
            }
        }
        PhaseForm::Expanded => {
            let ex = Expansion::new(mat, dirs);
            // Mirror pairing fixes the azimuthal selectors: the x-scheme maps
            // φ → π − φ, the y-scheme φ → −φ.
            let (zeta, gamma): (fn(usize, f64, f64) -> f64, fn(usize, f64, f64) -> f64) =
                match avg {
                    Average::YAveraged => (
                        |p, fj, fi| {
                            let pf = p as f64;
                            if p % 2 == 0 {
                                (pf * fj).sin() * (pf * fi).sin()
                            } else {
                                (pf * fj).cos() * (pf * fi).cos()
                            }
                        },
                        |p, fj, fi| {
                            let pf = p as f64;
                            if p % 2 == 0 {
                                (pf * fj).cos() * (pf * fi).cos()
                            } else {
                                (pf * fj).sin() * (pf * fi).sin()
                            }
                        },
                    ),
                    Average::XAveraged => (
                        |p, fj, fi| (p as f64 * fj).sin() * (p as f64 * fi).sin(),
                        |p, fj, fi| (p as f64 * fj).cos() * (p as f64 * fi).cos(),
                    ),
                };
            for i in 0..half {
                let di = ordering.plus(i);
                for j in 0..half {
                    let dj = ordering.plus(j);
                    let scale = mat.sigma_s / (PI * cos_i(i)) * dirs[dj].weight;
                    if mat.sigma_s != 0.0 {
                        a[(i, j)] = scale * ex.sum(di, dj, zeta);
                        b[(i, j)] = scale * ex.sum(di, dj, gamma);
                    }
                }
            }
        }
    }
    for i in 0..half {
        a[(i, i)] -= beta / cos_i(i);
        b[(i, i)] -= beta / cos_i(i);
    }
    (a, b)
}

fn build_axis(
    mat: &Material,
    q: &SphereQuadrature,
    avg: Average,
    form: PhaseForm,
    region: usize,
) -> Result<AxisBasis> {
    let ordering = order_directions(q, avg.scheme())?;
    let (a, b) = axis_matrices(mat, q, &ordering, avg, form);
    let half = ordering.half();
    let dirs = q.directions();
    let c: Vec<f64> = (0..half).map(|i| avg.cosine(&dirs[ordering.plus(i)])).collect();
    let w: Vec<f64> = (0..half).map(|i| dirs[ordering.plus(i)].weight).collect();

    // W (AB) W⁻¹ = E S₋ E S₊ with E = W M⁻¹ and S± = M (A or B) W⁻¹.
    let e = DVector::from_iterator(half, (0..half).map(|i| w[i] / c[i]));
    let sym = |m: &DMatrix<f64>| {
        let s = DMatrix::from_fn(half, half, |i, j| c[i] * m[(i, j)] / w[j]);
        (&s + s.transpose()) * 0.5
    };
    let mut pairs = pair_eigen(&e, &sym(&a), &sym(&b), Some(region))?;
    pairs.sort_by(|x, y| x.value.partial_cmp(&y.value).unwrap());
    let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = (mat.sigma_t / c_min).powi(2);
    let mut nu = Vec::with_capacity(half);
    let mut phi_plus = Vec::with_capacity(half);
    let mut phi_minus = Vec::with_capacity(half);
    for pair in &pairs {
        if pair.value <= 1e-12 * scale {
            if pair.value >= -1e-12 * scale {
                return Err(AdoError::InvalidProblem(format!(
                    "region {region} is conservative (sigma_s = sigma_t); the nodal solver needs absorption"
                )));
            }
            return Err(AdoError::SupercriticalSpectrum {
                value: pair.value,
                region: Some(region),
            });
        }
        let v = 1.0 / pair.value.sqrt();
        let mut u = DVector::from_iterator(half, (0..half).map(|i| pair.vector[i] / w[i]));
        normalize_max(&mut u);
        let bu = &b * &u;
        phi_plus.push((0..half).map(|i| 0.5 * (u[i] - v * bu[i])).collect());
        phi_minus.push((0..half).map(|i| 0.5 * (u[i] + v * bu[i])).collect());
        nu.push(v);
    }
    let basis = AxisBasis {
        ordering,
        nu,
        phi_plus,
        phi_minus,
        a,
        b,
    };
    let residual = basis.eigen_residual();
    if residual > RESIDUAL_TOL * scale.max(1.0) {
        return Err(AdoError::Consistency(format!(
            "region {region} eigenpair residual {residual:e} too large"
        )));
    }
    Ok(basis)
}

pub fn build_region_basis(p: &NodalProblem, r: usize) -> Result<RegionBasis> {
    let mat = p.material(r);
    Ok(RegionBasis {
        region: r,
        y_averaged: build_axis(mat, &p.quad, Average::YAveraged, p.phase_form, r)?,
        x_averaged: build_axis(mat, &p.quad, Average::XAveraged, p.phase_form, r)?,
    })
}

/// Bases for every region, built in parallel.
pub fn build_all_bases(p: &NodalProblem) -> Result<Vec<RegionBasis>> {
    (0..p.regions())
        .into_par_iter()
        .map(|r| build_region_basis(p, r))
        .collect()
}
