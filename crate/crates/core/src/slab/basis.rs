use nalgebra::{DMatrix, DVector};

use super::problem::SlabProblem;
use crate::error::{AdoError, Result};
use crate::linalg::{normalize_max, pair_eigen};
use crate::scattering::legendre_all;

/// Eigenvalues of `BA` below this fraction of the largest are treated as the
/// `ν → ∞` mode of a conservative medium.
pub const DEGENERATE_THRESHOLD: f64 = 1e-12;

const CLUSTER_GAP: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

/// One pair of elementary solutions `Φ±(ν) e^{−τ/ν}` and `Φ∓(ν) e^{τ/ν}`.
#[derive(Debug, Clone)]
pub struct Mode {
    pub nu: f64,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    /// `N(ν) = Σ w μ (φ₊² − φ₋²)`
    pub norm: f64,
    /// `Φ₀(ν) = Σ w (φ₊ + φ₋)`
    pub phi0: f64,
}

/// Replacement pair for the vanishing eigenvalue of a conservative medium:
/// `I± = c` and `I± = (τ − τ_a) c ± v`.
#[derive(Debug, Clone)]
pub struct DegenerateMode {
    pub c: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub(crate) mu: Vec<f64>,
    pub(crate) w: Vec<f64>,
    /// Regular modes, `ν` descending.
    pub(crate) modes: Vec<Mode>,
    pub(crate) degenerate: Option<DegenerateMode>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SpectralBasis {
    /// Number of separation constants, equal to the half-range order.
    pub fn dimension(&self) -> usize {
        self.modes.len() + usize::from(self.degenerate.is_some())
    }

    /// Separation constants, descending; the degenerate mode reports `∞`.
    pub fn separation_constants(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dimension());
        if self.degenerate.is_some() {
            out.push(f64::INFINITY);
        }
        out.extend(self.modes.iter().map(|m| m.nu));
        out
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn degenerate(&self) -> Option<&DegenerateMode> {
        self.degenerate.as_ref()
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Largest `‖(BA)X − X/ν²‖ / ‖X‖` over the regular modes, with
    /// `X = M(Φ₊ + Φ₋)`.
    pub fn eigen_residual(&self) -> f64 {
        let ba = &self.b * &self.a;
        self.modes
            .iter()
            .map(|m| {
                let x = DVector::from_iterator(
                    self.mu.len(),
                    (0..self.mu.len()).map(|k| self.mu[k] * (m.phi_plus[k] + m.phi_minus[k])),
                );
                (&ba * &x - &x / (m.nu * m.nu)).norm() / x.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Even and odd parts of the scattering operator on the half-range nodes:
/// `K_e = ϖ Σ_{l even} β_l Π_l Π_lᵀ W`, `K_o` likewise over odd `l`.
fn scattering_parts(p: &SlabProblem) -> (DMatrix<f64>, DMatrix<f64>) {
    let mu = p.quad.nodes();
    let w = p.quad.weights();
    let n = mu.len();
    let beta = p.phase.coefficients();
    let big_l = beta.len() - 1;
    let pl: Vec<Vec<f64>> = mu.iter().map(|&m| legendre_all(big_l, m)).collect();
    let mut even = DMatrix::zeros(n, n);
    let mut odd = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let (mut e, mut o) = (0.0, 0.0);
            for (l, &b) in beta.iter().enumerate() {
                let t = b * pl[i][l] * pl[k][l];
                if l % 2 == 0 {
                    e += t;
                } else {
                    o += t;
                }
            }
            even[(i, k)] = p.albedo * e * w[k];
            odd[(i, k)] = p.albedo * o * w[k];
        }
    }
    (even, odd)
}

pub fn build_basis(p: &SlabProblem) -> Result<SpectralBasis> {
    p.validate()?;
    let mu = p.quad.nodes().to_vec();
    let w = p.quad.weights().to_vec();
    let n = mu.len();
    let (k_even, k_odd) = scattering_parts(p);
    let id = DMatrix::<f64>::identity(n, n);
    let g_a = &id - k_even;
    let g_b = &id - k_odd;
    let m_inv = DMatrix::from_diagonal(&DVector::from_iterator(n, mu.iter().map(|m| 1.0 / m)));
    let wd = DMatrix::from_diagonal(&DVector::from_column_slice(&w));
    let a = &g_a * &m_inv;
    let b = &g_b * &m_inv;

    // BA = M (E S_B E S_A) M⁻¹ with E = (MW)⁻¹, S_A = W G_A, S_B = W G_B.
    let e = DVector::from_iterator(n, (0..n).map(|k| 1.0 / (mu[k] * w[k])));
    let s_a = symmetric(&wd * &g_a);
    let s_b = symmetric(&wd * &g_b);
    let mut pairs = pair_eigen(&e, &s_b, &s_a, None)?;
    pairs.sort_by(|x, y| x.value.partial_cmp(&y.value).unwrap());
    // streaming scale 1/μ_max² keeps the threshold meaningful when every
    // eigenvalue vanishes
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    let lambda_max = pairs
        .last()
        .map(|q| q.value)
        .unwrap_or(0.0)
        .max(1.0 / (mu_max * mu_max));
    let floor = DEGENERATE_THRESHOLD * lambda_max;

    let mut degenerate = None;
    let mut modes = Vec::with_capacity(n);
    for (idx, pair) in pairs.iter().enumerate() {
        if pair.value < -floor {
            return Err(AdoError::SupercriticalSpectrum {
                value: pair.value,
                region: None,
            });
        }
        if pair.value <= floor {
            if degenerate.is_some() {
                return Err(AdoError::Consistency(
                    "more than one vanishing separation eigenvalue".into(),
                ));
            }
            let mut c = pair.vector.clone();
            normalize_max(&mut c);
            let rhs = DVector::from_iterator(n, (0..n).map(|k| -mu[k] * c[k]));
            let v = g_b.clone().lu().solve(&rhs).ok_or_else(|| {
                AdoError::Consistency("odd scattering operator is singular".into())
            })?;
            degenerate = Some(DegenerateMode {
                c: c.iter().copied().collect(),
                v: v.iter().copied().collect(),
            });
            continue;
        }
        if idx + 1 < pairs.len() {
            let next = pairs[idx + 1].value;
            if (next - pair.value).abs() < CLUSTER_GAP * next.abs() {
                log::warn!(
                    "clustered separation eigenvalues {} and {next}",
                    pair.value
                );
            }
        }
        let nu = 1.0 / pair.value.sqrt();
        let mut x = DVector::from_iterator(n, (0..n).map(|k| mu[k] * pair.vector[k]));
        normalize_max(&mut x);
        let ax = &a * &x;
        let phi_plus: Vec<f64> = (0..n).map(|k| 0.5 * (x[k] + nu * ax[k]) / mu[k]).collect();
        let phi_minus: Vec<f64> = (0..n).map(|k| 0.5 * (x[k] - nu * ax[k]) / mu[k]).collect();
        let norm: f64 = (0..n)
            .map(|k| w[k] * mu[k] * (phi_plus[k].powi(2) - phi_minus[k].powi(2)))
            .sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(AdoError::Consistency(format!(
                "normalization constant vanishes for nu = {nu}"
            )));
        }
        let phi0 = (0..n).map(|k| w[k] * (phi_plus[k] + phi_minus[k])).sum();
        modes.push(Mode {
            nu,
            phi_plus,
            phi_minus,
            norm,
            phi0,
        });
    }
    modes.sort_by(|x, y| y.nu.partial_cmp(&x.nu).unwrap());

    let basis = SpectralBasis {
        mu,
        w,
        modes,
        degenerate,
        a,
        b,
    };
    let residual = basis.eigen_residual();
    if residual > RESIDUAL_TOL * lambda_max {
        return Err(AdoError::Consistency(format!(
            "eigenpair residual {residual:e} too large"
        )));
    }
    Ok(basis)
}

fn symmetric(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}
