use nalgebra::{DMatrix, DVector};

use super::basis::{build_basis, SpectralBasis};
use super::problem::SlabProblem;
use crate::error::{AdoError, Result};
use crate::linalg::solve_checked;

const BOUNDARY_TOL: f64 = 1e-9;

/// `E_n(t) = ∫₀ᵗ sⁿ e^{−(t−s)/ν} ds` for `n = 0..len`.
pub(crate) fn exp_moments(len: usize, t: f64, nu: f64) -> Vec<f64> {
    let mut out = vec![0.0; len];
    if len == 0 || t <= 0.0 {
        return out;
    }
    let x = t / nu;
    if x >= 1.0 {
        out[0] = -nu * (-x).exp_m1();
        for n in 1..len {
            out[n] = nu * t.powi(n as i32) - n as f64 * nu * out[n - 1];
        }
    } else {
        let mut fact_n = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                fact_n *= n as f64;
            }
            // Σ_m (−x)^m / (n+m+1)!
            let mut term = 1.0 / (1..=n + 1).map(|v| v as f64).product::<f64>();
            let mut sum = term;
            for m in 1..60 {
                term *= -x / (n + m + 1) as f64;
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            *slot = t.powi(n as i32 + 1) * fact_n * sum;
        }
    }
    out
}

/// Coefficients of `p(L − u)` in powers of `u`.
fn reflect_polynomial(c: &[f64], length: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    for (n, &cn) in c.iter().enumerate() {
        let mut binom = 1.0;
        for (m, slot) in out.iter_mut().enumerate().take(n + 1) {
            if m > 0 {
                binom = binom * (n + 1 - m) as f64 / m as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            *slot += cn * binom * sign * length.powi((n - m) as i32);
        }
    }
    out
}

/// Closed-form Green's-function particular solution for polynomial sources.
#[derive(Debug, Clone)]
struct Particular {
    /// Projections of the source onto each mode, in powers of `τ − τ_a`.
    forward: Vec<Vec<f64>>,
    /// Same projections in powers of `τ_b − τ`.
    backward: Vec<Vec<f64>>,
}

impl Particular {
    fn new(p: &SlabProblem, basis: &SpectralBasis) -> Result<Option<Self>> {
        if p.source.is_zero() {
            return Ok(None);
        }
        if basis.degenerate.is_some() {
            return Err(AdoError::UnsupportedSource(
                "internal sources in a conservative medium (albedo 1)".into(),
            ));
        }
        let n = basis.mu.len();
        let (qp, qm) = p.source.per_node(n)?;
        let len = qp.iter().chain(&qm).map(Vec::len).max().unwrap_or(0);
        let coeff = |q: &[Vec<f64>], k: usize, d: usize| q[k].get(d).copied().unwrap_or(0.0);
        let mut forward = Vec::with_capacity(basis.modes.len());
        let mut backward = Vec::with_capacity(basis.modes.len());
        for mode in &basis.modes {
            let mut g = vec![0.0; len];
            let mut h = vec![0.0; len];
            for d in 0..len {
                for k in 0..n {
                    let (a, b) = (coeff(&qp, k, d), coeff(&qm, k, d));
                    g[d] += basis.w[k] * (a * mode.phi_plus[k] + b * mode.phi_minus[k]);
                    h[d] += basis.w[k] * (a * mode.phi_minus[k] + b * mode.phi_plus[k]);
                }
                g[d] /= mode.norm;
                h[d] /= mode.norm;
            }
            forward.push(g);
            backward.push(reflect_polynomial(&h, p.thickness()));
        }
        Ok(Some(Self { forward, backward }))
    }

    /// `(A_j(τ), B_j(τ))` for every regular mode.
    fn amplitudes(&self, basis: &SpectralBasis, s: f64, u: f64) -> Vec<(f64, f64)> {
        basis
            .modes
            .iter()
            .enumerate()
            .map(|(j, mode)| {
                let f = &self.forward[j];
                let b = &self.backward[j];
                let ef = exp_moments(f.len(), s, mode.nu);
                let eb = exp_moments(b.len(), u, mode.nu);
                (
                    f.iter().zip(&ef).map(|(c, e)| c * e).sum(),
                    b.iter().zip(&eb).map(|(c, e)| c * e).sum(),
                )
            })
            .collect()
    }
}

/// Solved slab problem.
#[derive(Debug, Clone)]
pub struct SlabSolution {
    problem: SlabProblem,
    basis: SpectralBasis,
    coefficients: DVector<f64>,
    particular: Option<Particular>,
    condition: f64,
    boundary_residual: f64,
}

pub fn solve(p: &SlabProblem) -> Result<SlabSolution> {
    let basis = build_basis(p)?;
    solve_with_basis(p, basis)
}

pub fn solve_with_basis(p: &SlabProblem, basis: SpectralBasis) -> Result<SlabSolution> {
    let particular = Particular::new(p, &basis)?;
    let n = basis.mu.len();
    let f1 = p.f1.values(&p.quad)?;
    let f2 = p.f2.values(&p.quad)?;
    let mut sol = SlabSolution {
        problem: p.clone(),
        basis,
        coefficients: DVector::zeros(2 * n),
        particular,
        condition: 1.0,
        boundary_residual: 0.0,
    };
    let (pa, ma) = sol.columns(p.tau_a);
    let (pb, mb) = sol.columns(p.tau_b);
    let (ipa, ima) = sol.particular_at(p.tau_a);
    let (ipb, imb) = sol.particular_at(p.tau_b);
    let wmu: Vec<f64> = (0..n).map(|k| sol.basis.w[k] * sol.basis.mu[k]).collect();

    let mut system = DMatrix::zeros(2 * n, 2 * n);
    let mut rhs = DVector::zeros(2 * n);
    let (l, r) = (p.left, p.right);
    for col in 0..2 * n {
        let diff_a: f64 = (0..n).map(|k| wmu[k] * ma[(k, col)]).sum();
        let diff_b: f64 = (0..n).map(|k| wmu[k] * pb[(k, col)]).sum();
        for i in 0..n {
            system[(i, col)] = pa[(i, col)] - l.specular * ma[(i, col)] - 2.0 * l.diffuse * diff_a;
            system[(n + i, col)] =
                mb[(i, col)] - r.specular * pb[(i, col)] - 2.0 * r.diffuse * diff_b;
        }
    }
    let diff_pa: f64 = (0..n).map(|k| wmu[k] * ima[k]).sum();
    let diff_pb: f64 = (0..n).map(|k| wmu[k] * ipb[k]).sum();
    for i in 0..n {
        rhs[i] = f1[i] - ipa[i] + l.specular * ima[i] + 2.0 * l.diffuse * diff_pa;
        rhs[n + i] = f2[i] - imb[i] + r.specular * ipb[i] + 2.0 * r.diffuse * diff_pb;
    }
    let hint = if p.is_conservative_mirror() {
        "conservative medium (albedo 1) between perfectly reflecting faces has no unique solution"
    } else {
        "boundary system is ill-conditioned"
    };
    let (x, condition) = solve_checked(system, &rhs, hint)?;
    sol.coefficients = x;
    sol.condition = condition;

    let scale = f1
        .iter()
        .chain(&f2)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    sol.boundary_residual = sol.compute_boundary_residual(&f1, &f2) / scale;
    if sol.boundary_residual > BOUNDARY_TOL {
        return Err(AdoError::Consistency(format!(
            "boundary residual {:e} exceeds {BOUNDARY_TOL:e}",
            sol.boundary_residual
        )));
    }
    Ok(sol)
}

impl SlabSolution {
    pub fn problem(&self) -> &SlabProblem {
        &self.problem
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    /// Coefficients of the modes decaying away from `τ_a`.
    pub fn coefficients_a(&self) -> &[f64] {
        let n = self.basis.mu.len();
        &self.coefficients.as_slice()[..n]
    }

    /// Coefficients of the modes decaying away from `τ_b`.
    pub fn coefficients_b(&self) -> &[f64] {
        let n = self.basis.mu.len();
        &self.coefficients.as_slice()[n..]
    }

    /// 1-norm condition estimate of the boundary system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Max-norm residual of the boundary conditions, relative to the
    /// largest incident value (or 1).
    pub fn boundary_residual(&self) -> f64 {
        self.boundary_residual
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        let (lo, hi) = (self.problem.tau_a, self.problem.tau_b);
        if !(lo..=hi).contains(&tau) {
            return Err(AdoError::Domain { value: tau, lo, hi });
        }
        Ok(())
    }

    /// Homogeneous solution columns at `τ` for the `+μ` and `−μ` nodes.
    fn columns(&self, tau: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let b = &self.basis;
        let n = b.mu.len();
        let s = tau - self.problem.tau_a;
        let u = self.problem.tau_b - tau;
        let mut plus = DMatrix::zeros(n, 2 * n);
        let mut minus = DMatrix::zeros(n, 2 * n);
        let mut col = 0;
        if let Some(d) = &b.degenerate {
            for k in 0..n {
                plus[(k, 0)] = d.c[k];
                minus[(k, 0)] = d.c[k];
                plus[(k, n)] = s * d.c[k] + d.v[k];
                minus[(k, n)] = s * d.c[k] - d.v[k];
            }
            col = 1;
        }
        for mode in &b.modes {
            let ea = (-s / mode.nu).exp();
            let eb = (-u / mode.nu).exp();
            for k in 0..n {
                plus[(k, col)] = mode.phi_plus[k] * ea;
                minus[(k, col)] = mode.phi_minus[k] * ea;
                plus[(k, n + col)] = mode.phi_minus[k] * eb;
                minus[(k, n + col)] = mode.phi_plus[k] * eb;
            }
            col += 1;
        }
        (plus, minus)
    }

    fn particular_at(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.basis.mu.len();
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        if let Some(part) = &self.particular {
            let amps = part.amplitudes(
                &self.basis,
                tau - self.problem.tau_a,
                self.problem.tau_b - tau,
            );
            for (mode, (a, b)) in self.basis.modes.iter().zip(amps) {
                for k in 0..n {
                    plus[k] += a * mode.phi_plus[k] + b * mode.phi_minus[k];
                    minus[k] += a * mode.phi_minus[k] + b * mode.phi_plus[k];
                }
            }
        }
        (plus, minus)
    }

    /// Particular solution `(I^p(τ, μ_k), I^p(τ, −μ_k))`.
    pub fn particular(&self, tau: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_tau(tau)?;
        Ok(self.particular_at(tau))
    }

    fn intensities_unchecked(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        let (cp, cm) = self.columns(tau);
        let hp = &cp * &self.coefficients;
        let hm = &cm * &self.coefficients;
        let (mut ip, mut im) = self.particular_at(tau);
        for k in 0..ip.len() {
            ip[k] += hp[k];
            im[k] += hm[k];
        }
        (ip, im)
    }

    /// `(I(τ, μ_k), I(τ, −μ_k))` at all nodes.
    pub fn intensities(&self, tau: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_tau(tau)?;
        Ok(self.intensities_unchecked(tau))
    }

    /// Intensity at a signed node direction `mu = ±μ_k`.
    pub fn intensity(&self, tau: f64, mu: f64) -> Result<f64> {
        self.check_tau(tau)?;
        let k = self
            .problem
            .quad
            .node_index(mu.abs())
            .ok_or(AdoError::UnsupportedDirection(mu))?;
        let (ip, im) = self.intensities_unchecked(tau);
        Ok(if mu > 0.0 { ip[k] } else { im[k] })
    }

    /// `ρ(τ) = Σ_k w_k [I(τ, μ_k) + I(τ, −μ_k)]`, assembled mode by mode
    /// through `Φ₀(ν_j)`.
    pub fn density(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        let b = &self.basis;
        let n = b.mu.len();
        let s = tau - self.problem.tau_a;
        let u = self.problem.tau_b - tau;
        let offset = usize::from(b.degenerate.is_some());
        let amps = match &self.particular {
            Some(p) => p.amplitudes(b, s, u),
            None => vec![(0.0, 0.0); b.modes.len()],
        };
        let mut rho = 0.0;
        if let Some(d) = &b.degenerate {
            let c0: f64 = (0..n).map(|k| b.w[k] * d.c[k]).sum();
            rho += 2.0 * c0 * (self.coefficients[0] + s * self.coefficients[n]);
        }
        for (j, mode) in b.modes.iter().enumerate() {
            let a = self.coefficients[offset + j];
            let bb = self.coefficients[n + offset + j];
            let (pa, pb) = amps[j];
            rho += (a * (-s / mode.nu).exp() + bb * (-u / mode.nu).exp() + pa + pb) * mode.phi0;
        }
        Ok(rho)
    }

    /// `J(τ) = Σ_k w_k μ_k [I(τ, μ_k) − I(τ, −μ_k)]`.
    pub fn net_current(&self, tau: f64) -> Result<f64> {
        let (ip, im) = self.intensities(tau)?;
        let b = &self.basis;
        Ok((0..ip.len()).map(|k| b.w[k] * b.mu[k] * (ip[k] - im[k])).sum())
    }

    fn compute_boundary_residual(&self, f1: &[f64], f2: &[f64]) -> f64 {
        let p = &self.problem;
        let b = &self.basis;
        let n = b.mu.len();
        let wmu = |v: &[f64]| -> f64 { (0..n).map(|k| b.w[k] * b.mu[k] * v[k]).sum() };
        let (pa, ma) = self.intensities_unchecked(p.tau_a);
        let (pb, mb) = self.intensities_unchecked(p.tau_b);
        let (da, db) = (wmu(&ma), wmu(&pb));
        let mut worst = 0.0f64;
        for i in 0..n {
            let ra = pa[i] - p.left.specular * ma[i] - 2.0 * p.left.diffuse * da - f1[i];
            let rb = mb[i] - p.right.specular * pb[i] - 2.0 * p.right.diffuse * db - f2[i];
            worst = worst.max(ra.abs()).max(rb.abs());
        }
        worst
    }
}
