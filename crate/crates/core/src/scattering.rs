//! Scattering laws: Legendre-expanded phase functions and Henyey-Greenstein.
//!
//! Phase functions are normalized so that `(1/4π) ∫ p dΩ = 1`, i.e. `C_0 = 1`.
//! Associated Legendre functions carry the Condon-Shortley factor `(-1)^k`.
//! It appears squared in the addition theorem, so it cancels there; the
//! semi-normalized table below keeps it anyway so that both factors always
//! come from the same convention.

use crate::error::{AdoError, Result};

/// Legendre polynomials `P_0(x) .. P_l_max(x)`.
pub fn legendre_all(l_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(l_max + 1);
    p.push(1.0);
    if l_max >= 1 {
        p.push(x);
    }
    for l in 1..l_max {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_all(l, x)[l]
}

/// Associated Legendre function `P_l^k(x)` with the Condon-Shortley phase,
/// by upward recurrence in `l` at fixed `k`.
pub fn associated_legendre(l: usize, k: usize, x: f64) -> f64 {
    if k > l {
        return 0.0;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_k^k = (-1)^k (2k-1)!! s^k
    let mut pkk = 1.0;
    for m in 1..=k {
        pkk *= -((2 * m - 1) as f64) * s;
    }
    if l == k {
        return pkk;
    }
    let mut prev = pkk;
    let mut cur = x * (2 * k + 1) as f64 * pkk;
    for ll in (k + 1)..l {
        let next = ((2 * ll + 1) as f64 * x * cur - (ll + k) as f64 * prev) / (ll + 1 - k) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Semi-normalized table `t[k][l] = sqrt((l-k)!/(l+k)!) P_l^k(x)` for
/// `0 ≤ k ≤ l ≤ l_max` (entries with `l < k` are zero).
pub fn seminormalized_table(l_max: usize, x: f64) -> Vec<Vec<f64>> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut table = vec![vec![0.0; l_max + 1]; l_max + 1];
    let mut diag = 1.0;
    for k in 0..=l_max {
        if k > 0 {
            let kf = k as f64;
            diag *= -((2.0 * kf - 1.0) / (2.0 * kf)).sqrt() * s;
        }
        let row = &mut table[k];
        row[k] = diag;
        if k < l_max {
            row[k + 1] = x * ((2 * k + 1) as f64).sqrt() * diag;
        }
        for l in (k + 1)..l_max {
            let a = ((l + k) as f64 * (l - k) as f64).sqrt();
            let b = ((l + 1 + k) as f64 * (l + 1 - k) as f64).sqrt();
            row[l + 1] = ((2 * l + 1) as f64 * x * row[l] - a * row[l - 1]) / b;
        }
    }
    table
}

/// Scattering law `p(cos Θ) = Σ_{l=0}^{L} C_l P_l(cos Θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    coeffs: Vec<f64>,
    asymmetry: Option<f64>,
}

impl PhaseFunction {
    pub fn isotropic() -> Self {
        Self {
            coeffs: vec![1.0],
            asymmetry: Some(0.0),
        }
    }

    /// Builds a law from raw coefficients; `C_0` must equal 1.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if (c0 - 1.0).abs() <= 1e-12 => {}
            _ => {
                return Err(AdoError::InvalidProblem(
                    "phase function coefficients must start with C_0 = 1".into(),
                ))
            }
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(AdoError::InvalidProblem(
                "phase function coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            coeffs,
            asymmetry: None,
        })
    }

    /// Henyey-Greenstein expansion truncated at order `l_max`.
    pub fn henyey_greenstein(g: f64, l_max: usize) -> Result<Self> {
        hg_coefficients(g, l_max)
    }

    /// Degree of anisotropy `L`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Asymmetry factor, when the law was built from one.
    pub fn asymmetry(&self) -> Option<f64> {
        self.asymmetry
    }

    pub fn is_isotropic(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    /// `Σ C_l P_l(cos Θ)`.
    pub fn eval(&self, cos_theta: f64) -> f64 {
        // Clenshaw would also do; the forward recurrence is stable here.
        let p = legendre_all(self.order(), cos_theta);
        self.coeffs.iter().zip(&p).map(|(c, p)| c * p).sum()
    }

    /// Two-angle form through the addition theorem. Directions are unit
    /// vectors `(mu, eta, xi)` with `xi` the polar axis.
    pub fn eval_two_angle(&self, from: [f64; 3], to: [f64; 3]) -> f64 {
        let l_max = self.order();
        let t_from = seminormalized_table(l_max, from[2]);
        let t_to = seminormalized_table(l_max, to[2]);
        let s_from = (from[0] * from[0] + from[1] * from[1]).sqrt();
        let s_to = (to[0] * to[0] + to[1] * to[1]).sqrt();
        let cos_dphi = if s_from > 0.0 && s_to > 0.0 {
            ((from[0] * to[0] + from[1] * to[1]) / (s_from * s_to)).clamp(-1.0, 1.0)
        } else {
            1.0
        };
        let mut total = 0.0;
        // cos(kΔφ) by the Chebyshev recurrence
        let (mut c_prev, mut c_k) = (cos_dphi, 1.0);
        for k in 0..=l_max {
            let factor = if k == 0 { 1.0 } else { 2.0 };
            let inner: f64 = (k..=l_max)
                .map(|l| self.coeffs[l] * t_from[k][l] * t_to[k][l])
                .sum();
            total += factor * inner * c_k;
            let next = 2.0 * cos_dphi * c_k - c_prev;
            c_prev = c_k;
            c_k = next;
        }
        total
    }
}

/// `C_l = (2l + 1) g^l`, `l = 0..=l_max`.
pub fn hg_coefficients(g: f64, l_max: usize) -> Result<PhaseFunction> {
    if !(g.abs() < 1.0) {
        return Err(AdoError::InvalidAsymmetry(g));
    }
    let coeffs = (0..=l_max)
        .map(|l| (2 * l + 1) as f64 * g.powi(l as i32))
        .collect();
    Ok(PhaseFunction {
        coeffs,
        asymmetry: Some(g),
    })
}

/// Closed-form Henyey-Greenstein `(1 − g²) / (1 + g² − 2g cos Θ)^{3/2}`.
pub fn hg_exact(cos_theta: f64, g: f64) -> Result<f64> {
    if !(g.abs() < 1.0) {
        return Err(AdoError::InvalidAsymmetry(g));
    }
    Ok((1.0 - g * g) / (1.0 + g * g - 2.0 * g * cos_theta).powf(1.5))
}
