//! Dense linear algebra shared by the slab and nodal solvers.
//!
//! Both half-order eigenproblems have the shape `P = E S1 E S2` with `E` a
//! positive diagonal and `S1`, `S2` symmetric (weights times the
//! symmetric scattering kernel). When either `S` is definite, `P` is similar
//! to a symmetric matrix, which gives real eigenvalues and an orthogonal
//! eigenbasis even for the repeated separation constants that symmetric
//! angular sets produce.

use crate::error::{AdoError, Result};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, LU, SVD};

#[derive(Debug, Clone)]
pub(crate) struct EigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
}

fn definite_factor(s: &DMatrix<f64>) -> Option<(f64, DMatrix<f64>)> {
    let sign = if s[(0, 0)] >= 0.0 { 1.0 } else { -1.0 };
    Cholesky::new(s * sign).map(|c| (sign, c.l()))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Eigenpairs of `E S1 E S2`.
pub(crate) fn pair_eigen(
    e: &DVector<f64>,
    s1: &DMatrix<f64>,
    s2: &DMatrix<f64>,
    region: Option<usize>,
) -> Result<Vec<EigenPair>> {
    let ed = DMatrix::from_diagonal(e);
    if let Some((sign, l)) = definite_factor(s1) {
        // P (E L y) = λ (E L y)  <=>  sign · Lᵀ E S2 E L y = λ y
        let c = symmetrize(l.transpose() * &ed * s2 * &ed * &l * sign);
        let eig = SymmetricEigen::new(c);
        let basis = &ed * &l;
        return Ok(collect(eig, |y| &basis * y));
    }
    if let Some((sign, l)) = definite_factor(s2) {
        // P (L⁻ᵀ y) = λ (L⁻ᵀ y)  <=>  sign · Lᵀ E S1 E L y = λ y
        let c = symmetrize(l.transpose() * &ed * s1 * &ed * &l * sign);
        let eig = SymmetricEigen::new(c);
        let lt = l.transpose();
        return Ok(collect(eig, |y| {
            lt.solve_upper_triangular(y)
                .expect("Cholesky factor has a positive diagonal")
        }));
    }
    general_eigen(&(&ed * s1 * &ed * s2), region)
}

fn collect(
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
    map: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> Vec<EigenPair> {
    (0..eig.eigenvalues.len())
        .map(|j| EigenPair {
            value: eig.eigenvalues[j],
            vector: map(&eig.eigenvectors.column(j).into_owned()),
        })
        .collect()
}

/// Fallback for indefinite factors: Schur eigenvalues, then null vectors of
/// `P − λI` from the SVD, one cluster of (nearly) equal eigenvalues at a time.
pub(crate) fn general_eigen(p: &DMatrix<f64>, region: Option<usize>) -> Result<Vec<EigenPair>> {
    let n = p.nrows();
    let values = p.clone().complex_eigenvalues();
    let mut reals = Vec::with_capacity(n);
    for z in values.iter() {
        if z.im.abs() > 1e-8 * z.re.abs().max(f64::MIN_POSITIVE) {
            return Err(AdoError::ComplexSpectrum {
                re: z.re,
                im: z.im,
                region,
            });
        }
        reals.push(z.re);
    }
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = reals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (reals[j] - reals[i]).abs() <= 1e-8 * scale {
            j += 1;
        }
        let lambda = reals[i..j].iter().sum::<f64>() / (j - i) as f64;
        let shifted = p - DMatrix::identity(n, n) * lambda;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[a]
                .partial_cmp(&svd.singular_values[b])
                .unwrap()
        });
        for &k in order.iter().take(j - i) {
            out.push(EigenPair {
                value: lambda,
                vector: v_t.row(k).transpose(),
            });
        }
        i = j;
    }
    Ok(out)
}

/// Scales `v` to unit max-norm with its largest-magnitude entry positive.
pub(crate) fn normalize_max(v: &mut DVector<f64>) {
    let (idx, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, x)| {
            if x.abs() > bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        });
    let pivot = v[idx];
    if pivot != 0.0 {
        *v /= pivot;
    }
}

/// Dense LU solve with a 1-norm condition estimate; refuses systems whose
/// condition exceeds `1e-3 / ε`.
pub(crate) fn solve_checked(
    a: DMatrix<f64>,
    b: &DVector<f64>,
    hint: &str,
) -> Result<(DVector<f64>, f64)> {
    let norm_a = one_norm(&a);
    let lu = LU::new(a);
    let limit = 1e-3 / f64::EPSILON;
    let inv = lu.try_inverse().ok_or_else(|| AdoError::NearSingular {
        condition: f64::INFINITY,
        hint: hint.to_string(),
    })?;
    let condition = norm_a * one_norm(&inv);
    if !condition.is_finite() || condition > limit {
        return Err(AdoError::NearSingular {
            condition,
            hint: hint.to_string(),
        });
    }
    let x = lu.solve(b).ok_or_else(|| AdoError::NearSingular {
        condition,
        hint: hint.to_string(),
    })?;
    Ok((x, condition))
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
