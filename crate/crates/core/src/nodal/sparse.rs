//! Compressed-row storage and restarted GMRES for the nodal system.

use nalgebra::{DMatrix, DVector};

use crate::error::{AdoError, Result};

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    /// Builds from unsorted triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by_key(|a| (a.0, a.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        let mut row_ptr = vec![0; n + 1];
        for e in &merged {
            row_ptr[e.0 + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col: merged.iter().map(|e| e.1).collect(),
            val: merged.iter().map(|e| e.2).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col[k], self.val[k]))
        })
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.val[k] * x[self.col[k]])
                    .sum()
            })
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                self.val[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Dense copy of the diagonal block `[start, start + size)`.
    pub fn diagonal_block(&self, start: usize, size: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(size, size);
        for r in start..start + size {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col[k];
                if (start..start + size).contains(&c) {
                    m[(r - start, c - start)] = self.val[k];
                }
            }
        }
        m
    }
}

/// Right-preconditioned restarted GMRES.
pub(crate) fn gmres(
    a: &Csr,
    b: &[f64],
    precond: impl Fn(&[f64]) -> Vec<f64>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = a.n;
    let restart = restart.max(1);
    let mut x = vec![0.0; n];
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut rel = 1.0;
    while iterations < max_iter {
        let ax = a.mul(&x);
        let r: Vec<f64> = (0..n).map(|i| b[i] - ax[i]).collect();
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= tol {
            return Ok(x);
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut h = DMatrix::<f64>::zeros(restart + 1, restart);
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            iterations += 1;
            let zk = precond(&v[k]);
            let mut w = a.mul(&zk);
            z.push(zk);
            for i in 0..=k {
                let hik = dot(&w, &v[i]);
                h[(i, k)] = hik;
                for (wj, vj) in w.iter_mut().zip(&v[i]) {
                    *wj -= hik * vj;
                }
            }
            let wn = norm(&w);
            h[(k + 1, k)] = wn;
            for i in 0..k {
                let t = cs[i] * h[(i, k)] + sn[i] * h[(i + 1, k)];
                h[(i + 1, k)] = -sn[i] * h[(i, k)] + cs[i] * h[(i + 1, k)];
                h[(i, k)] = t;
            }
            let denom = h[(k, k)].hypot(h[(k + 1, k)]);
            cs[k] = h[(k, k)] / denom;
            sn[k] = h[(k + 1, k)] / denom;
            h[(k, k)] = denom;
            h[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            rel = g[k + 1].abs() / b_norm;
            if rel <= tol || wn == 0.0 || iterations >= max_iter {
                break;
            }
            v.push(w.iter().map(|wi| wi / wn).collect());
        }
        let r_mat = h.view((0, 0), (k_used, k_used)).upper_triangle();
        let y = r_mat
            .solve_upper_triangular(&DVector::from_column_slice(&g[..k_used]))
            .ok_or(AdoError::NoConvergence {
                iterations,
                change: rel,
            })?;
        for (j, zj) in z.iter().enumerate().take(k_used) {
            for (xi, zi) in x.iter_mut().zip(zj) {
                *xi += y[j] * zi;
            }
        }
    }
    let ax = a.mul(&x);
    let res: Vec<f64> = (0..n).map(|i| b[i] - ax[i]).collect();
    let rel_final = norm(&res) / b_norm;
    if rel_final <= tol {
        Ok(x)
    } else {
        Err(AdoError::NoConvergence {
            iterations,
            change: rel_final.max(rel),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
