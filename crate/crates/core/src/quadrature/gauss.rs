//! Gauss-Legendre rules and the half-range rule built from them.

use crate::error::{AdoError, Result};

/// Evaluates `P_n(x)` and `P_n'(x)` by the three-term recurrence.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < f64::EPSILON {
        // P_n'(±1) = (±1)^(n+1) n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule on
/// `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(AdoError::InvalidOrder {
            order: 0,
            reason: "a Gauss rule needs at least one node",
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess for the i-th largest root.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Quadrature on the half range `(0, 1]` approximating `∫₀¹ f(μ) dμ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfRangeQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfRangeQuadrature {
    /// Builds a rule from explicit nodes and weights.
    ///
    /// Nodes must be strictly increasing inside `(0, 1]` and weights positive.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(AdoError::InvalidOrder {
                order: nodes.len(),
                reason: "nodes and weights must be non-empty and of equal length",
            });
        }
        let increasing = nodes.windows(2).all(|p| p[0] < p[1]);
        let inside = nodes.iter().all(|&m| m > 0.0 && m <= 1.0);
        if !increasing || !inside || weights.iter().any(|&w| w <= 0.0) {
            return Err(AdoError::InvalidProblem(
                "half-range nodes must increase inside (0, 1] with positive weights".into(),
            ));
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `(0, 1)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&m, &w)| w * f(m))
            .sum()
    }

    /// Index of `mu` among the nodes, if it is one (relative match 1e-12).
    pub fn node_index(&self, mu: f64) -> Option<usize> {
        self.nodes
            .iter()
            .position(|&m| (m - mu).abs() <= 1e-12 * m.max(1e-300))
    }
}

/// Gauss-Legendre rule affinely mapped from `(-1, 1)` onto `(0, 1)`.
pub fn half_range_gauss(n: usize) -> Result<HalfRangeQuadrature> {
    let (x, w) = gauss_legendre(n)?;
    let nodes = x.iter().map(|&t| 0.5 * (t + 1.0)).collect();
    let weights = w.iter().map(|&v| 0.5 * v).collect();
    Ok(HalfRangeQuadrature { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mapped_p2(mu: f64) -> f64 {
        let x = 2.0 * mu - 1.0;
        0.5 * (3.0 * x * x - 1.0)
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn one_point_rule_is_midpoint() {
        let q = half_range_gauss(1).unwrap();
        assert_eq!(q.nodes(), &[0.5]);
        assert!((q.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_nodes_match_bisection_roots() {
        let q = half_range_gauss(2).unwrap();
        let r1 = bisect(mapped_p2, 0.0, 0.5);
        let r2 = bisect(mapped_p2, 0.5, 1.0);
        assert!((q.nodes()[0] - r1).abs() < 1e-14);
        assert!((q.nodes()[1] - r2).abs() < 1e-14);
        assert!((q.nodes()[0] - 0.211_324_865_405_187).abs() < 1e-12);
        for &w in q.weights() {
            assert!((w - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn eight_points_integrate_degree_fifteen() {
        let q = half_range_gauss(8).unwrap();
        let v = q.integrate(|m| m.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(matches!(
            half_range_gauss(0),
            Err(AdoError::InvalidOrder { .. })
        ));
    }

    #[test]
    fn exactness_is_sharp() {
        for n in [2usize, 4, 8, 16] {
            let q = half_range_gauss(n).unwrap();
            for d in 0..2 * n {
                let exact = 1.0 / (d as f64 + 1.0);
                let got = q.integrate(|m| m.powi(d as i32));
                assert!(((got - exact) / exact).abs() < 1e-13, "n={n} d={d}");
            }
            let d = 2 * n;
            let exact = 1.0 / (d as f64 + 1.0);
            let got = q.integrate(|m| m.powi(d as i32));
            // Gauss remainder for μ^{2n} on (0, 1): (n!)^4 / ((2n+1) ((2n)!)^2)
            let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
            let remainder = fact(n).powi(4) / ((d as f64 + 1.0) * fact(d).powi(2));
            if remainder > 1e-11 * exact {
                assert!(
                    ((exact - got) / remainder - 1.0).abs() < 1e-3,
                    "n={n}: error {} vs remainder {remainder}",
                    exact - got
                );
            }
            if n <= 4 {
                assert!(((got - exact) / exact).abs() > 1e-6, "n={n} should fail at 2n");
            }
        }
    }

    #[test]
    fn large_rule_weights_sum_to_one() {
        for n in [40usize, 100, 300] {
            let q = half_range_gauss(n).unwrap();
            let s: f64 = q.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
            assert!(q.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(q.nodes()[0] > 0.0 && q.nodes()[n - 1] < 1.0);
        }
    }
}
