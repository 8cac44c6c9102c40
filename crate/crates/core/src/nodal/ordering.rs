use crate::error::{AdoError, Result};
use crate::quadrature::SphereQuadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingScheme {
    /// Pairs `(μ, η)` with `(−μ, η)`.
    XScheme,
    /// Pairs `(μ, η)` with `(μ, −η)`.
    YScheme,
}

/// Scheme order of the stored directions: positions `0..M/2` hold the
/// directions with positive leading cosine, position `i + M/2` their mirror.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionOrdering {
    scheme: OrderingScheme,
    perm: Vec<usize>,
    mirror: Vec<usize>,
    position: Vec<usize>,
}

impl DirectionOrdering {
    pub fn scheme(&self) -> OrderingScheme {
        self.scheme
    }

    /// Stored index at each scheme position.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn half(&self) -> usize {
        self.perm.len() / 2
    }

    /// Stored index of direction `i` (positive half).
    pub fn plus(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// Stored index of the mirror of direction `i`.
    pub fn minus(&self, i: usize) -> usize {
        self.perm[i + self.half()]
    }

    /// Stored index of the mirror of stored direction `d`.
    pub fn mirror(&self, d: usize) -> usize {
        self.mirror[d]
    }

    /// Scheme position of stored direction `d`.
    pub fn position(&self, d: usize) -> usize {
        self.position[d]
    }
}

pub fn order_directions(q: &SphereQuadrature, scheme: OrderingScheme) -> Result<DirectionOrdering> {
    let dirs = q.directions();
    let m = dirs.len();
    let name = match scheme {
        OrderingScheme::XScheme => "x-scheme",
        OrderingScheme::YScheme => "y-scheme",
    };
    let lead = |i: usize| match scheme {
        OrderingScheme::XScheme => dirs[i].mu,
        OrderingScheme::YScheme => dirs[i].eta,
    };
    let plus: Vec<usize> = (0..m).filter(|&i| lead(i) > 0.0).collect();
    if m % 2 == 1 || plus.len() * 2 != m {
        return Err(AdoError::OrderingImpossible(name));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let mut mirror = vec![usize::MAX; m];
    for &i in &plus {
        let d = dirs[i];
        let (mu, eta) = match scheme {
            OrderingScheme::XScheme => (-d.mu, d.eta),
            OrderingScheme::YScheme => (d.mu, -d.eta),
        };
        let j = (0..m)
            .find(|&j| {
                close(dirs[j].mu, mu)
                    && close(dirs[j].eta, eta)
                    && close(dirs[j].xi, d.xi)
                    && close(dirs[j].weight, d.weight)
            })
            .ok_or(AdoError::OrderingImpossible(name))?;
        if mirror[j] != usize::MAX {
            return Err(AdoError::OrderingImpossible(name));
        }
        mirror[i] = j;
        mirror[j] = i;
    }
    let mut perm = plus.clone();
    perm.extend(plus.iter().map(|&i| mirror[i]));
    let mut position = vec![0; m];
    for (p, &d) in perm.iter().enumerate() {
        position[d] = p;
    }
    Ok(DirectionOrdering {
        scheme,
        perm,
        mirror,
        position,
    })
}
