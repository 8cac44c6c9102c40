//! Observed order and Richardson extrapolation from geometric mesh series.

use crate::error::{AdoError, Result};

/// Values on the meshes `h, rh, r²h, …`, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementSeries {
    h: Vec<f64>,
    values: Vec<f64>,
    ratio: f64,
}

impl RefinementSeries {
    pub fn new(h: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if h.len() != values.len() {
            return Err(AdoError::InvalidSeries(format!(
                "{} mesh sizes for {} values",
                h.len(),
                values.len()
            )));
        }
        if h.len() < 3 {
            return Err(AdoError::InvalidSeries("need at least three meshes".into()));
        }
        if h.iter().chain(&values).any(|v| !v.is_finite()) || h.iter().any(|&x| x <= 0.0) {
            return Err(AdoError::InvalidSeries(
                "mesh sizes must be positive and all entries finite".into(),
            ));
        }
        let ratio = h[1] / h[0];
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(AdoError::InvalidSeries(format!(
                "refinement factor {ratio} outside (0, 1)"
            )));
        }
        for (k, &hk) in h.iter().enumerate() {
            let expect = h[0] * ratio.powi(k as i32);
            if (hk - expect).abs() > 1e-12 * expect {
                return Err(AdoError::InvalidSeries(format!(
                    "mesh size {hk} breaks the geometric sequence (expected {expect})"
                )));
            }
        }
        Ok(Self { h, values, ratio })
    }

    /// `h₀ r^k` for `k = 0..values.len()`.
    pub fn geometric(h0: f64, ratio: f64, values: Vec<f64>) -> Result<Self> {
        let h = (0..values.len()).map(|k| h0 * ratio.powi(k as i32)).collect();
        Self::new(h, values)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of consecutive triples.
    pub fn triples(&self) -> usize {
        self.len() - 2
    }
}

/// Order from the triple starting at entry `start`.
pub fn order_of_triple(s: &RefinementSeries, start: usize) -> Result<f64> {
    if start + 2 >= s.len() {
        return Err(AdoError::InvalidSeries(format!(
            "no triple starts at entry {start} of {}",
            s.len()
        )));
    }
    let v = &s.values[start..start + 3];
    let (d1, d2) = (v[1] - v[0], v[2] - v[1]);
    if d1 == 0.0 || d2 == 0.0 {
        return Err(AdoError::StalledConvergence);
    }
    let q = d2 / d1;
    if q < 0.0 {
        return Err(AdoError::NonMonotoneSeries(q));
    }
    Ok(q.ln() / s.ratio.ln())
}

/// Order from the finest triple.
pub fn estimate_order(s: &RefinementSeries) -> Result<f64> {
    order_of_triple(s, s.len() - 3)
}

/// Extrapolation from the pair `(start, start + 1)`.
pub fn extrapolate_pair(s: &RefinementSeries, start: usize, p: f64) -> Result<f64> {
    if start + 1 >= s.len() {
        return Err(AdoError::InvalidSeries(format!(
            "no pair starts at entry {start} of {}",
            s.len()
        )));
    }
    let rp = s.ratio.powf(p);
    if !p.is_finite() || !rp.is_finite() || (1.0 - rp).abs() <= f64::EPSILON {
        return Err(AdoError::DegenerateOrder);
    }
    let (coarse, fine) = (s.values[start], s.values[start + 1]);
    Ok((fine - rp * coarse) / (1.0 - rp))
}

/// `φ_ref` from the two finest entries.
pub fn extrapolate(s: &RefinementSeries, p: f64) -> Result<f64> {
    extrapolate_pair(s, s.len() - 2, p)
}

/// Order and extrapolated value of one triple; either may have failed.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    pub start: usize,
    pub order: Result<f64>,
    pub reference: Result<f64>,
}

/// Reports every consecutive triple, coarsest first. The last one is the
/// headline value.
pub fn analyze(s: &RefinementSeries) -> Vec<TripleReport> {
    (0..s.triples())
        .map(|start| {
            let order = order_of_triple(s, start);
            let reference = match &order {
                Ok(p) => extrapolate_pair(s, start + 1, *p),
                Err(e) => Err(e.clone()),
            };
            TripleReport {
                start,
                order,
                reference,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(f: impl Fn(f64) -> f64) -> RefinementSeries {
        let h = vec![0.4, 0.2, 0.1];
        let v = h.iter().map(|&x| f(x)).collect();
        RefinementSeries::new(h, v).unwrap()
    }

    #[test]
    fn quadratic_and_linear() {
        let s = series(|h| 1.0 + h * h);
        let p = estimate_order(&s).unwrap();
        assert!((p - 2.0).abs() < 1e-12);
        assert!((extrapolate(&s, p).unwrap() - 1.0).abs() < 1e-12);
        let p = estimate_order(&series(|h| 3.0 - 5.0 * h)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series() {
        let s = series(|_| 7.5);
        assert!(matches!(estimate_order(&s), Err(AdoError::StalledConvergence)));
        assert_eq!(extrapolate(&s, 2.0).unwrap(), 7.5);
    }

    #[test]
    fn oscillation_is_reported() {
        let s = RefinementSeries::geometric(1.0, 0.5, vec![1.0, 2.0, 1.5]).unwrap();
        assert!(matches!(estimate_order(&s), Err(AdoError::NonMonotoneSeries(q)) if q < 0.0));
    }

    #[test]
    fn zero_order_is_degenerate() {
        let s = series(|h| h);
        assert!(matches!(extrapolate(&s, 0.0), Err(AdoError::DegenerateOrder)));
        assert!(matches!(extrapolate(&s, f64::NAN), Err(AdoError::DegenerateOrder)));
    }

    #[test]
    fn malformed_series_are_rejected() {
        assert!(RefinementSeries::new(vec![0.4, 0.2], vec![1.0, 2.0]).is_err());
        assert!(RefinementSeries::new(vec![0.4, 0.2, 0.11], vec![1.0, 2.0, 3.0]).is_err());
        assert!(RefinementSeries::new(vec![0.1, 0.2, 0.4], vec![1.0, 2.0, 3.0]).is_err());
        assert!(RefinementSeries::new(vec![0.4, 0.2, 0.1], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn every_triple_is_reported() {
        let s = RefinementSeries::geometric(1.0, 0.5, vec![2.0, 1.25, 1.0625, 1.015625, 1.00390625])
            .unwrap();
        let reports = analyze(&s);
        assert_eq!(reports.len(), 3);
        for r in reports {
            assert!((r.order.unwrap() - 2.0).abs() < 1e-12);
            assert!((r.reference.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn exact_on_power_law(
            base in -10.0f64..10.0,
            alpha in prop_oneof![0.1f64..5.0, -5.0f64..-0.1],
            p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)],
            h0 in 0.05f64..1.0,
            r in prop_oneof![Just(0.5), Just(0.25), Just(1.0 / 3.0)],
        ) {
            let s = RefinementSeries::geometric(
                h0, r, (0..3).map(|k| base + alpha * (h0 * r.powi(k)).powf(p)).collect()
            ).unwrap();
            let got = estimate_order(&s).unwrap();
            prop_assert!((got - p).abs() < 1e-9 * p.max(1.0));
            let phi = extrapolate(&s, p).unwrap();
            prop_assert!((phi - base).abs() < 1e-9 * base.abs().max(alpha.abs()));
        }

        #[test]
        fn affine_invariance(c1 in -5.0f64..5.0, c2 in 0.1f64..4.0, shift in -3.0f64..3.0) {
            let raw = vec![1.7, 1.31, 1.2052, 1.1801];
            let s = RefinementSeries::geometric(0.4, 0.5, raw.clone()).unwrap();
            let t = RefinementSeries::geometric(0.4, 0.5, raw.iter().map(|v| c1 + c2 * v).collect()).unwrap();
            let u = RefinementSeries::geometric(0.4, 0.5, raw.iter().map(|v| v + shift).collect()).unwrap();
            let p = estimate_order(&s).unwrap();
            prop_assert!((estimate_order(&t).unwrap() - p).abs() < 1e-9);
            prop_assert!((estimate_order(&u).unwrap() - p).abs() < 1e-9);
            let phi = extrapolate(&s, p).unwrap();
            prop_assert!((extrapolate(&t, p).unwrap() - (c1 + c2 * phi)).abs() < 1e-9 * (1.0 + c1.abs() + c2 * phi.abs()));
        }
    }
}
