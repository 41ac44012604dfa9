use std::cell::RefCell;
use std::collections::HashMap;

use crate::model::{ModelSpace, MODEL_TOL};
use crate::numkit::{cumulative_quad, quad_adaptive};
use crate::{Error, Result};

/// `Φ(R) = ∫_0^R (e^{c σ t} - 1) A(t)/V(t) dt` for a model `(A, V)`.
///
/// The ratio `A/V` costs a quadrature per call, so values are memoized.
pub struct GrowthIntegral {
    model: ModelSpace,
    scale: f64,
    memo: RefCell<HashMap<u64, f64>>,
}

impl GrowthIntegral {
    pub fn new(model: ModelSpace, scale: f64) -> Self {
        GrowthIntegral {
            model,
            scale,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn ratio(&self, t: f64) -> Result<f64> {
        if let Some(&v) = self.memo.borrow().get(&t.to_bits()) {
            return Ok(v);
        }
        let v = self.model.area_over_volume(t)?;
        self.memo.borrow_mut().insert(t.to_bits(), v);
        Ok(v)
    }

    /// The integrand; its limit at `t = 0` is `c σ d`.
    pub fn integrand(&self, sigma: f64, t: f64) -> Result<f64> {
        let rate = self.scale * sigma;
        if t <= 0.0 {
            return Ok(rate * self.model.dim());
        }
        Ok((rate * t).exp_m1() * self.ratio(t)?)
    }

    fn integrand_or_nan(&self, sigma: f64, t: f64) -> f64 {
        self.integrand(sigma, t).unwrap_or(f64::NAN)
    }

    fn check_upper(&self, upper: f64) -> Result<()> {
        if !(upper >= 0.0) || !upper.is_finite() {
            return Err(Error::Domain(format!(
                "growth integral needs R >= 0, got {upper}"
            )));
        }
        Ok(())
    }

    pub fn value(&self, sigma: f64, upper: f64) -> Result<f64> {
        self.check_upper(upper)?;
        if sigma == 0.0 || upper == 0.0 {
            return Ok(0.0);
        }
        let q = quad_adaptive(|t| self.integrand_or_nan(sigma, t), 0.0, upper, &MODEL_TOL)?;
        Ok(q.value)
    }

    /// `Φ` at every point of an increasing nonnegative grid.
    pub fn cumulative(&self, sigma: f64, grid: &[f64]) -> Result<Vec<f64>> {
        let Some(&first) = grid.first() else {
            return Ok(Vec::new());
        };
        if let Some(&last) = grid.last() {
            self.check_upper(last)?;
        }
        if sigma == 0.0 {
            return Ok(vec![0.0; grid.len()]);
        }
        let base = self.value(sigma, first)?;
        let rest = cumulative_quad(|t| self.integrand_or_nan(sigma, t), grid, &MODEL_TOL)?;
        Ok(rest.into_iter().map(|v| base + v).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_closed_form() {
        // A/V = d/t, so Φ(R) = d ∫_0^R (e^{σt} - 1)/t dt.
        let g = GrowthIntegral::new(ModelSpace::new(3.0, 0.0, 0.0).unwrap(), 1.0);
        let sigma: f64 = 0.7;
        let r = 1.3;
        let series: f64 = (1..40)
            .map(|j| {
                let j = j as f64;
                let fact: f64 = (1..=j as usize).map(|i| i as f64).product();
                (sigma * r).powf(j) / (j * fact)
            })
            .sum();
        assert!((g.value(sigma, r).unwrap() - 3.0 * series).abs() < 1e-10);
        assert_eq!(g.value(0.0, r).unwrap(), 0.0);
        assert!((g.integrand(sigma, 0.0).unwrap() - 2.1).abs() < 1e-15);
    }

    #[test]
    fn cumulative_matches_pointwise() {
        let g = GrowthIntegral::new(ModelSpace::new(4.0, 1.0, 0.0).unwrap(), 1.5);
        let grid = [0.2, 0.4, 0.6, 0.78];
        let cum = g.cumulative(0.3, &grid).unwrap();
        for (r, c) in grid.iter().zip(&cum) {
            assert!((g.value(0.3, *r).unwrap() - c).abs() < 1e-11);
        }
    }
}
