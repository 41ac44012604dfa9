use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of arc length with first and second derivatives.
///
/// Derivatives are analytic when supplied; otherwise they come from central
/// differences with one Richardson step.
#[derive(Clone)]
pub struct RadialProfile {
    value: ScalarFn,
    first: Option<ScalarFn>,
    second: Option<ScalarFn>,
    step: f64,
    label: String,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("analytic", &self.is_analytic())
            .finish()
    }
}

impl RadialProfile {
    pub fn analytic<F, F1, F2>(value: F, first: F1, second: F2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialProfile {
            value: Arc::new(value),
            first: Some(Arc::new(first)),
            second: Some(Arc::new(second)),
            step: 1e-4,
            label: "analytic".into(),
        }
    }

    /// Profile whose derivatives are taken numerically. The function must
    /// be defined slightly outside the domain of interest.
    pub fn from_fn<F>(value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialProfile {
            value: Arc::new(value),
            first: None,
            second: None,
            step: 1e-4,
            label: "numeric".into(),
        }
    }

    pub fn zero() -> Self {
        Self::analytic(|_| 0.0, |_| 0.0, |_| 0.0).labeled("0")
    }

    pub fn identity() -> Self {
        Self::analytic(|r| r, |_| 1.0, |_| 0.0).labeled("r")
    }

    /// `slope * r`.
    pub fn linear(slope: f64) -> Self {
        Self::analytic(move |r| slope * r, move |_| slope, |_| 0.0).labeled(format!("{slope} r"))
    }

    /// `Σ c_i r^i`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c: Arc<[f64]> = coeffs.into();
        let (c0, c1, c2) = (c.clone(), c.clone(), c);
        Self::analytic(
            move |r| c0.iter().rev().fold(0.0, |acc, &ci| acc * r + ci),
            move |r| {
                c1.iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (i, &ci)| acc * r + i as f64 * ci)
            },
            move |r| {
                c2.iter()
                    .enumerate()
                    .skip(2)
                    .rev()
                    .fold(0.0, |acc, (i, &ci)| acc * r + (i * (i - 1)) as f64 * ci)
            },
        )
        .labeled("polynomial")
    }

    /// `c_0 + Σ_k (a_k cos(k r) + b_k sin(k r))` with coefficients laid out
    /// as `[c_0, a_1, b_1, a_2, b_2, ...]`.
    pub fn fourier(coeffs: &[f64]) -> Self {
        let c: Arc<[f64]> = coeffs.into();
        let terms = |c: &[f64], r: f64, order: u32| -> f64 {
            let mut acc = if order == 0 {
                c.first().copied().unwrap_or(0.0)
            } else {
                0.0
            };
            for (j, pair) in c.get(1..).unwrap_or(&[]).chunks(2).enumerate() {
                let k = (j + 1) as f64;
                let a = pair[0];
                let b = pair.get(1).copied().unwrap_or(0.0);
                let (s, co) = (k * r).sin_cos();
                acc += match order {
                    0 => a * co + b * s,
                    1 => k * (-a * s + b * co),
                    _ => -k * k * (a * co + b * s),
                };
            }
            acc
        };
        let (c0, c1, c2) = (c.clone(), c.clone(), c);
        Self::analytic(
            move |r| terms(&c0, r, 0),
            move |r| terms(&c1, r, 1),
            move |r| terms(&c2, r, 2),
        )
        .labeled("fourier")
    }

    /// Natural cubic spline through `(nodes[i], values[i])`; the end pieces
    /// extend beyond the node range.
    pub fn table(nodes: &[f64], values: &[f64]) -> Result<Self> {
        let spline = CubicSpline::natural(nodes, values)?;
        let s = Arc::new(spline);
        let (s0, s1, s2) = (s.clone(), s.clone(), s);
        Ok(Self::analytic(
            move |r| s0.eval(r, 0),
            move |r| s1.eval(r, 1),
            move |r| s2.eval(r, 2),
        )
        .labeled("table"))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Base step for numerical differentiation.
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn is_analytic(&self) -> bool {
        self.first.is_some() && self.second.is_some()
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.value)(r)
    }

    pub fn d1(&self, r: f64) -> f64 {
        match &self.first {
            Some(f) => f(r),
            None => {
                let f = &self.value;
                let central = |h: f64| (f(r + h) - f(r - h)) / (2.0 * h);
                let h = self.step;
                (4.0 * central(0.5 * h) - central(h)) / 3.0
            }
        }
    }

    pub fn d2(&self, r: f64) -> f64 {
        match &self.second {
            Some(f) => f(r),
            None => {
                let f = &self.value;
                let fr = f(r);
                let central = |h: f64| (f(r + h) - 2.0 * fr + f(r - h)) / (h * h);
                let h = self.step;
                (4.0 * central(0.5 * h) - central(h)) / 3.0
            }
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &RadialProfile) -> RadialProfile {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("{} + {}", self.label, other.label);
        if self.is_analytic() && other.is_analytic() {
            let (a1, b1, a2, b2) = (a.clone(), b.clone(), a.clone(), b.clone());
            RadialProfile::analytic(
                move |r| a.eval(r) + b.eval(r),
                move |r| a1.d1(r) + b1.d1(r),
                move |r| a2.d2(r) + b2.d2(r),
            )
            .labeled(label)
            .with_step(self.step)
        } else {
            RadialProfile::from_fn(move |r| a.eval(r) + b.eval(r))
                .labeled(label)
                .with_step(self.step)
        }
    }

    /// Pointwise product.
    pub fn times(&self, other: &RadialProfile) -> RadialProfile {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("({}) ({})", self.label, other.label);
        if self.is_analytic() && other.is_analytic() {
            let (a1, b1, a2, b2) = (a.clone(), b.clone(), a.clone(), b.clone());
            RadialProfile::analytic(
                move |r| a.eval(r) * b.eval(r),
                move |r| a1.d1(r) * b1.eval(r) + a1.eval(r) * b1.d1(r),
                move |r| a2.d2(r) * b2.eval(r) + 2.0 * a2.d1(r) * b2.d1(r) + a2.eval(r) * b2.d2(r),
            )
            .labeled(label)
            .with_step(self.step)
        } else {
            RadialProfile::from_fn(move |r| a.eval(r) * b.eval(r))
                .labeled(label)
                .with_step(self.step)
        }
    }
}

/// Serializable description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProfileSpec {
    Poly { coeffs: Vec<f64> },
    Fourier { coeffs: Vec<f64> },
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match self {
            ProfileSpec::Poly { coeffs } => {
                check_finite("coeffs", coeffs)?;
                Ok(RadialProfile::polynomial(coeffs))
            }
            ProfileSpec::Fourier { coeffs } => {
                check_finite("coeffs", coeffs)?;
                Ok(RadialProfile::fourier(coeffs))
            }
            ProfileSpec::Table { nodes, values } => RadialProfile::table(nodes, values),
        }
    }
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::param(name, "must not be empty"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(name, "must be finite"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() < 8 {
            return Err(Error::param(
                "nodes",
                format!("need at least 8 nodes, got {}", x.len()),
            ));
        }
        if x.len() != y.len() {
            return Err(Error::param(
                "values",
                format!("expected {} values, got {}", x.len(), y.len()),
            ));
        }
        check_finite("nodes", x)?;
        check_finite("values", y)?;
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("nodes", "must be strictly increasing"));
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        // Thomas algorithm on the interior equations.
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0;
            let b = 2.0 * (h0 + h1);
            let c = h1;
            let d = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }
        Ok(CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn eval(&self, t: f64, order: u8) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        match order {
            0 => a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
            1 => (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0,
            _ => a * m0 + b * m1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let p = RadialProfile::polynomial(&[1.0, -2.0, 0.5, 3.0]);
        let r = 0.7;
        assert!((p.eval(r) - (1.0 - 2.0 * r + 0.5 * r * r + 3.0 * r * r * r)).abs() < 1e-14);
        assert!((p.d1(r) - (-2.0 + r + 9.0 * r * r)).abs() < 1e-14);
        assert!((p.d2(r) - (1.0 + 18.0 * r)).abs() < 1e-14);
    }

    #[test]
    fn fourier_derivatives() {
        let p = RadialProfile::fourier(&[0.5, 0.0, 1.0, 0.25, 0.0]);
        let r: f64 = 1.3;
        let v = 0.5 + r.sin() + 0.25 * (2.0 * r).cos();
        let d = r.cos() - 0.5 * (2.0 * r).sin();
        let dd = -r.sin() - (2.0 * r).cos();
        assert!((p.eval(r) - v).abs() < 1e-14);
        assert!((p.d1(r) - d).abs() < 1e-14);
        assert!((p.d2(r) - dd).abs() < 1e-14);
    }

    #[test]
    fn numeric_derivatives_match_analytic() {
        let num = RadialProfile::from_fn(|r: f64| r.sin() * (1.0 + 0.1 * r * r));
        for i in 1..20 {
            let r = 0.15 * i as f64;
            let d1 = r.cos() * (1.0 + 0.1 * r * r) + 0.2 * r * r.sin();
            let d2 = -r.sin() * (1.0 + 0.1 * r * r) + 0.4 * r * r.cos() + 0.2 * r.sin();
            assert!((num.d1(r) - d1).abs() < 1e-10, "r = {r}");
            assert!((num.d2(r) - d2).abs() < 1e-6, "r = {r}");
        }
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let nodes: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let values: Vec<f64> = nodes.iter().map(|x| x.sin()).collect();
        let p = RadialProfile::table(&nodes, &values).unwrap();
        for i in 5..35 {
            let x = 0.05 * i as f64 + 0.013;
            assert!((p.eval(x) - x.sin()).abs() < 1e-6);
            assert!((p.d1(x) - x.cos()).abs() < 1e-4);
        }
    }

    #[test]
    fn table_validation() {
        let short = [0.0, 1.0, 2.0];
        assert!(RadialProfile::table(&short, &short).is_err());
        let bad: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 3.0, 4.0, 5.0, 6.0];
        assert!(RadialProfile::table(&bad, &bad).is_err());
    }

    #[test]
    fn product_rule() {
        let a = RadialProfile::polynomial(&[0.0, 1.0]);
        let b = RadialProfile::fourier(&[1.0, 0.0, 0.5]);
        let p = a.times(&b);
        let r: f64 = 0.4;
        let expect_d2 = 2.0 * 0.5 * r.cos() - r * 0.5 * r.sin();
        assert!((p.d2(r) - expect_d2).abs() < 1e-14);
    }

    #[test]
    fn spec_round_trip() {
        let spec: ProfileSpec =
            serde_json::from_str(r#"{"type":"poly","coeffs":[0.0,1.0]}"#).unwrap();
        assert_eq!(
            spec,
            ProfileSpec::Poly {
                coeffs: vec![0.0, 1.0]
            }
        );
        assert_eq!(spec.build().unwrap().eval(2.0), 2.0);
    }
}
