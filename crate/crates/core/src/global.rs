//! Myers-type diameter bounds for closed spaces and the radial index form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::comparison::Verdict;
use crate::numkit::{quad_adaptive, Tolerance};
use crate::smms::{RhoMode, WarpedSMMS};
use crate::{Error, Result};

const DIAMETER_SLACK: f64 = 1e-9;
const INDEX_TOL: Tolerance = Tolerance::fine();

fn check_inputs(n: usize, h: f64, pairs: &[(&str, f64)]) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", format!("must be >= 2, got {n}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Range(format!("diameter bounds need H > 0, got {h}")));
    }
    for &(name, v) in pairs {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be >= 0, got {v}")));
        }
    }
    Ok(())
}

/// `π/√H + (4k√H + 2l)/((n-1)H)` for `|f| <= k`.
pub fn myers_bound_bounded_f(n: usize, h: f64, k: f64, l: f64) -> Result<f64> {
    check_inputs(n, h, &[("k", k), ("l", l)])?;
    let nm1 = n as f64 - 1.0;
    Ok(PI / h.sqrt() + (4.0 * k * h.sqrt() + 2.0 * l) / (nm1 * h))
}

/// `π/√H + (2a + 2l)/((n-1)H)` for `|∂r f| <= a`.
pub fn myers_bound_gradient(n: usize, h: f64, a: f64, l: f64) -> Result<f64> {
    check_inputs(n, h, &[("a", a), ("l", l)])?;
    let nm1 = n as f64 - 1.0;
    Ok(PI / h.sqrt() + (2.0 * a + 2.0 * l) / (nm1 * h))
}

/// Index-form bound
/// `(2π/√H) √(1 + 8k/((n-1)π) + l²/((n-1)² H π²)) + 2l/((n-1)H)`.
pub fn myers_bound_indexform(n: usize, h: f64, k: f64, l: f64) -> Result<f64> {
    check_inputs(n, h, &[("k", k), ("l", l)])?;
    let nm1 = n as f64 - 1.0;
    let inner = 1.0 + 8.0 * k / (nm1 * PI) + l * l / (nm1 * nm1 * h * PI * PI);
    Ok(2.0 * PI / h.sqrt() * inner.sqrt() + 2.0 * l / (nm1 * h))
}

/// Diameter of a closed space together with the chord check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    /// Pole-to-pole distance.
    pub value: f64,
    /// Longest distance bound found for a pair of points off the axis.
    pub max_chord: f64,
    /// Set when some pair might be farther apart than the poles.
    pub caveat: bool,
}

/// Diameter of a closed warped product.
///
/// Every point lies on a meridian, so two points at radii `r1, r2` are at
/// most `min(r1 + r2, 2 r_max - r1 - r2)` apart through either pole, and at
/// most `π w(r)` apart along a parallel sphere when `r1 = r2 = r`. The
/// caveat is raised if the largest of these bounds exceeds `r_max`.
pub fn actual_diameter(s: &WarpedSMMS) -> Result<DiameterEstimate> {
    if !s.is_closed() {
        return Err(Error::InvalidSpace("diameter needs a closed space".into()));
    }
    let r_max = s.r_max();
    let samples = 1024;
    let mut max_chord: f64 = 0.0;
    for i in 0..=samples {
        let r = r_max * i as f64 / samples as f64;
        let through_poles = 2.0 * r.min(r_max - r);
        let parallel = PI * s.w().eval(r).max(0.0);
        max_chord = max_chord.max(through_poles.min(parallel));
    }
    Ok(DiameterEstimate {
        value: r_max,
        max_chord,
        caveat: max_chord > r_max + DIAMETER_SLACK,
    })
}

/// `∫_0^L [(n-1) φ'² - φ² Ric(∂r,∂r)] dt` with `φ(t) = sin(π t/L)`, the sum
/// of the index forms of the parallel fields `φ e_i` along a radial geodesic.
pub fn index_form_total(s: &WarpedSMMS, length: f64) -> Result<f64> {
    if !(length > 0.0) || length > s.r_max() {
        return Err(Error::Range(format!(
            "L = {length} must lie in (0, r_max = {}]",
            s.r_max()
        )));
    }
    let nm1 = s.n() as f64 - 1.0;
    let k = PI / length;
    let limit = if s.is_closed() {
        s.r_max()
    } else {
        s.interior_limit()
    };
    let q = quad_adaptive(
        |t| {
            let phi = (k * t).sin();
            let dphi = k * (k * t).cos();
            let ric = s.ricci_radial(t.min(limit)).unwrap_or(f64::NAN);
            nm1 * dphi * dphi - phi * phi * ric
        },
        0.0,
        length,
        &INDEX_TOL,
    )?;
    Ok(q.value)
}

/// Identifier of a diameter bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "MYERS_F")]
    MyersF,
    #[serde(rename = "MYERS_GRAD")]
    MyersGrad,
    #[serde(rename = "MYERS_INDEX")]
    MyersIndex,
}

impl BoundId {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::MyersF => "MYERS_F",
            BoundId::MyersGrad => "MYERS_GRAD",
            BoundId::MyersIndex => "MYERS_INDEX",
        }
    }
}

impl std::fmt::Display for BoundId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

/// Potential and curvature data the bounds were evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisData {
    pub k: f64,
    pub a: f64,
    pub l: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

/// Diameter bounds of a closed space compared to its diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub bounds: BTreeMap<BoundId, f64>,
    pub actual_diameter: Option<f64>,
    pub hypothesis_data: HypothesisData,
    pub rho_mode: RhoMode,
    /// Base points from which the excess integral was verified.
    pub verified_from: Vec<String>,
    pub diameter_caveat: bool,
    /// Smallest index form over lengths up to the diameter.
    pub index_form_min: f64,
    pub pass: bool,
    pub verdict: Verdict,
}

impl DiameterReport {
    /// `min(bound) - diameter`.
    pub fn margin(&self) -> Option<f64> {
        let tightest = self.bounds.values().copied().fold(f64::INFINITY, f64::min);
        self.actual_diameter.map(|d| tightest - d)
    }
}

/// Evaluates all three bounds with `k = sup|f|`, `a = sup|f'|` and
/// `l = ∫_0^{r_max} ρ`, and compares them to the diameter.
pub fn check_myers(s: &WarpedSMMS, h: f64, mode: RhoMode) -> Result<DiameterReport> {
    if !(h > 0.0) {
        return Err(Error::Range(format!("diameter bounds need H > 0, got {h}")));
    }
    let diameter = actual_diameter(s)?;
    let pb = s.potential_bounds();
    let l = s.excess_constant(h, mode)?;
    if !l.is_finite() {
        return Err(Error::Hypothesis("excess integral is not finite".into()));
    }
    let n = s.n();
    let mut bounds = BTreeMap::new();
    bounds.insert(BoundId::MyersF, myers_bound_bounded_f(n, h, pb.k, l)?);
    bounds.insert(
        BoundId::MyersGrad,
        myers_bound_gradient(n, h, pb.grad_sup, l)?,
    );
    bounds.insert(BoundId::MyersIndex, myers_bound_indexform(n, h, pb.k, l)?);

    let mut verified_from = vec!["pole".to_string()];
    if s.is_reflection_symmetric() {
        verified_from.push("antipode".to_string());
    }
    let mut index_form_min = f64::INFINITY;
    for i in 1..=32 {
        let length = s.r_max() * i as f64 / 32.0;
        index_form_min = index_form_min.min(index_form_total(s, length)?);
    }
    let pass = bounds
        .values()
        .all(|&b| diameter.value <= b + DIAMETER_SLACK);
    Ok(DiameterReport {
        bounds,
        actual_diameter: Some(diameter.value),
        hypothesis_data: HypothesisData {
            k: pb.k,
            a: pb.grad_sup,
            l,
            h,
        },
        rho_mode: mode,
        verified_from,
        diameter_caveat: diameter.caveat,
        index_form_min,
        pass,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smms::make_space;

    fn space(name: &str, params: &[(&str, f64)]) -> WarpedSMMS {
        let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_space(name, 3, &map).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(myers_bound_bounded_f(3, 1.0, 0.0, 0.0).unwrap(), PI);
        assert!((myers_bound_bounded_f(3, 1.0, 1.0, 0.0).unwrap() - (PI + 2.0)).abs() < 1e-15);
        assert!((myers_bound_bounded_f(3, 1.0, 0.0, 1.0).unwrap() - (PI + 1.0)).abs() < 1e-15);
        assert_eq!(myers_bound_gradient(3, 1.0, 0.0, 0.0).unwrap(), PI);
        assert!((myers_bound_gradient(3, 1.0, 1.0, 0.0).unwrap() - (PI + 1.0)).abs() < 1e-15);
        assert!((myers_bound_gradient(5, 4.0, 2.0, 2.0).unwrap() - (PI / 2.0 + 0.5)).abs() < 1e-15);
        let two_pi = 2.0 * PI;
        assert!((myers_bound_indexform(3, 1.0, 0.0, 0.0).unwrap() - two_pi).abs() < 1e-14);
        let s2 = 2f64.sqrt();
        assert!(
            (myers_bound_indexform(3, 1.0, PI / 4.0, 0.0).unwrap() - two_pi * s2).abs() < 1e-13
        );
        assert!(
            (myers_bound_indexform(3, 1.0, 0.0, two_pi).unwrap() - (two_pi * s2 + two_pi)).abs()
                < 1e-13
        );
        assert!(myers_bound_gradient(3, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn index_form_values() {
        let sphere = space("sphere", &[]);
        assert!(index_form_total(&sphere, PI).unwrap().abs() < 1e-10);
        let flat = space("euclidean", &[]);
        let v = index_form_total(&flat, 2.0).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-10);
        let half = index_form_total(&sphere, PI / 2.0).unwrap();
        assert!((half - 3.0 * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn diameters() {
        assert_eq!(
            actual_diameter(&space("sphere", &[("H", 4.0)]))
                .unwrap()
                .value,
            PI / 2.0
        );
        let p = actual_diameter(&space("perturbed_sphere", &[])).unwrap();
        assert_eq!(p.value, PI);
        assert!(!p.caveat);
        assert!(actual_diameter(&space("euclidean", &[])).is_err());
    }

    #[test]
    fn round_sphere_is_sharp() {
        let rep = check_myers(&space("sphere", &[]), 1.0, RhoMode::Radial).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.bounds[&BoundId::MyersF], PI);
        assert_eq!(rep.verified_from, ["pole", "antipode"]);
        assert!(rep.margin().unwrap().abs() < 1e-12);
    }

    #[test]
    fn perturbed_spaces_pass() {
        for params in [vec![("f_cos", 0.1)], vec![("eps", 0.1), ("omega", 2.0)]] {
            let name = if params[0].0 == "f_cos" {
                "sphere"
            } else {
                "perturbed_sphere"
            };
            let rep = check_myers(&space(name, &params), 1.0, RhoMode::Radial).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert!(rep.index_form_min >= -1e-8);
        }
    }
}
