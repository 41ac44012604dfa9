use serde::{Deserialize, Serialize};

use super::volume::{model_volumes, validate_radii};
use super::{
    assemble, base_params, grid_from_zero, put, units, CheckConfig, ComparisonReport, GridPoint,
    GrowthIntegral, PotentialBound, TheoremId,
};
use crate::model::ModelSpace;
use crate::numkit::{refine_bracket, Tolerance};
use crate::smms::WarpedSMMS;
use crate::{Error, Result};

/// Largest `σ` tried when bracketing `F(σ) = ln α`.
pub const SIGMA_CAP: f64 = 1e6;

const ROOT_TOL: Tolerance = Tolerance {
    abs_tol: 1e-14,
    rel_tol: 1e-12,
    max_steps: 500,
};

/// Threshold `ε` below which the excess integral guarantees doubling with
/// constant `α`, together with `F(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingCertificate {
    pub n: usize,
    pub bound: PotentialBound,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(rename = "F_at_epsilon")]
    pub f_at_epsilon: f64,
}

fn setup(n: usize, bound: &PotentialBound, h: f64, big_r: f64) -> Result<GrowthIntegral> {
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(Error::Range(format!("R = {big_r} must be positive")));
    }
    if h > 0.0 {
        let (den, text) = match bound {
            PotentialBound::Bounded { .. } => (4.0, "R exceeds pi/(4 sqrt(H))"),
            PotentialBound::Drift { .. } => (2.0, "R exceeds pi/(2 sqrt(H))"),
        };
        if big_r > std::f64::consts::PI / (den * h.sqrt()) * (1.0 + 1e-12) {
            return Err(Error::Range(text.into()));
        }
    }
    let (model, c) = bound.model(n, h)?;
    Ok(GrowthIntegral::new(model, c))
}

/// `F(σ) = ∫_0^R (e^{c σ t} - 1) A(t)/V(t) dt` for the model fixed by the
/// bound.
pub fn doubling_integral(
    n: usize,
    bound: PotentialBound,
    h: f64,
    big_r: f64,
    sigma: f64,
) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    setup(n, &bound, h, big_r)?.value(sigma, big_r)
}

/// Solves `exp F(ε) = α`, returning the end of the final bracket on the
/// side where `exp F(ε) <= α`.
pub fn doubling_epsilon(
    n: usize,
    bound: PotentialBound,
    h: f64,
    big_r: f64,
    alpha: f64,
) -> Result<DoublingCertificate> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", format!("must be > 1, got {alpha}")));
    }
    let g = setup(n, &bound, h, big_r)?;
    let target = alpha.ln();
    let excess = |sigma: f64| match g.value(sigma, big_r) {
        Ok(v) => v - target,
        Err(_) => f64::INFINITY,
    };

    let mut hi = 1.0;
    let mut f_hi = excess(hi);
    while f_hi < 0.0 {
        hi *= 2.0;
        if hi > SIGMA_CAP {
            return Err(Error::Range(format!(
                "exp F(sigma) stays below alpha for sigma up to {SIGMA_CAP}"
            )));
        }
        f_hi = excess(hi);
    }
    // Overflowing F counts as above target; pull hi back into finite range.
    let mut lo = hi / 2.0;
    if hi == 1.0 {
        lo = 0.0;
    }
    while !f_hi.is_finite() {
        let mid = 0.5 * (lo + hi);
        let f_mid = excess(mid);
        if f_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let b = refine_bracket(excess, lo, hi, &ROOT_TOL)?;
    let epsilon = if b.f_hi <= 0.0 { b.hi } else { b.lo };
    Ok(DoublingCertificate {
        n,
        bound,
        h,
        big_r,
        alpha,
        epsilon,
        f_at_epsilon: g.value(epsilon, big_r)?,
    })
}

/// `V_f(r2)/V_f(r1) <= α V(r2)/V(r1)` over pairs `0 < r1 < r2 <= R`.
///
/// The estimate needs `∫_0^R ρ <= ε`; otherwise the report is
/// `NOT-APPLICABLE`. Pairs are ordered by `r2`, then `r1`.
pub fn check_doubling(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    alpha: f64,
    big_r: f64,
    epsilon: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    if !(alpha > 1.0) {
        return Err(Error::param("alpha", format!("must be > 1, got {alpha}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::param(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    bound.verify(s)?;
    validate_radii(s, h, &bound, 0.0, big_r, true)?;
    let (model, _) = bound.model(s.n(), h)?;
    let l = cfg.excess(s, h, big_r)?;
    let mut params = base_params(s, h);
    bound.record(&mut params);
    put(&mut params, "alpha", alpha, units::DIMENSIONLESS);
    put(&mut params, "epsilon", epsilon, units::INV_LENGTH);
    put(&mut params, "l", l, units::INV_LENGTH);
    put(&mut params, "R", big_r, units::LENGTH);
    if l > epsilon {
        return Ok(ComparisonReport::not_applicable(
            TheoremId::Doubling,
            params,
            cfg.mode,
            format!("excess integral l = {l} exceeds epsilon = {epsilon}"),
        ));
    }
    assemble(TheoremId::Doubling, params, cfg, |count| {
        pairs(s, &model, alpha, big_r, count)
    })
}

fn pairs(
    s: &WarpedSMMS,
    model: &ModelSpace,
    alpha: f64,
    big_r: f64,
    count: usize,
) -> Result<Vec<GridPoint>> {
    let radii = grid_from_zero(big_r, (count / 8).max(8));
    let vf = s.cumulative_volume(&radii)?;
    let vm = model_volumes(model, &radii)?;
    let mut out = Vec::with_capacity(radii.len() * (radii.len() - 1) / 2);
    for j in 1..radii.len() {
        for i in 0..j {
            out.push(GridPoint::pair(
                radii[i],
                radii[j],
                vf[j] / vf[i],
                alpha * vm[j] / vm[i],
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::Verdict;
    use crate::smms::make_space;
    use std::collections::BTreeMap;

    #[test]
    fn f_vanishes_at_zero() {
        for bound in [
            PotentialBound::Bounded { k: 0.3 },
            PotentialBound::Drift { a: 0.5 },
        ] {
            assert_eq!(doubling_integral(3, bound, 0.0, 1.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn epsilon_inverts_f() {
        for (bound, alpha) in [
            (PotentialBound::Bounded { k: 0.0 }, 4.0),
            (PotentialBound::Drift { a: 0.5 }, 2.0),
            (PotentialBound::Drift { a: 0.5 }, 4.0),
        ] {
            let c = doubling_epsilon(3, bound, 0.0, 1.0, alpha).unwrap();
            assert!((c.f_at_epsilon.exp() - alpha).abs() < 1e-10, "{c:?}");
            assert!(c.f_at_epsilon.exp() <= alpha + 1e-10);
        }
    }

    #[test]
    fn epsilon_is_monotone_in_alpha() {
        let b = PotentialBound::Bounded { k: 0.1 };
        let eps: Vec<f64> = [1.5, 2.0, 4.0, 8.0]
            .iter()
            .map(|&a| doubling_epsilon(3, b, 1.0, 0.7, a).unwrap().epsilon)
            .collect();
        assert!(eps.windows(2).all(|w| w[0] <= w[1]), "{eps:?}");
    }

    #[test]
    fn gate_and_model_margins() {
        let flat = make_space("euclidean", 3, &BTreeMap::new()).unwrap();
        let cfg = CheckConfig::default();
        let b = PotentialBound::Bounded { k: 0.0 };
        let rep = check_doubling(&flat, 1.0, b, 2.0, 0.5, 0.1, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
        assert!(rep.min_margin.is_none());

        let rep = check_doubling(&flat, 0.0, b, 2.0, 3.0, 0.0, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.grid.iter().all(|p| p.margin > 0.0));
    }
}
