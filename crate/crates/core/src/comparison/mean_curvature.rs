use std::f64::consts::PI;

use super::{
    assemble, base_params, grid_between, grid_from_zero, put, units, CheckConfig, ComparisonReport,
    GridPoint, PotentialBound, RigidityCheck, TheoremId,
};
use crate::model::mean_curvature_model;
use crate::smms::WarpedSMMS;
use crate::{Error, Result};

const RIGIDITY_TOL: f64 = 1e-5;
const RIGIDITY_SAMPLES: usize = 64;

/// `∫_0^r ρ` on a grid of positive radii.
fn rho_from_zero(s: &WarpedSMMS, h: f64, cfg: &CheckConfig, grid: &[f64]) -> Result<Vec<f64>> {
    let mut with_zero = Vec::with_capacity(grid.len() + 1);
    with_zero.push(0.0);
    with_zero.extend_from_slice(grid);
    let mut cum = s.cumulative_rho(h, &with_zero, cfg.mode)?;
    cum.remove(0);
    Ok(cum)
}

/// `m_f(r) <= m_f(r0) - (n-1)H (r - r0) + ∫_{r0}^r ρ` for `r0 <= r <= r_end`.
pub fn check_mc_rough(
    s: &WarpedSMMS,
    h: f64,
    r0: f64,
    r_end: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    let limit = s.interior_limit();
    if !(r0 > 0.0) || !(r0 < limit) {
        return Err(Error::Range(format!("r0 = {r0} must lie in (0, {limit})")));
    }
    if !(r_end > r0) || r_end > limit {
        return Err(Error::Range(format!(
            "R = {r_end} must lie in (r0, {limit}]"
        )));
    }
    let nm1 = s.n() as f64 - 1.0;
    let m0 = s.mean_curvature_f(r0)?;
    let mut params = base_params(s, h);
    put(&mut params, "r0", r0, units::LENGTH);
    put(&mut params, "R", r_end, units::LENGTH);

    assemble(TheoremId::McRough, params, cfg, |count| {
        let grid = grid_between(r0, r_end, count);
        let cum = s.cumulative_rho(h, &grid, cfg.mode)?;
        grid.iter()
            .zip(&cum)
            .map(|(&r, &i)| {
                let rhs = m0 - nm1 * h * (r - r0) + i;
                Ok(GridPoint::new(r, s.mean_curvature_f(r)?, rhs))
            })
            .collect()
    })
}

/// Bounded-potential mean curvature estimate, `|f| <= k`.
///
/// Returns the report on `(0, π/(4√H)]` and, for `H > 0`, the report on
/// `[π/(4√H), π/(2√H)]`, each clipped to the interior of the space.
pub fn check_mc_bounded_f(
    s: &WarpedSMMS,
    h: f64,
    k: f64,
    cfg: &CheckConfig,
) -> Result<Vec<ComparisonReport>> {
    PotentialBound::Bounded { k }.verify(s)?;
    let n = s.n() as f64;
    let limit = s.interior_limit();
    let quarter = (h > 0.0).then(|| PI / (4.0 * h.sqrt()));
    let mut params = base_params(s, h);
    put(&mut params, "k", k, units::DIMENSIONLESS);

    let inner_hi = quarter.map_or(limit, |q| q.min(limit));
    let mut inner_params = params.clone();
    put(&mut inner_params, "R", inner_hi, units::LENGTH);
    let inner = assemble(TheoremId::McBoundedFInner, inner_params, cfg, |count| {
        let grid = grid_from_zero(inner_hi, count);
        let cum = rho_from_zero(s, h, cfg, &grid)?;
        grid.iter()
            .zip(&cum)
            .map(|(&r, &i)| {
                let rhs = mean_curvature_model(n + 4.0 * k, h, r)? + i;
                Ok(GridPoint::new(r, s.mean_curvature_f(r)?, rhs))
            })
            .collect()
    })?;
    let mut out = vec![inner];

    if let Some(lo) = quarter.filter(|&q| q < limit) {
        let hi = (2.0 * lo).min(limit);
        let sqrt_h = h.sqrt();
        let base = s.integral_rho(h, lo, cfg.mode)?;
        let mut outer_params = params;
        put(&mut outer_params, "r0", lo, units::LENGTH);
        put(&mut outer_params, "R", hi, units::LENGTH);
        let outer = assemble(TheoremId::McBoundedFPi2, outer_params, cfg, |count| {
            let grid = grid_between(lo, hi, count);
            let cum = s.cumulative_rho(h, &grid, cfg.mode)?;
            grid.iter()
                .zip(&cum)
                .map(|(&r, &i)| {
                    let bump = 2.0 * k * sqrt_h / (sqrt_h * r).sin().powi(2);
                    let rhs = mean_curvature_model(n, h, r)? + bump + base + i;
                    Ok(GridPoint::new(r, s.mean_curvature_f(r)?, rhs))
                })
                .collect()
        })?;
        out.push(outer);
    }
    Ok(out)
}

/// Drift mean curvature estimate, `∂r f >= -a`, on `(0, π/(2√H)]`.
///
/// When equality is attained, the report carries a check that the space is
/// the drift model below the largest equality radius.
pub fn check_mc_drift(
    s: &WarpedSMMS,
    h: f64,
    a: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    PotentialBound::Drift { a }.verify(s)?;
    let n = s.n() as f64;
    let limit = s.interior_limit();
    let hi = if h > 0.0 {
        (PI / (2.0 * h.sqrt())).min(limit)
    } else {
        limit
    };
    let mut params = base_params(s, h);
    put(&mut params, "a", a, units::INV_LENGTH);
    put(&mut params, "R", hi, units::LENGTH);

    let mut report = assemble(TheoremId::McDrift, params, cfg, |count| {
        let grid = grid_from_zero(hi, count);
        let cum = rho_from_zero(s, h, cfg, &grid)?;
        grid.iter()
            .zip(&cum)
            .map(|(&r, &i)| {
                let rhs = mean_curvature_model(n, h, r)? + a + i;
                Ok(GridPoint::new(r, s.mean_curvature_f(r)?, rhs))
            })
            .collect()
    })?;

    if let Some(&r_eq) = report.equality_points.iter().max_by(|x, y| x.total_cmp(y)) {
        report.rigidity = Some(rigidity(s, h, a, r_eq)?);
    }
    Ok(report)
}

fn rigidity(s: &WarpedSMMS, h: f64, a: f64, r_eq: f64) -> Result<RigidityCheck> {
    let r0 = s.pole_offset();
    let nm1 = s.n() as f64 - 1.0;
    let mut curv: f64 = 0.0;
    let mut slope: f64 = 0.0;
    for r in grid_between(r0, r_eq.max(r0), RIGIDITY_SAMPLES) {
        curv = curv.max((s.ricci_radial(r)? / nm1 - h).abs());
        slope = slope.max((s.f().d1(r) + a).abs());
    }
    Ok(RigidityCheck {
        points_checked: RIGIDITY_SAMPLES,
        max_curvature_deviation: curv,
        max_slope_deviation: slope,
        consistent: curv <= RIGIDITY_TOL * h.abs().max(1.0) && slope <= RIGIDITY_TOL * a.max(1.0),
    })
}
