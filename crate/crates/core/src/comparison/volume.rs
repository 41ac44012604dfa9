use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    assemble, base_params, grid_between, grid_from_zero, put, units, CheckConfig, ComparisonReport,
    GridPoint, GrowthIntegral, PotentialBound, TheoremId,
};
use crate::model::{sn, ModelSpace, MODEL_TOL};
use crate::numkit::{cumulative_quad, sphere_area};
use crate::smms::WarpedSMMS;
use crate::{Error, Result};

/// Validates `0 <= r <= R` against the space and the range of the estimate.
pub(crate) fn validate_radii(
    s: &WarpedSMMS,
    h: f64,
    bound: &PotentialBound,
    r: f64,
    big_r: f64,
    inner_may_vanish: bool,
) -> Result<()> {
    let inner_ok = if inner_may_vanish { r >= 0.0 } else { r > 0.0 };
    if !inner_ok || !r.is_finite() {
        return Err(Error::Range(format!("r = {r} must be positive")));
    }
    if !(big_r >= r) || !(big_r > 0.0) {
        return Err(Error::Range(format!(
            "R = {big_r} must satisfy R >= r = {r}"
        )));
    }
    if big_r > s.r_max() {
        return Err(Error::Range(format!("R exceeds r_max = {}", s.r_max())));
    }
    if h > 0.0 {
        let (den, text) = match bound {
            PotentialBound::Bounded { .. } => (4.0, "R exceeds pi/(4 sqrt(H))"),
            PotentialBound::Drift { .. } => (2.0, "R exceeds pi/(2 sqrt(H))"),
        };
        if big_r > PI / (den * h.sqrt()) * (1.0 + 1e-12) {
            return Err(Error::Range(text.into()));
        }
    }
    Ok(())
}

pub(crate) fn model_volumes(model: &ModelSpace, grid: &[f64]) -> Result<Vec<f64>> {
    let Some(&first) = grid.first() else {
        return Ok(Vec::new());
    };
    let base = model.volume(first)?;
    let rest = cumulative_quad(|t| model.area(t).unwrap_or(f64::NAN), grid, &MODEL_TOL)?;
    Ok(rest.into_iter().map(|v| base + v).collect())
}

fn record(params: &mut super::Params, bound: &PotentialBound, c: f64, l: f64) {
    bound.record(params);
    put(params, "l", l, units::INV_LENGTH);
    if let PotentialBound::Bounded { .. } = bound {
        put(params, "c", c, units::DIMENSIONLESS);
    }
}

/// `A_f(R')/A(R') <= e^{c R' l} A_f(r)/A(r)` for `R'` in `[r, R]`, with the
/// model and `c` fixed by the potential bound. `l = ∫_0^R ρ`.
pub fn check_area_comparison(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    r: f64,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    bound.verify(s)?;
    validate_radii(s, h, &bound, r, big_r, false)?;
    let (model, c) = bound.model(s.n(), h)?;
    let l = cfg.excess(s, h, big_r)?;
    let id = match bound {
        PotentialBound::Bounded { .. } => TheoremId::AreaA,
        PotentialBound::Drift { .. } => TheoremId::AreaB,
    };
    let mut params = base_params(s, h);
    record(&mut params, &bound, c, l);
    put(&mut params, "r", r, units::LENGTH);
    put(&mut params, "R", big_r, units::LENGTH);
    let base = s.weighted_area(r)? / model.area(r)?;

    assemble(id, params, cfg, |count| {
        grid_between(r, big_r, count)
            .into_iter()
            .map(|rr| {
                let lhs = s.weighted_area(rr)? / model.area(rr)?;
                let rhs = (c * rr * l).exp() * base;
                Ok(GridPoint::new(rr, lhs, rhs))
            })
            .collect()
    })
}

fn growth(s: &WarpedSMMS, h: f64, bound: &PotentialBound) -> Result<GrowthIntegral> {
    let (model, c) = bound.model(s.n(), h)?;
    Ok(GrowthIntegral::new(model, c))
}

#[allow(clippy::too_many_arguments)]
fn volume_ratio(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    r: f64,
    big_r: f64,
    cfg: &CheckConfig,
    id: TheoremId,
    absolute: bool,
) -> Result<ComparisonReport> {
    let g = growth(s, h, &bound)?;
    let model = *g.model();
    let l = cfg.excess(s, h, big_r)?;
    let mut params = base_params(s, h);
    record(&mut params, &bound, g.scale(), l);
    put(&mut params, "r", r, units::LENGTH);
    put(&mut params, "R", big_r, units::LENGTH);
    let base = s.weighted_volume(r)? / model.volume(r)?;

    assemble(id, params, cfg, |count| {
        let grid = grid_between(r, big_r, count);
        let vf = s.cumulative_volume(&grid)?;
        let vm = model_volumes(&model, &grid)?;
        let phi = g.cumulative(l, &grid)?;
        Ok((0..grid.len())
            .map(|i| {
                if absolute {
                    GridPoint::new(grid[i], vf[i], base * vm[i] * phi[i].exp())
                } else {
                    GridPoint::new(grid[i], vf[i] / vm[i], base * phi[i].exp())
                }
            })
            .collect())
    })
}

fn volume_absolute_drift(
    s: &WarpedSMMS,
    h: f64,
    a: f64,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    let bound = PotentialBound::Drift { a };
    let g = growth(s, h, &bound)?;
    let model = *g.model();
    let l = cfg.excess(s, h, big_r)?;
    let f0 = s.f().eval(0.0);
    let mut params = base_params(s, h);
    record(&mut params, &bound, 1.0, l);
    put(&mut params, "R", big_r, units::LENGTH);

    assemble(TheoremId::VolBAbs, params, cfg, |count| {
        let grid = grid_from_zero(big_r, count);
        let vf = s.cumulative_volume(&grid)?;
        let vm = model_volumes(&model, &grid)?;
        let phi = g.cumulative(l, &grid)?;
        Ok((0..grid.len())
            .map(|i| GridPoint::new(grid[i], vf[i], vm[i] * (phi[i] - f0).exp()))
            .collect())
    })
}

/// Volume ratio estimate for `R'` in `[r, R]`:
/// `V_f(R')/V(R') <= V_f(r)/V(r) exp Φ(R')`, `Φ(R') = ∫_0^{R'} (e^{c l t} - 1) A/V`.
///
/// Bounded potentials give `VOL_A`. Drift bounds give `VOL_B` and the
/// absolute form `VOL_B_ABS`; with `r = 0` only the absolute form is checked.
pub fn check_volume_comparison(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    r: f64,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<Vec<ComparisonReport>> {
    bound.verify(s)?;
    match bound {
        PotentialBound::Bounded { .. } => {
            validate_radii(s, h, &bound, r, big_r, false)?;
            Ok(vec![volume_ratio(
                s,
                h,
                bound,
                r,
                big_r,
                cfg,
                TheoremId::VolA,
                false,
            )?])
        }
        PotentialBound::Drift { a } => {
            validate_radii(s, h, &bound, r, big_r, true)?;
            let mut out = Vec::new();
            if r > 0.0 {
                out.push(volume_ratio(
                    s,
                    h,
                    bound,
                    r,
                    big_r,
                    cfg,
                    TheoremId::VolB,
                    false,
                )?);
            }
            out.push(volume_absolute_drift(s, h, a, big_r, cfg)?);
            Ok(out)
        }
    }
}

/// The ratio estimate anchored at `r = 1`, stated for volumes:
/// `V_f(R') <= V_f(1)/V(1) · V(R') exp Φ(R')` for `R'` in `[1, R]`.
pub fn check_volume_r1(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    bound.verify(s)?;
    if big_r < 1.0 {
        return Err(Error::Range(format!("R = {big_r} must be >= 1")));
    }
    validate_radii(s, h, &bound, 1.0, big_r, false)?;
    volume_ratio(s, h, bound, 1.0, big_r, cfg, TheoremId::VolR1, true)
}

/// Absolute volume bound for `H < 0` and `|f| <= k`:
/// `V_f(R)/|S^{n-1}| <= e^{3k} ∫_0^R sn^{n-1}(t) e^{cosh(2√-H t) + l t} dt`.
pub fn check_absolute_volume_negh(
    s: &WarpedSMMS,
    h: f64,
    k: f64,
    radii: &[f64],
    cfg: &CheckConfig,
) -> Result<ComparisonReport> {
    if !(h < 0.0) {
        return Err(Error::Range(format!("H = {h} must be negative")));
    }
    let bound = PotentialBound::Bounded { k };
    bound.verify(s)?;
    if radii.is_empty() {
        return Err(Error::Range("empty radius grid".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Range("radii must be positive and increasing".into()));
    }
    let top = *radii.last().unwrap();
    if top > s.r_max() {
        return Err(Error::Range(format!("R exceeds r_max = {}", s.r_max())));
    }
    let l = cfg.excess(s, h, top)?;
    let n = s.n() as f64;
    let omega = sphere_area(n)?;
    let root = (-h).sqrt();
    let mut params = base_params(s, h);
    record(&mut params, &bound, 0.0, l);
    params.remove("c");
    put(&mut params, "R", top, units::LENGTH);

    let once = CheckConfig {
        refine: false,
        ..*cfg
    };
    assemble(TheoremId::VolAbsNegH, params, &once, |_| {
        let vf = s.cumulative_volume(radii)?;
        let mut grid = Vec::with_capacity(radii.len() + 1);
        grid.push(0.0);
        grid.extend_from_slice(radii);
        let integrand = |t: f64| sn(h, t).powf(n - 1.0) * ((2.0 * root * t).cosh() + l * t).exp();
        let cum = cumulative_quad(integrand, &grid, &MODEL_TOL)?;
        let scale = (3.0 * k).exp();
        Ok(radii
            .iter()
            .enumerate()
            .map(|(i, &r)| GridPoint::new(r, vf[i] / omega, scale * cum[i + 1]))
            .collect())
    })
}

/// `V_f(r)/V(r) · exp(-Φ(r))` on `(0, R]`; nonincreasing whenever the
/// differential form of the volume estimate holds.
pub fn normalized_volume_profile(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<Vec<(f64, f64)>> {
    bound.verify(s)?;
    validate_radii(s, h, &bound, 0.0, big_r, true)?;
    let g = growth(s, h, &bound)?;
    let model = *g.model();
    let l = cfg.excess(s, h, big_r)?;
    let grid = grid_from_zero(big_r, cfg.grid_points);
    let vf = s.cumulative_volume(&grid)?;
    let vm = model_volumes(&model, &grid)?;
    let phi = g.cumulative(l, &grid)?;
    Ok((0..grid.len())
        .map(|i| (grid[i], vf[i] / vm[i] * (-phi[i]).exp()))
        .collect())
}

/// Area and volume reports for the same data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Consistency {
    pub area: ComparisonReport,
    pub volume: ComparisonReport,
    /// False only when the area check passes and the volume check fails.
    pub implication_holds: bool,
}

pub fn area_volume_consistency(
    s: &WarpedSMMS,
    h: f64,
    bound: PotentialBound,
    r: f64,
    big_r: f64,
    cfg: &CheckConfig,
) -> Result<Consistency> {
    let area = check_area_comparison(s, h, bound, r, big_r, cfg)?;
    let volume = check_volume_comparison(s, h, bound, r, big_r, cfg)?.remove(0);
    let implication_holds = !area.pass || volume.pass;
    Ok(Consistency {
        area,
        volume,
        implication_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::Verdict;
    use crate::smms::make_space;
    use std::collections::BTreeMap;

    fn space(name: &str, params: &[(&str, f64)]) -> WarpedSMMS {
        let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_space(name, 3, &map).unwrap()
    }

    #[test]
    fn area_on_flat_space_uses_l_to_r() {
        let s = space("euclidean", &[]);
        let rep = check_area_comparison(
            &s,
            1.0,
            PotentialBound::Bounded { k: 0.0 },
            0.2,
            0.6,
            &CheckConfig::default(),
        )
        .unwrap();
        assert!((rep.params["l"].value - 1.2).abs() < 1e-9);
        assert!(rep.pass);
    }

    #[test]
    fn area_range_error() {
        let s = space("sphere", &[]);
        let err = check_area_comparison(
            &s,
            1.0,
            PotentialBound::Bounded { k: 0.0 },
            0.2,
            1.0,
            &CheckConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "R exceeds pi/(4 sqrt(H))");
    }

    #[test]
    fn volume_on_model_is_equality() {
        let s = space("sphere", &[]);
        let reps = check_volume_comparison(
            &s,
            1.0,
            PotentialBound::Bounded { k: 0.0 },
            0.1,
            PI / 4.0,
            &CheckConfig::default(),
        )
        .unwrap();
        assert_eq!(reps[0].verdict, Verdict::Pass);
        assert!(reps[0].min_margin.unwrap().abs() < 1e-9);
        assert!(reps[0].refined);
    }

    #[test]
    fn drift_volume_forms() {
        let s = space("linear_drift", &[("a", 0.5)]);
        let reps = check_volume_comparison(
            &s,
            0.0,
            PotentialBound::Drift { a: 0.5 },
            0.5,
            3.0,
            &CheckConfig::default(),
        )
        .unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[1].theorem_id, TheoremId::VolBAbs);
        for rep in &reps {
            assert!(rep.pass, "{} {:?}", rep.theorem_id, rep.min_margin);
            assert!(rep.min_margin.unwrap().abs() <= rep.tolerance);
        }
    }

    #[test]
    fn perturbed_sphere_volume_passes() {
        let s = space("perturbed_sphere", &[("eps", 0.05), ("omega", 3.0)]);
        let cfg = CheckConfig::default();
        let b = PotentialBound::Bounded { k: 0.0 };
        let c = area_volume_consistency(&s, 1.0, b, 0.2, PI / 4.0, &cfg).unwrap();
        assert!(c.area.pass && c.volume.pass && c.implication_holds);
        let prof = normalized_volume_profile(&s, 1.0, b, PI / 4.0, &cfg).unwrap();
        for w in prof.windows(2) {
            assert!(w[1].1 <= w[0].1 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn hyperbolic_absolute_volume() {
        let s = space("hyperbolic", &[]);
        let rep = check_absolute_volume_negh(
            &s,
            -1.0,
            0.0,
            &[0.5, 1.0, 2.0, 3.0],
            &CheckConfig::default(),
        )
        .unwrap();
        assert!(rep.pass);
        assert!(rep.min_margin.unwrap() > 0.0);
    }

    #[test]
    fn r1_form() {
        let s = space("euclidean", &[]);
        let rep = check_volume_r1(
            &s,
            0.0,
            PotentialBound::Bounded { k: 0.0 },
            4.0,
            &CheckConfig::default(),
        )
        .unwrap();
        assert!(rep.pass);
        assert!(check_volume_r1(
            &s,
            0.0,
            PotentialBound::Bounded { k: 0.0 },
            0.5,
            &CheckConfig::default()
        )
        .is_err());
    }
}
