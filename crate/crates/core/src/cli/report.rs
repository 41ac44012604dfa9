use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::spec::SpaceSpec;
use crate::comparison::{
    self, check_absolute_volume_negh, check_area_comparison, check_doubling, check_mc_bounded_f,
    check_mc_drift, check_mc_rough, check_volume_comparison, check_volume_r1, doubling_epsilon,
    put, units, CheckConfig, ComparisonReport, Params, PotentialBound, TheoremId, Verdict,
};
use crate::eigen::{
    check_cheng_estimate, model_eigenvalue, smms_radial_eigenvalue, ChengReport, EigenResult,
    DEFAULT_TOL,
};
use crate::global::{check_myers, DiameterReport};
use crate::smms::{RhoMode, WarpedSMMS};
use crate::{Error, Result};

/// What `check` runs: one comparison, both bounded-potential mean
/// curvature ranges, or one of the global/spectral checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Comparison(TheoremId),
    McBoundedF,
    Myers,
    Cheng,
    Eigen,
}

impl Theorem {
    pub fn all_names() -> Vec<&'static str> {
        let mut v: Vec<&'static str> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
        v.extend(["MC_BOUNDED_F", "MYERS", "CHENG", "EIGEN"]);
        v
    }

    fn uses_drift(&self, opts: &CheckOptions) -> bool {
        match self {
            Theorem::Comparison(id) => match id {
                TheoremId::McDrift | TheoremId::AreaB | TheoremId::VolB | TheoremId::VolBAbs => {
                    true
                }
                TheoremId::Doubling => opts.a.is_some() && opts.k.is_none(),
                _ => false,
            },
            Theorem::Cheng | Theorem::Eigen => true,
            _ => false,
        }
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "MC_BOUNDED_F" => Theorem::McBoundedF,
            "MYERS" => Theorem::Myers,
            "CHENG" => Theorem::Cheng,
            "EIGEN" => Theorem::Eigen,
            other => Theorem::Comparison(other.parse().map_err(|_| {
                Error::param(
                    "theorem",
                    format!(
                        "unknown id '{other}', expected one of {}",
                        Theorem::all_names().join(", ")
                    ),
                )
            })?),
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theorem::Comparison(id) => write!(f, "{id}"),
            Theorem::McBoundedF => f.write_str("MC_BOUNDED_F"),
            Theorem::Myers => f.write_str("MYERS"),
            Theorem::Cheng => f.write_str("CHENG"),
            Theorem::Eigen => f.write_str("EIGEN"),
        }
    }
}

/// Numeric settings of a check; unset values get theorem-specific defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub k: Option<f64>,
    pub a: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    pub epsilon: Option<f64>,
    pub l: Option<f64>,
    pub grid: Option<usize>,
    pub mode: RhoMode,
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
}

impl CheckOptions {
    /// Sets a named option; used by sweeps.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "H" => self.h = Some(value),
            "k" => self.k = Some(value),
            "a" => self.a = Some(value),
            "delta" => self.delta = Some(value),
            "alpha" => self.alpha = Some(value),
            "r" => self.r = Some(value),
            "R" => self.big_r = Some(value),
            "epsilon" => self.epsilon = Some(value),
            "l" => self.l = Some(value),
            "grid" => {
                if !(value >= 2.0) || value.fract() != 0.0 {
                    return Err(Error::param(
                        "grid",
                        format!("must be an integer >= 2, got {value}"),
                    ));
                }
                self.grid = Some(value as usize);
            }
            _ => return Err(Error::param(name, "unknown option")),
        }
        Ok(())
    }

    pub const NAMES: [&'static str; 10] = [
        "H", "k", "a", "delta", "alpha", "r", "R", "epsilon", "l", "grid",
    ];

    fn config(&self) -> Result<CheckConfig> {
        let d = CheckConfig::default();
        let cfg = CheckConfig {
            grid_points: self.grid.unwrap_or(d.grid_points),
            mode: self.mode,
            abs_tol: self.tol_abs.unwrap_or(d.abs_tol),
            rel_tol: self.tol_rel.unwrap_or(d.rel_tol),
            refine: true,
            l_override: self.l,
        };
        if cfg.grid_points < 2 {
            return Err(Error::param("grid", "need at least 2 grid points"));
        }
        if !(cfg.abs_tol > 0.0) {
            return Err(Error::param("tol-abs", "must be > 0"));
        }
        if !(cfg.rel_tol >= 0.0) {
            return Err(Error::param("tol-rel", "must be >= 0"));
        }
        Ok(cfg)
    }
}

/// Full result of one check.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CheckDetail {
    Comparison(Box<ComparisonReport>),
    Diameter(Box<DiameterReport>),
    Cheng(Box<ChengReport>),
    Eigen {
        smms: Box<EigenResult>,
        model: Box<EigenResult>,
    },
    Gated {
        reason: String,
    },
}

/// One entry of `checks` in the run report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub theorem_id: String,
    pub params: Params,
    pub min_margin: Option<f64>,
    pub pass: bool,
    pub verdict: Verdict,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_csv_path: Option<String>,
    pub detail: CheckDetail,
}

/// Report written by `check`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub spec: SpaceSpec,
    pub theorem: String,
    pub options: CheckOptions,
    pub checks: Vec<CheckEntry>,
    pub verdict: Verdict,
}

/// FAIL if any check fails, NOT-APPLICABLE if all are gated, else PASS.
pub fn overall_verdict<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Verdict {
    let mut all_gated = true;
    let mut any = false;
    for v in verdicts {
        any = true;
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Pass => all_gated = false,
            Verdict::NotApplicable => {}
        }
    }
    if any && all_gated {
        Verdict::NotApplicable
    } else {
        Verdict::Pass
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::NotApplicable => 3,
    }
}

fn entry_from_comparison(rep: ComparisonReport, ms: f64) -> CheckEntry {
    CheckEntry {
        theorem_id: rep.theorem_id.to_string(),
        params: rep.params.clone(),
        min_margin: rep.min_margin,
        pass: rep.pass,
        verdict: rep.verdict,
        wall_time_ms: ms,
        grid_csv_path: None,
        detail: CheckDetail::Comparison(Box::new(rep)),
    }
}

fn gated(theorem: &str, params: Params, reason: String, ms: f64) -> CheckEntry {
    CheckEntry {
        theorem_id: theorem.to_string(),
        params,
        min_margin: None,
        pass: false,
        verdict: Verdict::NotApplicable,
        wall_time_ms: ms,
        grid_csv_path: None,
        detail: CheckDetail::Gated { reason },
    }
}

fn default_h(spec: &SpaceSpec, opts: &CheckOptions) -> f64 {
    opts.h
        .or_else(|| spec.params.get("H").copied())
        .or_else(|| match spec.name.as_str() {
            "sphere" | "perturbed_sphere" => Some(1.0),
            "hyperbolic" => Some(-1.0),
            _ => None,
        })
        .unwrap_or(0.0)
}

fn range_limit(s: &WarpedSMMS, h: f64, quarter: bool) -> f64 {
    let den = if quarter { 4.0 } else { 2.0 };
    if h > 0.0 {
        (PI / (den * h.sqrt())).min(s.r_max())
    } else {
        s.r_max()
    }
}

/// Runs one theorem on a space. Hypothesis failures become
/// `NOT-APPLICABLE` entries; range and parameter errors are returned.
pub fn execute(spec: &SpaceSpec, theorem: Theorem, opts: &CheckOptions) -> Result<Vec<CheckEntry>> {
    let s = spec.build()?;
    let h = default_h(spec, opts);
    let cfg = opts.config()?;
    let pb = s.potential_bounds();
    let drift = theorem.uses_drift(opts);
    let k = opts.k.unwrap_or(pb.k);
    let a = opts.a.unwrap_or(pb.a);
    let bound = if drift {
        PotentialBound::Drift { a }
    } else {
        PotentialBound::Bounded { k }
    };
    let mut params = comparison::base_params(&s, h);
    bound.record(&mut params);

    let start = Instant::now();
    let elapsed = |t: Instant| t.elapsed().as_secs_f64() * 1e3;
    let result = run(&s, theorem, opts, &cfg, h, bound, &mut params);
    match result {
        Ok(mut entries) => {
            let ms = elapsed(start) / entries.len().max(1) as f64;
            for e in &mut entries {
                e.wall_time_ms = ms;
            }
            Ok(entries)
        }
        Err(Error::Hypothesis(reason)) => Ok(vec![gated(
            &theorem.to_string(),
            params,
            reason,
            elapsed(start),
        )]),
        Err(e) => Err(e),
    }
}

fn run(
    s: &WarpedSMMS,
    theorem: Theorem,
    opts: &CheckOptions,
    cfg: &CheckConfig,
    h: f64,
    bound: PotentialBound,
    params: &mut Params,
) -> Result<Vec<CheckEntry>> {
    let one = |rep: ComparisonReport| Ok(vec![entry_from_comparison(rep, 0.0)]);
    let (k, a) = match bound {
        PotentialBound::Bounded { k } => (k, 0.0),
        PotentialBound::Drift { a } => (0.0, a),
    };
    let quarter = matches!(bound, PotentialBound::Bounded { .. });
    let big_r = opts.big_r.unwrap_or_else(|| range_limit(s, h, quarter));
    let r = opts.r.unwrap_or(big_r / 4.0);
    match theorem {
        Theorem::Comparison(id) => match id {
            TheoremId::McRough => {
                let end = opts.big_r.unwrap_or(s.interior_limit());
                let r0 = opts.r.unwrap_or(end / 4.0);
                one(check_mc_rough(s, h, r0, end, cfg)?)
            }
            TheoremId::McBoundedFInner | TheoremId::McBoundedFPi2 => {
                let reps = check_mc_bounded_f(s, h, k, cfg)?;
                let rep = reps
                    .into_iter()
                    .find(|r| r.theorem_id == id)
                    .ok_or_else(|| {
                        Error::param("H", format!("{id} needs H > 0 and pi/(4 sqrt(H)) < r_max"))
                    })?;
                one(rep)
            }
            TheoremId::McDrift => one(check_mc_drift(s, h, a, cfg)?),
            TheoremId::AreaA | TheoremId::AreaB => {
                one(check_area_comparison(s, h, bound, r, big_r, cfg)?)
            }
            TheoremId::VolA | TheoremId::VolB | TheoremId::VolBAbs => {
                let r = if id == TheoremId::VolBAbs { 0.0 } else { r };
                let reps = check_volume_comparison(s, h, bound, r, big_r, cfg)?;
                let rep = reps
                    .into_iter()
                    .find(|x| x.theorem_id == id)
                    .ok_or_else(|| Error::param("r", format!("{id} needs r > 0")))?;
                one(rep)
            }
            TheoremId::VolR1 => one(check_volume_r1(s, h, bound, big_r, cfg)?),
            TheoremId::VolAbsNegH => {
                let radii = comparison::grid_from_zero(big_r, cfg.grid_points);
                one(check_absolute_volume_negh(s, h, k, &radii, cfg)?)
            }
            TheoremId::Doubling => {
                let alpha = opts.alpha.unwrap_or(2.0);
                let epsilon = match opts.epsilon {
                    Some(e) => e,
                    None => doubling_epsilon(s.n(), bound, h, big_r, alpha)?.epsilon,
                };
                one(check_doubling(s, h, bound, alpha, big_r, epsilon, cfg)?)
            }
        },
        Theorem::McBoundedF => Ok(check_mc_bounded_f(s, h, k, cfg)?
            .into_iter()
            .map(|rep| entry_from_comparison(rep, 0.0))
            .collect()),
        Theorem::Myers => {
            let rep = check_myers(s, h, opts.mode)?;
            let mut p = comparison::base_params(s, h);
            put(&mut p, "k", rep.hypothesis_data.k, units::DIMENSIONLESS);
            put(&mut p, "a", rep.hypothesis_data.a, units::INV_LENGTH);
            put(&mut p, "l", rep.hypothesis_data.l, units::INV_LENGTH);
            if let Some(d) = rep.actual_diameter {
                put(&mut p, "diameter", d, units::LENGTH);
            }
            Ok(vec![CheckEntry {
                theorem_id: "MYERS".into(),
                params: p,
                min_margin: rep.margin(),
                pass: rep.pass,
                verdict: rep.verdict,
                wall_time_ms: 0.0,
                grid_csv_path: None,
                detail: CheckDetail::Diameter(Box::new(rep)),
            }])
        }
        Theorem::Cheng | Theorem::Eigen => {
            let big_r = opts
                .big_r
                .unwrap_or_else(|| range_limit(s, h, false).min(0.5 * s.r_max()));
            put(params, "R", big_r, units::LENGTH);
            if theorem == Theorem::Cheng {
                let delta = opts.delta.unwrap_or(0.1);
                put(params, "delta", delta, units::DIMENSIONLESS);
                let rep = check_cheng_estimate(s, h, a, big_r, delta, opts.mode)?;
                put(params, "epsilon", rep.epsilon.epsilon, units::INV_LENGTH);
                put(params, "l", rep.l, units::INV_LENGTH);
                let applicable = rep.verdict != Verdict::NotApplicable;
                Ok(vec![CheckEntry {
                    theorem_id: "CHENG".into(),
                    params: params.clone(),
                    min_margin: applicable.then_some(rep.margin),
                    pass: rep.pass,
                    verdict: rep.verdict,
                    wall_time_ms: 0.0,
                    grid_csv_path: None,
                    detail: CheckDetail::Cheng(Box::new(rep)),
                }])
            } else {
                let smms = smms_radial_eigenvalue(s, big_r, DEFAULT_TOL)?;
                let model = model_eigenvalue(s.n(), a, h, big_r, DEFAULT_TOL)?;
                put(params, "lambda", smms.lambda, "1/length^2");
                put(params, "lambda_model", model.lambda, "1/length^2");
                let pass = smms.residual <= DEFAULT_TOL && model.residual <= DEFAULT_TOL;
                Ok(vec![CheckEntry {
                    theorem_id: "EIGEN".into(),
                    params: params.clone(),
                    min_margin: None,
                    pass,
                    verdict: if pass { Verdict::Pass } else { Verdict::Fail },
                    wall_time_ms: 0.0,
                    grid_csv_path: None,
                    detail: CheckDetail::Eigen {
                        smms: Box::new(smms),
                        model: Box::new(model),
                    },
                }])
            }
        }
    }
}

/// Writes the grid of an entry as CSV: `r,lhs,rhs,margin` for comparison
/// grids, `r,phi` for eigenfunctions. Returns false when there is no grid.
pub fn write_entry_csv<W: std::io::Write>(entry: &CheckEntry, out: W) -> Result<bool> {
    match &entry.detail {
        CheckDetail::Comparison(rep) if !rep.grid.is_empty() => {
            rep.write_csv(out)?;
            Ok(true)
        }
        CheckDetail::Eigen { smms, .. } => {
            smms.write_csv(out)?;
            Ok(true)
        }
        _ => Ok(false),
    }
}
