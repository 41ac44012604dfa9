//! Grid verification of the weighted comparison inequalities.
//!
//! Every check evaluates both sides of one inequality on a grid inside the
//! admissible range and reports `margin = rhs - lhs` per point. A check
//! passes when the smallest margin is at least `-max(abs_tol, rel_tol·|rhs|)`
//! at the minimizing point; near-equality triggers one ×4 refinement.

mod doubling;
mod growth;
mod mean_curvature;
mod volume;

pub use doubling::{check_doubling, doubling_epsilon, doubling_integral, DoublingCertificate};
pub use growth::GrowthIntegral;
pub use mean_curvature::{check_mc_bounded_f, check_mc_drift, check_mc_rough};
pub use volume::{
    area_volume_consistency, check_absolute_volume_negh, check_area_comparison,
    check_volume_comparison, check_volume_r1, normalized_volume_profile, Consistency,
};

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{c_const, ModelSpace};
use crate::smms::{RhoMode, WarpedSMMS};
use crate::{Error, Result};

/// Identifier of a comparison inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "MC_ROUGH")]
    McRough,
    #[serde(rename = "MC_BOUNDED_F_INNER")]
    McBoundedFInner,
    #[serde(rename = "MC_BOUNDED_F_PI2")]
    McBoundedFPi2,
    #[serde(rename = "MC_DRIFT")]
    McDrift,
    #[serde(rename = "AREA_A")]
    AreaA,
    #[serde(rename = "AREA_B")]
    AreaB,
    #[serde(rename = "VOL_A")]
    VolA,
    #[serde(rename = "VOL_B")]
    VolB,
    #[serde(rename = "VOL_B_ABS")]
    VolBAbs,
    #[serde(rename = "VOL_ABS_NEGH")]
    VolAbsNegH,
    #[serde(rename = "DOUBLING")]
    Doubling,
    #[serde(rename = "VOL_R1")]
    VolR1,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::McRough,
        TheoremId::McBoundedFInner,
        TheoremId::McBoundedFPi2,
        TheoremId::McDrift,
        TheoremId::AreaA,
        TheoremId::AreaB,
        TheoremId::VolA,
        TheoremId::VolB,
        TheoremId::VolBAbs,
        TheoremId::VolAbsNegH,
        TheoremId::Doubling,
        TheoremId::VolR1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::McRough => "MC_ROUGH",
            TheoremId::McBoundedFInner => "MC_BOUNDED_F_INNER",
            TheoremId::McBoundedFPi2 => "MC_BOUNDED_F_PI2",
            TheoremId::McDrift => "MC_DRIFT",
            TheoremId::AreaA => "AREA_A",
            TheoremId::AreaB => "AREA_B",
            TheoremId::VolA => "VOL_A",
            TheoremId::VolB => "VOL_B",
            TheoremId::VolBAbs => "VOL_B_ABS",
            TheoremId::VolAbsNegH => "VOL_ABS_NEGH",
            TheoremId::Doubling => "DOUBLING",
            TheoremId::VolR1 => "VOL_R1",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::param("theorem", format!("unknown comparison id '{s}'")))
    }
}

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

/// A number with its unit tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Quantity {
            value,
            unit: unit.to_string(),
        }
    }
}

/// Unit tags.
pub mod units {
    pub const DIMENSIONLESS: &str = "1";
    pub const LENGTH: &str = "length";
    pub const INV_LENGTH: &str = "1/length";
    pub const CURVATURE: &str = "1/length^2";
}

/// Named parameters of a report, each with a unit.
pub type Params = BTreeMap<String, Quantity>;

pub(crate) fn put(params: &mut Params, name: &str, value: f64, unit: &str) {
    params.insert(name.to_string(), Quantity::new(value, unit));
}

/// Hypothesis on the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialBound {
    /// `|f| <= k`.
    Bounded { k: f64 },
    /// `∂r f >= -a`.
    Drift { a: f64 },
}

impl PotentialBound {
    /// The model whose area and volume enter the estimate, with the growth
    /// constant in front of `l`.
    pub fn model(&self, n: usize, h: f64) -> Result<(ModelSpace, f64)> {
        match *self {
            PotentialBound::Bounded { k } => {
                let c = c_const(n, k, h)?;
                Ok((ModelSpace::new(n as f64 + 4.0 * k, h, 0.0)?, c))
            }
            PotentialBound::Drift { a } => Ok((ModelSpace::new(n as f64, h, a)?, 1.0)),
        }
    }

    /// Checks the hypothesis against the space.
    pub fn verify(&self, s: &WarpedSMMS) -> Result<()> {
        let pb = s.potential_bounds();
        match *self {
            PotentialBound::Bounded { k } => {
                if !(k >= 0.0) {
                    return Err(Error::param("k", format!("must be >= 0, got {k}")));
                }
                if k < pb.k - 1e-12 * pb.k.max(1.0) {
                    return Err(Error::Hypothesis(format!(
                        "k = {k} is below sup|f| = {}",
                        pb.k
                    )));
                }
            }
            PotentialBound::Drift { a } => {
                if !(a >= 0.0) {
                    return Err(Error::param("a", format!("must be >= 0, got {a}")));
                }
                if a < pb.a - 1e-12 * pb.a.max(1.0) {
                    return Err(Error::Hypothesis(format!(
                        "a = {a} is below max(0, -min f') = {}",
                        pb.a
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn record(&self, params: &mut Params) {
        match *self {
            PotentialBound::Bounded { k } => put(params, "k", k, units::DIMENSIONLESS),
            PotentialBound::Drift { a } => put(params, "a", a, units::INV_LENGTH),
        }
    }
}

/// Grid size, tolerance and excess-mode settings shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub grid_points: usize,
    pub mode: RhoMode,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub refine: bool,
    /// Replaces the excess constant `l` computed from the space.
    pub l_override: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            grid_points: 256,
            mode: RhoMode::Radial,
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            refine: true,
            l_override: None,
        }
    }
}

impl CheckConfig {
    pub fn tolerance_for(&self, rhs: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * rhs.abs())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::param("grid", "need at least 2 grid points"));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::param("tol", "tolerances must be positive"));
        }
        if let Some(l) = self.l_override {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::param("l", format!("must be >= 0, got {l}")));
            }
        }
        Ok(())
    }

    pub(crate) fn excess(&self, s: &WarpedSMMS, h: f64, upper: f64) -> Result<f64> {
        match self.l_override {
            Some(l) => Ok(l),
            None => s.integral_rho(h, upper, self.mode),
        }
    }
}

/// One row of a report grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Radius, or the outer radius of a pair.
    pub r: f64,
    /// Inner radius of a pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_inner: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl GridPoint {
    pub fn new(r: f64, lhs: f64, rhs: f64) -> Self {
        GridPoint {
            r,
            r_inner: None,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    pub fn pair(r_inner: f64, r: f64, lhs: f64, rhs: f64) -> Self {
        GridPoint {
            r_inner: Some(r_inner),
            ..GridPoint::new(r, lhs, rhs)
        }
    }
}

/// Cross-check of the equality case of the drift estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidityCheck {
    pub points_checked: usize,
    /// `max |Ric(∂r,∂r)/(n-1) - H|` below the equality radius.
    pub max_curvature_deviation: f64,
    /// `max |f' + a|` below the equality radius.
    pub max_slope_deviation: f64,
    pub consistent: bool,
}

/// Result of one comparison check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub theorem_id: TheoremId,
    pub params: Params,
    pub rho_mode: RhoMode,
    pub grid: Vec<GridPoint>,
    pub min_margin: Option<f64>,
    pub argmin_r: Option<f64>,
    pub pass: bool,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub equality_points: Vec<f64>,
    pub refined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<RigidityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ComparisonReport {
    /// A gated report: the hypothesis of the estimate does not hold.
    pub fn not_applicable(
        theorem_id: TheoremId,
        params: Params,
        mode: RhoMode,
        reason: String,
    ) -> Self {
        ComparisonReport {
            theorem_id,
            params,
            rho_mode: mode,
            grid: Vec::new(),
            min_margin: None,
            argmin_r: None,
            pass: false,
            tolerance: 0.0,
            verdict: Verdict::NotApplicable,
            equality_points: Vec::new(),
            refined: false,
            rigidity: None,
            notes: vec![reason],
        }
    }

    /// Writes the grid as CSV with header `r,lhs,rhs,margin`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_grid_csv(&self.grid, out)
    }
}

/// Writes grid rows as CSV with header `r,lhs,rhs,margin`.
pub fn write_grid_csv<W: Write>(grid: &[GridPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "lhs", "rhs", "margin"])?;
    for p in grid {
        w.write_record(&[
            p.r.to_string(),
            p.lhs.to_string(),
            p.rhs.to_string(),
            p.margin.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn worst(points: &[GridPoint]) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.margin.total_cmp(&b.1.margin))
        .map(|(i, _)| i)
}

/// Evaluates a grid, refines once on near-equality and assembles the report.
pub(crate) fn assemble<E>(
    theorem_id: TheoremId,
    params: Params,
    cfg: &CheckConfig,
    mut eval: E,
) -> Result<ComparisonReport>
where
    E: FnMut(usize) -> Result<Vec<GridPoint>>,
{
    cfg.validate()?;
    let mut points = eval(cfg.grid_points)?;
    let mut refined = false;
    let Some(mut idx) = worst(&points) else {
        return Err(Error::Range(format!("{theorem_id}: empty admissible grid")));
    };
    let tol = cfg.tolerance_for(points[idx].rhs);
    if cfg.refine && points[idx].margin.abs() < 10.0 * tol {
        let finer = eval(4 * cfg.grid_points)?;
        if let Some(i) = worst(&finer) {
            points = finer;
            idx = i;
            refined = true;
        }
    }
    if points
        .iter()
        .any(|p| !p.lhs.is_finite() || p.rhs.is_nan() || p.rhs == f64::NEG_INFINITY)
    {
        return Err(Error::Domain(format!(
            "{theorem_id}: non-finite margin on the grid"
        )));
    }
    let mut notes = Vec::new();
    if let Some(p) = points.iter().find(|p| p.rhs == f64::INFINITY) {
        notes.push(format!(
            "right-hand side overflows from r = {}; the bound is vacuous there",
            p.r
        ));
    }
    let min_margin = points[idx].margin;
    let tolerance = cfg.tolerance_for(points[idx].rhs);
    let pass = min_margin >= -tolerance;
    let equality_points = points
        .iter()
        .filter(|p| p.margin.abs() < cfg.tolerance_for(p.rhs))
        .map(|p| p.r)
        .collect();
    Ok(ComparisonReport {
        theorem_id,
        params,
        rho_mode: cfg.mode,
        argmin_r: Some(points[idx].r),
        grid: points,
        min_margin: Some(min_margin),
        pass,
        tolerance,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        equality_points,
        refined,
        rigidity: None,
        notes,
    })
}

/// `count` points `hi·i/count`, `i = 1..=count`.
pub(crate) fn grid_from_zero(hi: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| hi * i as f64 / count as f64).collect()
}

/// `count` points from `lo` to `hi` inclusive.
pub(crate) fn grid_between(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

pub(crate) fn base_params(s: &WarpedSMMS, h: f64) -> Params {
    let mut p = Params::new();
    put(&mut p, "n", s.n() as f64, units::DIMENSIONLESS);
    put(&mut p, "H", h, units::CURVATURE);
    p
}
