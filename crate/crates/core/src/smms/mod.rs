//! Rotationally symmetric smooth metric measure spaces.
//!
//! A space is the warped product `dr² + w(r)² g_{S^{n-1}}` on `[0, r_max]`
//! with a radial potential `f` and measure `e^{-f} dv`. Curvature and
//! measure quantities are evaluated along the radial geodesics from the
//! pole `r = 0`.

mod catalog;
mod profile;

pub use catalog::{catalog_entries, make_space, CatalogEntry, ParamSchema};
pub use profile::{ProfileSpec, RadialProfile};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numkit::{cumulative_quad, quad_adaptive, sphere_area, Tolerance};
use crate::{Error, Result};

/// Tolerance for integrals of the curvature excess.
pub const RHO_TOL: Tolerance = Tolerance {
    abs_tol: 1e-12,
    rel_tol: 1e-10,
    max_steps: 200_000,
};

/// Tolerance for weighted volumes.
pub const VOLUME_TOL: Tolerance = Tolerance::fine();

/// Which eigenvalue of the Bakry-Émery tensor enters the excess `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoMode {
    /// Only `Ric_f(∂r, ∂r)`.
    #[default]
    Radial,
    /// The smallest eigenvalue over radial and tangential directions.
    Full,
}

impl fmt::Display for RhoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoMode::Radial => "radial",
            RhoMode::Full => "full",
        })
    }
}

impl FromStr for RhoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(RhoMode::Radial),
            "full" => Ok(RhoMode::Full),
            other => Err(Error::param(
                "mode",
                format!("expected radial|full, got '{other}'"),
            )),
        }
    }
}

/// Sup-norm data of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialBounds {
    /// `max |f|`.
    pub k: f64,
    /// `max(0, -min f')`.
    pub a: f64,
    /// `max |f'|`.
    pub grad_sup: f64,
    /// Number of grid points of the final refinement level.
    pub grid_points: usize,
}

/// All radial quantities at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub r: f64,
    pub ric_radial: f64,
    pub ric_f_radial: f64,
    pub lambda_min: f64,
    pub m: f64,
    pub m_f: f64,
    pub rho: f64,
    pub rho_integral: f64,
}

/// Warped product with radial potential.
#[derive(Debug, Clone)]
pub struct WarpedSMMS {
    n: usize,
    w: RadialProfile,
    f: RadialProfile,
    r_max: f64,
    closed: bool,
    label: String,
}

impl WarpedSMMS {
    /// Builds a space and checks the smooth-pole and closing conditions.
    pub fn new(
        n: usize,
        w: RadialProfile,
        f: RadialProfile,
        r_max: f64,
        closed: bool,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpace(format!(
                "dimension must be >= 2, got {n}"
            )));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidSpace(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        let step = (1e-4 * r_max).max(1e-6);
        let s = WarpedSMMS {
            n,
            w: w.with_step(step),
            f: f.with_step(step),
            r_max,
            closed,
            label: "custom".into(),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let w = &self.w;
        let slope_tol = if w.is_analytic() { 1e-8 } else { 1e-6 };
        if w.eval(0.0).abs() > 1e-8 {
            return Err(Error::InvalidSpace(format!(
                "w(0) = {} is not 0",
                w.eval(0.0)
            )));
        }
        if (w.d1(0.0) - 1.0).abs() > slope_tol {
            return Err(Error::InvalidSpace(format!(
                "w'(0) = {} is not 1",
                w.d1(0.0)
            )));
        }
        let samples = 1024;
        for i in 1..samples {
            let r = self.r_max * i as f64 / samples as f64;
            let wr = w.eval(r);
            if !(wr > 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "w({r}) = {wr} is not positive"
                )));
            }
            let vals = [w.d1(r), w.d2(r), self.f.eval(r), self.f.d1(r), self.f.d2(r)];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "profiles are not finite at r = {r}"
                )));
            }
        }
        if self.closed {
            let end = w.eval(self.r_max);
            if end.abs() > 1e-8 {
                return Err(Error::InvalidSpace(format!(
                    "closed space needs w(r_max) = 0, got {end}"
                )));
            }
            let slope = w.d1(self.r_max);
            if (slope + 1.0).abs() > slope_tol {
                return Err(Error::InvalidSpace(format!(
                    "closed space needs w'(r_max) = -1, got {slope}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same metric with `extra` added to the potential.
    pub fn with_added_potential(&self, extra: &RadialProfile) -> Result<Self> {
        let f = self.f.plus(extra);
        Ok(
            WarpedSMMS::new(self.n, self.w.clone(), f, self.r_max, self.closed)?
                .with_label(self.label.clone()),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &RadialProfile {
        &self.w
    }

    pub fn f(&self) -> &RadialProfile {
        &self.f
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Offset `r₀` below which curvature is read off at `r₀`.
    pub fn pole_offset(&self) -> f64 {
        1e-6 * self.r_max
    }

    /// Largest radius at which open-interval quantities may be evaluated.
    pub fn interior_limit(&self) -> f64 {
        self.r_max - self.pole_offset()
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    fn curvature_radius(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
        }
        if r > self.r_max || (!self.closed && r >= self.r_max) {
            return Err(Error::Domain(format!(
                "r = {r} is at or beyond r_max = {}",
                self.r_max
            )));
        }
        let r0 = self.pole_offset();
        Ok(r.clamp(r0, self.r_max - r0))
    }

    fn open_radius(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !(r < self.r_max) {
            return Err(Error::Domain(format!(
                "r = {r} must lie in (0, r_max = {})",
                self.r_max
            )));
        }
        Ok(r)
    }

    /// `Ric(∂r, ∂r) = -(n-1) w''/w`.
    pub fn ricci_radial(&self, r: f64) -> Result<f64> {
        let r = self.curvature_radius(r)?;
        Ok(-(self.nf() - 1.0) * self.w.d2(r) / self.w.eval(r))
    }

    /// `Ric_f(∂r, ∂r) = Ric(∂r, ∂r) + f''`.
    pub fn bakry_emery_radial(&self, r: f64) -> Result<f64> {
        let rc = self.curvature_radius(r)?;
        Ok(-(self.nf() - 1.0) * self.w.d2(rc) / self.w.eval(rc) + self.f.d2(rc))
    }

    /// Tangential eigenvalue of `Ric_f`:
    /// `-w''/w + (n-2)(1 - w'²)/w² + f' w'/w`.
    pub fn bakry_emery_tangential(&self, r: f64) -> Result<f64> {
        let rc = self.curvature_radius(r)?;
        let w = self.w.eval(rc);
        let w1 = self.w.d1(rc);
        let w2 = self.w.d2(rc);
        // Close to either pole 1 - w'² cancels catastrophically; there the
        // tangential sectional curvature agrees with the radial one to O(r²).
        let edge = 1e-3 * self.r_max;
        let near_pole = rc < edge || (self.closed && rc > self.r_max - edge);
        let sectional = if near_pole {
            -w2 / w
        } else {
            (1.0 - w1 * w1) / (w * w)
        };
        Ok(-w2 / w + (self.nf() - 2.0) * sectional + self.f.d1(rc) * w1 / w)
    }

    /// Smallest eigenvalue of `Ric_f`.
    pub fn ricci_f_smallest_eigenvalue(&self, r: f64) -> Result<f64> {
        Ok(self
            .bakry_emery_radial(r)?
            .min(self.bakry_emery_tangential(r)?))
    }

    /// Mean curvature `(n-1) w'/w` of the geodesic sphere.
    pub fn mean_curvature(&self, r: f64) -> Result<f64> {
        let r = self.open_radius(r)?;
        Ok((self.nf() - 1.0) * self.w.d1(r) / self.w.eval(r))
    }

    /// Weighted mean curvature `m - f'`.
    pub fn mean_curvature_f(&self, r: f64) -> Result<f64> {
        let r = self.open_radius(r)?;
        Ok((self.nf() - 1.0) * self.w.d1(r) / self.w.eval(r) - self.f.d1(r))
    }

    /// Curvature excess `max(0, (n-1)H - λ)`.
    pub fn rho(&self, h: f64, r: f64, mode: RhoMode) -> Result<f64> {
        let lambda = match mode {
            RhoMode::Radial => self.bakry_emery_radial(r)?,
            RhoMode::Full => self.ricci_f_smallest_eigenvalue(r)?,
        };
        Ok(((self.nf() - 1.0) * h - lambda).max(0.0))
    }

    /// `∫_0^{min(r, r_max)} ρ`.
    pub fn integral_rho(&self, h: f64, r: f64, mode: RhoMode) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("upper limit must be >= 0, got {r}")));
        }
        let upper = r.min(self.r_max);
        let q = quad_adaptive(|t| self.rho_unchecked(h, t, mode), 0.0, upper, &RHO_TOL)?;
        Ok(q.value.max(0.0))
    }

    /// The space-level constant `l = ∫_0^{r_max} ρ`.
    pub fn excess_constant(&self, h: f64, mode: RhoMode) -> Result<f64> {
        self.integral_rho(h, self.r_max, mode)
    }

    /// Running `∫_{grid[0]}^{grid[i]} ρ` on an increasing grid.
    pub fn cumulative_rho(&self, h: f64, grid: &[f64], mode: RhoMode) -> Result<Vec<f64>> {
        if let Some(&last) = grid.last() {
            if last > self.r_max || grid[0] < 0.0 {
                return Err(Error::Domain("grid leaves [0, r_max]".into()));
            }
        }
        Ok(cumulative_quad(
            |t| self.rho_unchecked(h, t, mode),
            grid,
            &RHO_TOL,
        )?)
    }

    fn rho_unchecked(&self, h: f64, t: f64, mode: RhoMode) -> f64 {
        let t = t.clamp(0.0, self.r_max);
        let t = if !self.closed && t >= self.r_max {
            self.interior_limit()
        } else {
            t
        };
        self.rho(h, t, mode).unwrap_or(f64::NAN)
    }

    /// `k = max|f|`, `a = max(0, -min f')` on `[0, r_max]`, refined until
    /// the maxima settle.
    pub fn potential_bounds(&self) -> PotentialBounds {
        let scan = |points: usize| -> (f64, f64, f64) {
            let mut k: f64 = 0.0;
            let mut neg: f64 = 0.0;
            let mut grad: f64 = 0.0;
            for i in 0..=points {
                let r = self.r_max * i as f64 / points as f64;
                let d = self.f.d1(r);
                k = k.max(self.f.eval(r).abs());
                neg = neg.max(-d);
                grad = grad.max(d.abs());
            }
            (k, neg, grad)
        };
        let mut points = 256;
        let mut prev = scan(points);
        while points < 1 << 16 {
            points *= 2;
            let next = scan(points);
            let settled = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
            let done =
                settled(prev.0, next.0) && settled(prev.1, next.1) && settled(prev.2, next.2);
            prev = next;
            if done {
                break;
            }
        }
        let (k, a, grad_sup) = prev;
        PotentialBounds {
            k,
            a,
            grad_sup,
            grid_points: points + 1,
        }
    }

    /// `A_f(r) = |S^{n-1}| w^{n-1} e^{-f}`.
    pub fn weighted_area(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || r > self.r_max {
            return Err(Error::Domain(format!(
                "r = {r} outside [0, {}]",
                self.r_max
            )));
        }
        Ok(self.area_unchecked(r))
    }

    fn area_unchecked(&self, r: f64) -> f64 {
        let w = self.w.eval(r).max(0.0);
        sphere_area(self.nf()).unwrap_or(f64::NAN)
            * w.powi(self.n as i32 - 1)
            * (-self.f.eval(r)).exp()
    }

    /// `V_f(R) = ∫_0^R A_f`.
    pub fn weighted_volume(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || r > self.r_max {
            return Err(Error::Domain(format!(
                "R = {r} outside [0, {}]",
                self.r_max
            )));
        }
        Ok(quad_adaptive(|t| self.area_unchecked(t), 0.0, r, &VOLUME_TOL)?.value)
    }

    /// `V_f` at every point of an increasing grid starting at or above 0.
    pub fn cumulative_volume(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let Some(&first) = grid.first() else {
            return Ok(Vec::new());
        };
        let base = self.weighted_volume(first)?;
        if grid.last().copied().unwrap_or(0.0) > self.r_max {
            return Err(Error::Domain("grid leaves [0, r_max]".into()));
        }
        let rest = cumulative_quad(|t| self.area_unchecked(t), grid, &VOLUME_TOL)?;
        Ok(rest.into_iter().map(|v| base + v).collect())
    }

    /// All radial quantities at `r`.
    pub fn sample(&self, h: f64, r: f64, mode: RhoMode) -> Result<CurvatureSample> {
        Ok(CurvatureSample {
            r,
            ric_radial: self.ricci_radial(r)?,
            ric_f_radial: self.bakry_emery_radial(r)?,
            lambda_min: self.ricci_f_smallest_eigenvalue(r)?,
            m: self.mean_curvature(r)?,
            m_f: self.mean_curvature_f(r)?,
            rho: self.rho(h, r, mode)?,
            rho_integral: self.integral_rho(h, r, mode)?,
        })
    }

    /// True when `w` and `f` are symmetric under `r ↦ r_max - r`.
    pub fn is_reflection_symmetric(&self) -> bool {
        if !self.closed {
            return false;
        }
        (1..64).all(|i| {
            let r = self.r_max * i as f64 / 128.0;
            let rr = self.r_max - r;
            let dw = (self.w.eval(r) - self.w.eval(rr)).abs();
            let df = (self.f.eval(r) - self.f.eval(rr)).abs();
            dw <= 1e-10 * self.w.eval(r).abs().max(1.0) && df <= 1e-10
        })
    }
}
