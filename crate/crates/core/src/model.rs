//! Constant-curvature model spaces with an optional linear drift.
//!
//! `sn(H, r)` solves `sn'' + H sn = 0` with `sn(0) = 0`, `sn'(0) = 1`; every
//! model quantity is built from it. The effective dimension `d` is real so
//! that the shifted dimensions `n + 4k` used by bounded-potential estimates
//! are representable.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numkit::{quad_adaptive, quad_gauss_legendre, sphere_area, Tolerance};
use crate::{Error, Result};

/// Tolerance used for model volumes and model area/volume ratios.
pub const MODEL_TOL: Tolerance = Tolerance::fine();

const CONJUGATE_GUARD: f64 = 1e-12;
const SERIES_CUTOFF: f64 = 1e-4;
const GL_MAX_RATE: f64 = 24.0;
const GL_MAX_ANGLE: f64 = 2.5;

/// Generalized sine.
pub fn sn(h: f64, r: f64) -> f64 {
    if h > 0.0 {
        let s = h.sqrt();
        (s * r).sin() / s
    } else if h < 0.0 {
        let s = (-h).sqrt();
        (s * r).sinh() / s
    } else {
        r
    }
}

/// Derivative of [`sn`] in `r`.
pub fn sn_prime(h: f64, r: f64) -> f64 {
    if h > 0.0 {
        (h.sqrt() * r).cos()
    } else if h < 0.0 {
        ((-h).sqrt() * r).cosh()
    } else {
        1.0
    }
}

/// First conjugate radius `π/√H`, or `None` when `H <= 0`.
pub fn conjugate_radius(h: f64) -> Option<f64> {
    (h > 0.0).then(|| PI / h.sqrt())
}

/// Mean curvature `(d-1) sn'/sn` of the geodesic sphere of radius `r`.
pub fn mean_curvature_model(d: f64, h: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "model mean curvature needs r > 0, got {r}"
        )));
    }
    if let Some(rc) = conjugate_radius(h) {
        if r >= rc - CONJUGATE_GUARD {
            return Err(Error::Domain(format!(
                "r = {r} reaches the conjugate radius {rc} of H = {h}"
            )));
        }
    }
    let scale = if h == 0.0 {
        f64::INFINITY
    } else {
        1.0 / h.abs().sqrt()
    };
    if r < SERIES_CUTOFF * scale {
        return Ok((d - 1.0) * (1.0 / r - h * r / 3.0 - h * h * r * r * r / 45.0));
    }
    Ok((d - 1.0) * sn_prime(h, r) / sn(h, r))
}

/// Weighted model `M^d_{H,a}`: curvature `H`, effective dimension `d` and
/// measure `e^{a r} dv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    dim: f64,
    curvature: f64,
    drift: f64,
}

impl ModelSpace {
    pub fn new(dim: f64, curvature: f64, drift: f64) -> Result<Self> {
        if !(dim >= 1.0) || !dim.is_finite() {
            return Err(Error::param("dim", format!("must be >= 1, got {dim}")));
        }
        if !curvature.is_finite() {
            return Err(Error::param("H", "must be finite"));
        }
        if !(drift >= 0.0) || !drift.is_finite() {
            return Err(Error::param("a", format!("must be >= 0, got {drift}")));
        }
        Ok(ModelSpace {
            dim,
            curvature,
            drift,
        })
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("model radius must be >= 0, got {r}")));
        }
        if let Some(rc) = conjugate_radius(self.curvature) {
            if r > rc + CONJUGATE_GUARD {
                return Err(Error::Domain(format!(
                    "r = {r} is beyond the conjugate radius {rc}"
                )));
            }
        }
        Ok(())
    }

    /// Weighted mean curvature `m_H + a`.
    pub fn mean_curvature(&self, r: f64) -> Result<f64> {
        Ok(mean_curvature_model(self.dim, self.curvature, r)? + self.drift)
    }

    /// `sphere_area(d) e^{a r} sn^{d-1}`.
    pub fn area(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let s = sn(self.curvature, r).max(0.0);
        Ok(sphere_area(self.dim)? * (self.drift * r).exp() * s.powf(self.dim - 1.0))
    }

    /// Volume of the model ball of radius `r`.
    pub fn volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let c = sphere_area(self.dim)?;
        let (h, a, e) = (self.curvature, self.drift, self.dim - 1.0);
        let q = quad_adaptive(
            |t| c * (a * t).exp() * sn(h, t).max(0.0).powf(e),
            0.0,
            r,
            &MODEL_TOL,
        )?;
        Ok(q.value)
    }

    /// `A(t)/V(t)` evaluated without forming either factor near the pole:
    /// `V/A = t ∫_0^1 e^{a t (u-1)} (sn(ut)/sn(t))^{d-1} du`.
    pub fn area_over_volume(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "area/volume ratio needs t > 0, got {t}"
            )));
        }
        if let Some(rc) = conjugate_radius(self.curvature) {
            if t >= rc - CONJUGATE_GUARD {
                return Err(Error::Domain(format!(
                    "t = {t} reaches the conjugate radius {rc}"
                )));
            }
        }
        let (h, a, e) = (self.curvature, self.drift, self.dim - 1.0);
        let st = sn(h, t);
        let integrand = |u: f64| (a * t * (u - 1.0)).exp() * (sn(h, u * t) / st).max(0.0).powf(e);
        // Exponential rate of the integrand along [0, 1]; near the conjugate
        // radius sn(t) vanishes and the integrand peaks in the interior.
        let rate = t * (a + e * (-h).max(0.0).sqrt());
        let near_conjugate = h > 0.0 && h.sqrt() * t > GL_MAX_ANGLE;
        let q = if rate <= GL_MAX_RATE && !near_conjugate {
            // u = v^2 turns the u^(d-1) behaviour at the pole into a smooth v^(2d-1).
            quad_gauss_legendre(|v| 2.0 * v * integrand(v * v), 0.0, 1.0)
        } else {
            quad_adaptive(integrand, 0.0, 1.0, &MODEL_TOL)?.value
        };
        Ok(1.0 / (t * q))
    }
}

/// Free-function form of [`ModelSpace::area`].
pub fn area_model(m: &ModelSpace, r: f64) -> Result<f64> {
    m.area(r)
}

/// Free-function form of [`ModelSpace::volume`].
pub fn volume_model(m: &ModelSpace, r: f64) -> Result<f64> {
    m.volume(r)
}

/// `c(n, k, H) = sphere_area(n + 4k) / sphere_area(n)`.
///
/// `H` is accepted for symmetry with the estimates that use it; the
/// constant does not depend on it.
pub fn c_const(n: usize, k: f64, _h: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", format!("must be >= 2, got {n}")));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::param("k", format!("must be >= 0, got {k}")));
    }
    if k == 0.0 {
        return Ok(1.0);
    }
    let n = n as f64;
    Ok(sphere_area(n + 4.0 * k)? / sphere_area(n)?)
}
