//! Deterministic numerical kernels.
//!
//! Everything here is a pure function of its inputs: an embedded 4(5)
//! Runge-Kutta integrator with dense output, globally adaptive Simpson
//! quadrature, a bracketed root finder and the real Gamma function.

mod ode;
mod quad;
mod root;
mod special;

pub use ode::{integrate_ode, integrate_ode_until, OdeTrajectory};
pub use quad::{
    cumulative_quad, quad_adaptive, quad_gauss_legendre, QuadEstimate, GAUSS_LEGENDRE_NODES,
};
pub use root::{bisect_predicate, find_root_bracketed, refine_bracket, Bracket};
pub use special::{gamma_real, sphere_area};

use serde::{Deserialize, Serialize};

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit { t: f64, max_steps: usize },
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("quadrature tolerance unmet: value {value}, error estimate {err}")]
    QuadratureLimit { value: f64, err: f64 },
    #[error("root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },
    #[error("argument out of domain: {0}")]
    Domain(String),
}

/// Absolute/relative tolerance pair plus a work budget.
///
/// `max_steps` bounds accepted-plus-rejected ODE steps, quadrature
/// subdivisions and root-finder iterations respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_steps: usize) -> Result<Self, NumError> {
        let tol = Tolerance {
            abs_tol,
            rel_tol,
            max_steps,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Tight setting used for model quantities and curvature integrals.
    pub const fn fine() -> Self {
        Tolerance {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_steps: 200_000,
        }
    }

    pub fn validate(&self) -> Result<(), NumError> {
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return Err(NumError::InvalidTolerance("abs_tol must lie in (0, 1)"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(NumError::InvalidTolerance("rel_tol must lie in (0, 1)"));
        }
        if self.max_steps < 16 {
            return Err(NumError::InvalidTolerance("max_steps must be at least 16"));
        }
        Ok(())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            max_steps: 10_000,
        }
    }
}
