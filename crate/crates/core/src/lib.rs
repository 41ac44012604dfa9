//! Comparison geometry on rotationally symmetric smooth metric measure
//! spaces `(M^n, dr^2 + w(r)^2 g_S, e^{-f} dv)`.
//!
//! The crate evaluates Bakry-Emery Ricci curvature and weighted mean
//! curvature on warped products, and checks mean curvature, area, volume,
//! doubling, diameter and first Dirichlet eigenvalue estimates under an
//! integral bound on the part of `Ric_f` below `(n-1)H`. Each check samples
//! both sides of its inequality on a radial grid and reports the margin.
//!
//! Modules:
//! - [`numkit`]: ODE integration, quadrature, root finding, gamma function.
//! - [`model`]: constant-curvature model spaces with optional linear drift.
//! - [`smms`]: warped-product spaces, their curvature and the space catalog.
//! - [`comparison`]: mean curvature, area, volume and doubling checks.
//! - [`global`]: diameter bounds.
//! - [`eigen`]: radial Dirichlet eigenvalues and the eigenvalue estimate.
//! - [`cli`]: the `smms` command-line tool.
//!
//! Runnable examples (`cargo run --example <name>`):
//! `model_spaces`, `curvature_profiles`, `mean_curvature_comparison`,
//! `volume_comparison`, `volume_doubling`, `myers_diameter`,
//! `cheng_eigenvalue`, `custom_space_report`.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comparison;
pub mod eigen;
pub mod error;
pub mod global;
pub mod model;
pub mod numkit;
pub mod smms;

pub use error::{Error, Result};
