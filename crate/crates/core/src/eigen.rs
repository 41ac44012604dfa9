//! First Dirichlet eigenvalue of the drift Laplacian on radial balls.
//!
//! Radial eigenfunctions solve `φ'' + m(r) φ' + λ φ = 0` with `φ(0) = 1`,
//! where `m` is the weighted mean curvature of the spheres. The first
//! eigenvalue is the smallest `λ` for which the regular solution first
//! vanishes at `R`; it is found by shooting from just off the pole.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::comparison::{doubling_epsilon, DoublingCertificate, PotentialBound, Verdict};
use crate::model::{mean_curvature_model, ModelSpace};
use crate::numkit::{
    bisect_predicate, integrate_ode, integrate_ode_until, quad_adaptive, refine_bracket,
    OdeTrajectory, Tolerance,
};
use crate::smms::{RhoMode, WarpedSMMS};
use crate::{Error, Result};

/// Default relative tolerance on `λ`.
pub const DEFAULT_TOL: f64 = 1e-10;

const LAMBDA_CAP_FACTOR: f64 = 1e8;
const SAMPLES: usize = 65;
const QUAD_TOL: Tolerance = Tolerance {
    abs_tol: 1e-13,
    rel_tol: 1e-10,
    max_steps: 200_000,
};

/// `(r, φ(r))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSample {
    pub r: f64,
    pub phi: f64,
}

#[derive(Debug, Clone)]
struct Shape {
    traj: OdeTrajectory,
    r0: f64,
    lambda: f64,
    n: f64,
    a_eff: f64,
}

impl Shape {
    fn at(&self, r: f64) -> (f64, f64) {
        if r < self.r0 {
            series(self.n, self.a_eff, self.lambda, r)
        } else {
            let y = self.traj.eval(r);
            (y[0], y[1])
        }
    }
}

/// Converged first eigenvalue with its eigenfunction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda: f64,
    /// `|φ(R)|` at `lambda`.
    pub residual: f64,
    pub eigenfunction: Vec<EigenSample>,
    /// Final bracket `(λ_lo, λ_hi)`.
    pub bracket: (f64, f64),
    /// First radius with `φ = 1/2`.
    pub r_half: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    /// Only radial eigenfunctions were searched.
    pub radial_only: bool,
    #[serde(skip)]
    shape: Option<Shape>,
}

impl EigenResult {
    /// `(φ(r), φ'(r))` for `0 <= r <= R`.
    pub fn phi(&self, r: f64) -> Option<(f64, f64)> {
        let shape = self.shape.as_ref()?;
        (0.0..=self.radius).contains(&r).then(|| shape.at(r))
    }

    /// Writes the eigenfunction samples as CSV with header `r,phi`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "phi"])?;
        for s in &self.eigenfunction {
            w.write_record(&[s.r.to_string(), s.phi.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Regular solution near the pole:
/// `φ = 1 - λr²/(2n) + aλr³/(3n(n+1))`.
fn series(n: f64, a: f64, lambda: f64, r: f64) -> (f64, f64) {
    let phi = 1.0 - lambda * r * r / (2.0 * n) + a * lambda * r.powi(3) / (3.0 * n * (n + 1.0));
    let dphi = -lambda * r / n + a * lambda * r * r / (n * (n + 1.0));
    (phi, dphi)
}

struct Problem<'a> {
    coef: Box<dyn Fn(f64) -> f64 + 'a>,
    n: f64,
    a_eff: f64,
    radius: f64,
    r0: f64,
    ode_tol: Tolerance,
}

impl Problem<'_> {
    fn start(&self, lambda: f64) -> [f64; 2] {
        let (p, d) = series(self.n, self.a_eff, lambda, self.r0);
        [p, d]
    }

    fn rhs(&self, lambda: f64) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
        move |r, y, dy| {
            dy[0] = y[1];
            dy[1] = -(self.coef)(r) * y[1] - lambda * y[0];
        }
    }

    /// True when `φ` reaches zero at or before `R`.
    fn vanishes(&self, lambda: f64) -> Result<bool> {
        let traj = integrate_ode_until(
            self.rhs(lambda),
            self.r0,
            &self.start(lambda),
            self.radius,
            &self.ode_tol,
            |_, y| y[0] <= 0.0,
        )?;
        Ok(traj.terminal()[0] <= 0.0)
    }

    fn full(&self, lambda: f64) -> Result<OdeTrajectory> {
        Ok(integrate_ode(
            self.rhs(lambda),
            self.r0,
            &self.start(lambda),
            self.radius,
            &self.ode_tol,
        )?)
    }

    fn endpoint(&self, lambda: f64) -> Result<f64> {
        Ok(self.full(lambda)?.terminal()[0])
    }
}

fn ode_tolerance(tol: f64) -> Tolerance {
    Tolerance {
        abs_tol: (1e-2 * tol).max(1e-15),
        rel_tol: (1e-1 * tol).max(1e-14),
        max_steps: 500_000,
    }
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || tol >= 1e-2 {
        return Err(Error::param(
            "tol",
            format!("must lie in (0, 0.01), got {tol}"),
        ));
    }
    Ok(())
}

fn solve(p: &Problem<'_>, tol: f64, radial_only: bool) -> Result<EigenResult> {
    let cap = LAMBDA_CAP_FACTOR / (p.radius * p.radius);
    let mut lo = 0.0;
    let mut hi = PI * PI / (p.radius * p.radius);
    while !p.vanishes(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::BracketNotFound { cap });
        }
    }
    let coarse = 1e-3 * hi;
    let (lo, hi) = bisect_predicate(|l| p.vanishes(l), lo, hi, coarse, 200)?;
    let width = tol * lo.max(f64::MIN_POSITIVE);
    let (lo, hi) = bisect_predicate(|l| p.vanishes(l), lo, hi, width, 200)?;

    let g = |l: f64| p.endpoint(l).unwrap_or(f64::NAN);
    let (g_lo, g_hi) = (g(lo), g(hi));
    let lambda = if g_lo.is_finite() && g_hi.is_finite() && g_lo * g_hi <= 0.0 && g_lo != g_hi {
        let root_tol = Tolerance {
            abs_tol: 1e-3 * tol,
            rel_tol: 1e-12,
            max_steps: 100,
        };
        let b = refine_bracket(g, lo, hi, &root_tol)?;
        b.best()
    } else {
        0.5 * (lo + hi)
    };

    let traj = p.full(lambda)?;
    let shape = Shape {
        traj,
        r0: p.r0,
        lambda,
        n: p.n,
        a_eff: p.a_eff,
    };
    let residual = shape.traj.terminal()[0].abs();
    let eigenfunction = (0..SAMPLES)
        .map(|i| {
            let r = p.radius * i as f64 / (SAMPLES - 1) as f64;
            EigenSample {
                r,
                phi: shape.at(r).0,
            }
        })
        .collect();
    let r_half = half_radius(&shape, p.radius)?;
    Ok(EigenResult {
        lambda,
        residual,
        eigenfunction,
        bracket: (lo, hi),
        r_half,
        radius: p.radius,
        radial_only,
        shape: Some(shape),
    })
}

fn half_radius(shape: &Shape, radius: f64) -> Result<f64> {
    let times = shape.traj.times();
    let states = shape.traj.states();
    let Some(i) = states.iter().position(|y| y[0] <= 0.5) else {
        return Err(Error::Domain("eigenfunction stays above 1/2".into()));
    };
    if i == 0 {
        return Ok(shape.r0);
    }
    let tol = Tolerance {
        abs_tol: 1e-14 * radius,
        rel_tol: 1e-12,
        max_steps: 200,
    };
    let b = refine_bracket(|r| shape.at(r).0 - 0.5, times[i - 1], times[i], &tol)?;
    Ok(b.best())
}

/// First Dirichlet eigenvalue `λ(n, a, H, R)` of the weighted model ball.
pub fn model_eigenvalue(n: usize, a: f64, h: f64, radius: f64, tol: f64) -> Result<EigenResult> {
    validate_tol(tol)?;
    let model = ModelSpace::new(n as f64, h, a)?;
    if n < 2 {
        return Err(Error::param("n", format!("must be >= 2, got {n}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Range(format!("R = {radius} must be positive")));
    }
    if h > 0.0 && radius > PI / (2.0 * h.sqrt()) * (1.0 + 1e-12) {
        return Err(Error::Range("R exceeds pi/(2 sqrt(H))".into()));
    }
    let nf = n as f64;
    let p = Problem {
        coef: Box::new(move |r| mean_curvature_model(nf, h, r).unwrap_or(f64::NAN) + model.drift()),
        n: nf,
        a_eff: a,
        radius,
        r0: 1e-6 * radius,
        ode_tol: ode_tolerance(tol),
    };
    solve(&p, tol, false)
}

/// First radial Dirichlet eigenvalue of `Δ_f` on the ball of radius `R`
/// about the pole.
pub fn smms_radial_eigenvalue(s: &WarpedSMMS, radius: f64, tol: f64) -> Result<EigenResult> {
    validate_tol(tol)?;
    if !(radius > 0.0) || !(radius < s.r_max()) {
        return Err(Error::Range(format!(
            "R = {radius} must lie in (0, r_max = {})",
            s.r_max()
        )));
    }
    let r0 = 1e-6 * radius;
    let p = Problem {
        coef: Box::new(move |r| s.mean_curvature_f(r).unwrap_or(f64::NAN)),
        n: s.n() as f64,
        a_eff: -s.f().d1(r0),
        radius,
        r0,
        ode_tol: ode_tolerance(tol),
    };
    solve(&p, tol, true)
}

/// Rayleigh quotient of the model eigenfunction transplanted to a space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighTransplant {
    /// `∫ φ'² A_f / ∫ φ² A_f`.
    pub quotient: f64,
    pub model_lambda: f64,
    /// `∫ (m_f - m_H - a)_+ |φ'| A_f / ∫ φ² A_f`.
    pub error_term: f64,
}

impl RayleighTransplant {
    /// `λ + error_term`, an upper bound for the quotient.
    pub fn upper_bound(&self) -> f64 {
        self.model_lambda + self.error_term
    }
}

/// Transplants the model eigenfunction `φ(d(pole, ·))` for `(n, a, H, R)`
/// to `s` and evaluates its Rayleigh quotient.
pub fn rayleigh_quotient_transplant(
    s: &WarpedSMMS,
    a: f64,
    h: f64,
    radius: f64,
) -> Result<RayleighTransplant> {
    if !(radius < s.r_max()) {
        return Err(Error::Range(format!(
            "R = {radius} must be below r_max = {}",
            s.r_max()
        )));
    }
    let model = model_eigenvalue(s.n(), a, h, radius, DEFAULT_TOL)?;
    let shape = model.shape.as_ref().expect("solver records the shape");
    let nf = s.n() as f64;
    let area = |r: f64| s.weighted_area(r).unwrap_or(f64::NAN);
    let integrate = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(quad_adaptive(f, 0.0, radius, &QUAD_TOL)?.value)
    };
    let kinetic = integrate(&|r| {
        let d = shape.at(r).1;
        d * d * area(r)
    })?;
    let mass = integrate(&|r| {
        let p = shape.at(r).0;
        p * p * area(r)
    })?;
    let r_floor = s.pole_offset();
    let excess = integrate(&|r| {
        if r < r_floor {
            return 0.0;
        }
        let mf = s.mean_curvature_f(r).unwrap_or(f64::NAN);
        let mh = mean_curvature_model(nf, h, r).unwrap_or(f64::NAN);
        (mf - mh - a).max(0.0) * shape.at(r).1.abs() * area(r)
    })?;
    Ok(RayleighTransplant {
        quotient: kinetic / mass,
        model_lambda: model.lambda,
        error_term: excess / mass,
    })
}

/// Excess threshold of the eigenvalue estimate and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChengEpsilon {
    pub epsilon: f64,
    pub delta: f64,
    pub model_lambda: f64,
    pub r_half: f64,
    /// `C = 4 √(V(R)/V(r_half))`.
    pub constant: f64,
    /// `δ√λ/(C√(1+δ))`.
    pub spectral_epsilon: f64,
    pub doubling: DoublingCertificate,
}

/// `ε = min(δ√λ/(C√(1+δ)), ε_doubling(α = 4))` for the drift model
/// `(n, a, H, R)`.
pub fn cheng_epsilon(n: usize, a: f64, h: f64, radius: f64, delta: f64) -> Result<ChengEpsilon> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("must be > 0, got {delta}")));
    }
    let eig = model_eigenvalue(n, a, h, radius, DEFAULT_TOL)?;
    let model = ModelSpace::new(n as f64, h, a)?;
    let constant = 4.0 * (model.volume(radius)? / model.volume(eig.r_half)?).sqrt();
    let spectral_epsilon = delta * eig.lambda.sqrt() / (constant * (1.0 + delta).sqrt());
    let doubling = doubling_epsilon(n, PotentialBound::Drift { a }, h, radius, 4.0)?;
    Ok(ChengEpsilon {
        epsilon: spectral_epsilon.min(doubling.epsilon),
        delta,
        model_lambda: eig.lambda,
        r_half: eig.r_half,
        constant,
        spectral_epsilon,
        doubling,
    })
}

/// Outcome of the eigenvalue comparison on a space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChengReport {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: f64,
    pub a: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub delta: f64,
    pub rho_mode: RhoMode,
    pub l: f64,
    pub epsilon: ChengEpsilon,
    pub model_lambda: f64,
    pub smms_lambda: f64,
    /// `λ_smms / λ_model`.
    pub ratio: f64,
    /// `(1+δ)λ_model - λ_smms`.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub verdict: Verdict,
    pub radial_only: bool,
}

/// Compares `λ(B(pole, R))` with `(1+δ)λ(n, a, H, R)`. The verdict is
/// `NOT-APPLICABLE` when `l = ∫_0^{r_max} ρ` exceeds the threshold; the
/// eigenvalues are reported either way.
pub fn check_cheng_estimate(
    s: &WarpedSMMS,
    h: f64,
    a: f64,
    radius: f64,
    delta: f64,
    mode: RhoMode,
) -> Result<ChengReport> {
    PotentialBound::Drift { a }.verify(s)?;
    let epsilon = cheng_epsilon(s.n(), a, h, radius, delta)?;
    let l = s.excess_constant(h, mode)?;
    let smms = smms_radial_eigenvalue(s, radius, DEFAULT_TOL)?;
    let bound = (1.0 + delta) * epsilon.model_lambda;
    let margin = bound - smms.lambda;
    let tolerance = 1e-8_f64.max(1e-6 * bound);
    let pass = margin >= -tolerance;
    let verdict = if l > epsilon.epsilon {
        Verdict::NotApplicable
    } else if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ChengReport {
        n: s.n(),
        h,
        a,
        radius,
        delta,
        rho_mode: mode,
        l,
        model_lambda: epsilon.model_lambda,
        smms_lambda: smms.lambda,
        ratio: smms.lambda / epsilon.model_lambda,
        epsilon,
        margin,
        tolerance,
        pass,
        verdict,
        radial_only: true,
    })
}
