use std::collections::BTreeMap;

use serde::Serialize;

use super::{RadialProfile, WarpedSMMS};
use crate::model::{conjugate_radius, sn, sn_prime};
use crate::{Error, Result};

/// One parameter of a catalog space.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub default: Option<f64>,
    pub unit: &'static str,
    pub description: &'static str,
}

/// A named family of test spaces.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSchema>,
}

const fn param(
    name: &'static str,
    default: Option<f64>,
    unit: &'static str,
    description: &'static str,
) -> ParamSchema {
    ParamSchema {
        name,
        default,
        unit,
        description,
    }
}

fn potential_params() -> [ParamSchema; 2] {
    [
        param(
            "f_cos",
            Some(0.0),
            "1",
            "adds f_cos * cos(r) to the potential",
        ),
        param(
            "f_sin",
            Some(0.0),
            "1",
            "adds f_sin * sin(r) to the potential",
        ),
    ]
}

/// The catalog with parameter schemas, in listing order.
pub fn catalog_entries() -> Vec<CatalogEntry> {
    let with_potential = |mut v: Vec<ParamSchema>| {
        v.extend(potential_params());
        v
    };
    vec![
        CatalogEntry {
            name: "euclidean",
            description: "flat space, w = r",
            params: with_potential(vec![param("r_max", Some(10.0), "length", "outer radius")]),
        },
        CatalogEntry {
            name: "sphere",
            description: "round sphere of curvature H, closed at r = pi/sqrt(H)",
            params: with_potential(vec![param("H", Some(1.0), "1/length^2", "curvature, > 0")]),
        },
        CatalogEntry {
            name: "hyperbolic",
            description: "hyperbolic space of curvature H",
            params: with_potential(vec![
                param("H", Some(-1.0), "1/length^2", "curvature, < 0"),
                param("r_max", Some(5.0), "length", "outer radius"),
            ]),
        },
        CatalogEntry {
            name: "gaussian_soliton",
            description: "flat metric with f = c r^2",
            params: with_potential(vec![
                param("c", Some(0.25), "1/length^2", "quadratic coefficient"),
                param("r_max", Some(10.0), "length", "outer radius"),
            ]),
        },
        CatalogEntry {
            name: "linear_drift",
            description: "space form of curvature H with f = -a r",
            params: with_potential(vec![
                param("a", Some(1.0), "1/length", "drift"),
                param("H", Some(0.0), "1/length^2", "curvature of the base"),
                param(
                    "r_max",
                    None,
                    "length",
                    "outer radius; defaults to 10, or pi/sqrt(H) (closed) when H > 0",
                ),
            ]),
        },
        CatalogEntry {
            name: "perturbed_sphere",
            description: "w = sn_H(r) (1 + eps sin^2(omega r))",
            params: with_potential(vec![
                param("H", Some(1.0), "1/length^2", "curvature of the base"),
                param("eps", Some(0.05), "1", "perturbation amplitude, > -1"),
                param("omega", Some(3.0), "1/length", "perturbation frequency"),
                param(
                    "r_max",
                    None,
                    "length",
                    "outer radius; defaults to 5, or pi/sqrt(H) (closed) when H > 0",
                ),
            ]),
        },
        CatalogEntry {
            name: "custom",
            description: "profiles supplied in a JSON space file",
            params: Vec::new(),
        },
    ]
}

struct Params<'a> {
    space: &'static str,
    allowed: Vec<&'static str>,
    values: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, name: &str, default: f64) -> f64 {
        self.values.get(name).copied().unwrap_or(default)
    }

    fn opt(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    fn check_names(&self) -> Result<()> {
        for (key, value) in self.values {
            if !self.allowed.contains(&key.as_str()) {
                return Err(Error::param(
                    key,
                    format!("not a parameter of '{}'", self.space),
                ));
            }
            if !value.is_finite() {
                return Err(Error::param(key, "must be finite"));
            }
        }
        Ok(())
    }
}

fn space_form_profile(h: f64) -> RadialProfile {
    RadialProfile::analytic(
        move |r| sn(h, r),
        move |r| sn_prime(h, r),
        move |r| -h * sn(h, r),
    )
    .labeled(format!("sn_{h}"))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be > 0, got {v}")))
    }
}

/// Instantiates a catalog space. Unknown parameter names are rejected.
pub fn make_space(name: &str, n: usize, params: &BTreeMap<String, f64>) -> Result<WarpedSMMS> {
    let entry = catalog_entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownSpace(name.to_string()))?;
    if entry.name == "custom" {
        return Err(Error::InvalidSpace(
            "custom spaces are built from profile descriptions".into(),
        ));
    }
    let p = Params {
        space: entry.name,
        allowed: entry.params.iter().map(|s| s.name).collect(),
        values: params,
    };
    p.check_names()?;

    let (w, f, r_max, closed) = match entry.name {
        "euclidean" => (
            RadialProfile::identity(),
            RadialProfile::zero(),
            positive("r_max", p.get("r_max", 10.0))?,
            false,
        ),
        "sphere" => {
            let h = positive("H", p.get("H", 1.0))?;
            (
                space_form_profile(h),
                RadialProfile::zero(),
                conjugate_radius(h).unwrap(),
                true,
            )
        }
        "hyperbolic" => {
            let h = p.get("H", -1.0);
            if h >= 0.0 {
                return Err(Error::param("H", format!("must be < 0, got {h}")));
            }
            (
                space_form_profile(h),
                RadialProfile::zero(),
                positive("r_max", p.get("r_max", 5.0))?,
                false,
            )
        }
        "gaussian_soliton" => {
            let c = p.get("c", 0.25);
            (
                RadialProfile::identity(),
                RadialProfile::polynomial(&[0.0, 0.0, c]).labeled(format!("{c} r^2")),
                positive("r_max", p.get("r_max", 10.0))?,
                false,
            )
        }
        "linear_drift" => {
            let a = p.get("a", 1.0);
            let h = p.get("H", 0.0);
            let (r_max, closed) = bounded_extent(h, p.opt("r_max"), 10.0)?;
            (
                space_form_profile(h),
                RadialProfile::linear(-a),
                r_max,
                closed,
            )
        }
        "perturbed_sphere" => {
            let h = p.get("H", 1.0);
            let eps = p.get("eps", 0.05);
            let omega = p.get("omega", 3.0);
            if eps <= -1.0 {
                return Err(Error::param("eps", format!("must be > -1, got {eps}")));
            }
            let (r_max, closed) = bounded_extent(h, p.opt("r_max"), 5.0)?;
            let bump = RadialProfile::analytic(
                move |r| 1.0 + eps * (omega * r).sin().powi(2),
                move |r| eps * omega * (2.0 * omega * r).sin(),
                move |r| 2.0 * eps * omega * omega * (2.0 * omega * r).cos(),
            )
            .labeled(format!("1 + {eps} sin^2({omega} r)"));
            (
                space_form_profile(h).times(&bump),
                RadialProfile::zero(),
                r_max,
                closed,
            )
        }
        _ => unreachable!("catalog entries are matched exhaustively"),
    };

    let f_cos = p.get("f_cos", 0.0);
    let f_sin = p.get("f_sin", 0.0);
    let f = if f_cos != 0.0 || f_sin != 0.0 {
        f.plus(&RadialProfile::fourier(&[0.0, f_cos, f_sin]))
    } else {
        f
    };

    Ok(WarpedSMMS::new(n, w, f, r_max, closed)?.with_label(entry.name))
}

fn bounded_extent(h: f64, r_max: Option<f64>, open_default: f64) -> Result<(f64, bool)> {
    match (conjugate_radius(h), r_max) {
        (Some(rc), None) => Ok((rc, true)),
        (Some(rc), Some(r)) if r > rc => Err(Error::param(
            "r_max",
            format!("exceeds the conjugate radius {rc} of the base"),
        )),
        (Some(rc), Some(r)) if r == rc => Ok((r, true)),
        (_, Some(r)) => Ok((positive("r_max", r)?, false)),
        (None, None) => Ok((open_default, false)),
    }
}
