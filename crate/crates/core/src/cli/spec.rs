use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::smms::{make_space, ProfileSpec, RadialProfile, WarpedSMMS};
use crate::{Error, Result};

/// Profiles of a user-defined space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub w: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<ProfileSpec>,
    pub r_max: f64,
    #[serde(default)]
    pub closed: bool,
}

/// A catalog space with parameters, or a custom space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSpec>,
}

impl SpaceSpec {
    pub fn catalog(name: &str, n: usize, params: BTreeMap<String, f64>) -> Self {
        SpaceSpec {
            name: name.to_string(),
            n,
            params,
            custom: None,
        }
    }

    pub fn custom(n: usize, custom: CustomSpec) -> Self {
        SpaceSpec {
            name: "custom".to_string(),
            n,
            params: BTreeMap::new(),
            custom: Some(custom),
        }
    }

    /// Reads either a full space description or a bare `CustomSpec` object.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::param("custom", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::param("custom", format!("malformed JSON: {e}")))?;
        let spec = if value.get("w").is_some() {
            let custom: CustomSpec =
                serde_json::from_value(value).map_err(|e| Error::param("custom", e.to_string()))?;
            SpaceSpec::custom(3, custom)
        } else {
            serde_json::from_value(value).map_err(|e| Error::param("custom", e.to_string()))?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.name.as_str(), &self.custom) {
            ("custom", None) => Err(Error::param("custom", "name 'custom' needs profiles")),
            ("custom", Some(c)) => {
                if !self.params.is_empty() {
                    return Err(Error::param(
                        "params",
                        "custom spaces take no catalog parameters",
                    ));
                }
                for (field, p) in [("w", Some(&c.w)), ("f", c.f.as_ref())] {
                    if let Some(ProfileSpec::Table { nodes, .. }) = p {
                        if nodes.len() < 8 {
                            return Err(Error::param(
                                field,
                                "table profiles need at least 8 nodes",
                            ));
                        }
                    }
                }
                Ok(())
            }
            (_, Some(_)) => Err(Error::param(
                "custom",
                format!("profiles given for catalog space '{}'", self.name),
            )),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<WarpedSMMS> {
        self.validate()?;
        match &self.custom {
            None => make_space(&self.name, self.n, &self.params),
            Some(c) => {
                let w = c.w.build()?;
                let f = match &c.f {
                    Some(f) => f.build()?,
                    None => RadialProfile::zero(),
                };
                Ok(WarpedSMMS::new(self.n, w, f, c.r_max, c.closed)?.with_label("custom"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_custom_object() {
        let spec =
            SpaceSpec::from_json(r#"{"w": {"type": "poly", "coeffs": [0, 1]}, "r_max": 2.0}"#)
                .unwrap();
        assert_eq!(spec.name, "custom");
        let s = spec.build().unwrap();
        assert!((s.mean_curvature(1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn full_spec_round_trip() {
        let spec = SpaceSpec::catalog("sphere", 4, [("H".to_string(), 2.0)].into());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(SpaceSpec::from_json(&json).unwrap(), spec);
    }

    #[test]
    fn rejects_inconsistent_specs() {
        assert!(SpaceSpec::from_json(r#"{"name": "custom", "n": 3}"#).is_err());
        assert!(SpaceSpec::from_json(
            r#"{"w": {"type": "table", "nodes": [0, 1, 2], "values": [0, 1, 2]}, "r_max": 2}"#
        )
        .is_err());
        assert!(SpaceSpec::from_json(r#"{"name": "sphere", "n": 3, "bogus": 1}"#).is_err());
    }
}
