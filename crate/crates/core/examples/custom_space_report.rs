//! Builds a space from a JSON description and runs a check the way the
//! command-line tool does.

use smms_geometry::cli::{execute, CheckOptions, SpaceSpec, Theorem};

const SPEC: &str = r#"{
    "w": {"type": "poly", "coeffs": [0, 1, 0, -0.1]},
    "f": {"type": "fourier", "coeffs": [0, 0.05]},
    "r_max": 1.5
}"#;

fn main() -> smms_geometry::Result<()> {
    let spec = SpaceSpec::from_json(SPEC)?;
    let options = CheckOptions {
        h: Some(0.5),
        big_r: Some(1.0),
        ..CheckOptions::default()
    };
    for theorem in ["MC_ROUGH", "AREA_B", "VOL_B"] {
        let theorem: Theorem = theorem.parse()?;
        for entry in execute(&spec, theorem, &options)? {
            println!(
                "{:<10} {:<15} min_margin {:.3e}",
                entry.theorem_id,
                entry.verdict.to_string(),
                entry.min_margin.unwrap_or(f64::NAN)
            );
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&spec).expect("spec serializes")
    );
    Ok(())
}
