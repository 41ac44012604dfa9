//! Area and volume comparison with both kinds of potential bound, plus the
//! normalized volume ratio.

use std::collections::BTreeMap;

use smms_geometry::comparison::{
    area_volume_consistency, check_volume_comparison, normalized_volume_profile, CheckConfig,
    PotentialBound,
};
use smms_geometry::smms::make_space;

fn main() -> smms_geometry::Result<()> {
    let params = BTreeMap::from([("eps".to_string(), 0.05), ("omega".to_string(), 2.0)]);
    let s = make_space("perturbed_sphere", 3, &params)?;
    let cfg = CheckConfig::default();
    let h = 1.0;
    let pb = s.potential_bounds();

    for bound in [
        PotentialBound::Bounded { k: pb.k },
        PotentialBound::Drift { a: pb.a },
    ] {
        for rep in check_volume_comparison(&s, h, bound, 0.2, 0.7, &cfg)? {
            println!(
                "{:<10} {:<8} min_margin {:.3e}",
                rep.theorem_id.to_string(),
                rep.verdict.to_string(),
                rep.min_margin.unwrap_or(f64::NAN)
            );
        }
    }

    let c = area_volume_consistency(&s, h, PotentialBound::Drift { a: pb.a }, 0.2, 0.7, &cfg)?;
    println!("area passes => volume passes: {}", c.implication_holds);

    let profile = normalized_volume_profile(&s, h, PotentialBound::Drift { a: pb.a }, 0.7, &cfg)?;
    for (r, q) in profile.iter().step_by(32) {
        println!("r = {r:.4}  normalized ratio = {q:.8}");
    }
    Ok(())
}
