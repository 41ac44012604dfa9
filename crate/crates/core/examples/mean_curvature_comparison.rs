//! The three mean curvature comparisons on a sphere with a small potential.

use std::collections::BTreeMap;

use smms_geometry::comparison::{check_mc_bounded_f, check_mc_drift, check_mc_rough, CheckConfig};
use smms_geometry::smms::make_space;

fn main() -> smms_geometry::Result<()> {
    let params = BTreeMap::from([("f_cos".to_string(), 0.1)]);
    let s = make_space("sphere", 3, &params)?;
    let cfg = CheckConfig::default();
    let h = 0.8;

    let mut reports = vec![check_mc_rough(&s, h, 0.1, 2.0, &cfg)?];
    reports.extend(check_mc_bounded_f(&s, h, 0.1, &cfg)?);
    reports.push(check_mc_drift(&s, h, s.potential_bounds().a, &cfg)?);

    for rep in &reports {
        println!(
            "{:<20} {:<8} min_margin {:.3e} at r = {:.4}",
            rep.theorem_id.to_string(),
            rep.verdict.to_string(),
            rep.min_margin.unwrap_or(f64::NAN),
            rep.argmin_r.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
