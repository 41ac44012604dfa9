//! Diameter bounds on closed spaces.

use std::collections::BTreeMap;

use smms_geometry::global::{check_myers, index_form_total};
use smms_geometry::smms::{make_space, RhoMode};

fn main() -> smms_geometry::Result<()> {
    let round = make_space("sphere", 3, &BTreeMap::new())?;
    let bumpy = make_space(
        "perturbed_sphere",
        3,
        &BTreeMap::from([("eps".to_string(), 0.05), ("f_cos".to_string(), 0.1)]),
    )?;

    for s in [&round, &bumpy] {
        let rep = check_myers(s, 1.0, RhoMode::Radial)?;
        let diameter = rep.actual_diameter.unwrap_or(f64::NAN);
        println!(
            "{}: diameter {diameter:.6}, verdict {}",
            s.label(),
            rep.verdict
        );
        for (id, value) in &rep.bounds {
            println!("    {id:<12} <= {value:.6}");
        }
    }
    println!(
        "index form of the round sphere at L = pi: {:.2e}",
        index_form_total(&round, std::f64::consts::PI)?
    );
    Ok(())
}
