//! Doubling certificate: the excess threshold for a given doubling constant,
//! then the doubling inequality on a space below the threshold.

use std::collections::BTreeMap;

use smms_geometry::comparison::{
    check_doubling, doubling_epsilon, doubling_integral, CheckConfig, PotentialBound,
};
use smms_geometry::smms::make_space;

fn main() -> smms_geometry::Result<()> {
    let bound = PotentialBound::Drift { a: 0.5 };
    for alpha in [1.5, 2.0, 4.0, 8.0] {
        let cert = doubling_epsilon(3, bound, 0.0, 1.0, alpha)?;
        println!("alpha = {alpha:<4} epsilon = {:.10}", cert.epsilon);
    }
    let cert = doubling_epsilon(3, bound, 0.0, 1.0, 4.0)?;
    let f = doubling_integral(3, bound, 0.0, 1.0, cert.epsilon)?;
    println!("exp F(epsilon) = {:.12}", f.exp());

    let params = BTreeMap::from([
        ("H".to_string(), 0.0),
        ("a".to_string(), 0.5),
        ("r_max".to_string(), 2.0),
    ]);
    let s = make_space("linear_drift", 3, &params)?;
    let rep = check_doubling(
        &s,
        0.0,
        bound,
        4.0,
        1.0,
        cert.epsilon,
        &CheckConfig::default(),
    )?;
    println!(
        "DOUBLING on {}: {} (min_margin {:.3e}, {} pairs)",
        s.label(),
        rep.verdict,
        rep.min_margin.unwrap_or(f64::NAN),
        rep.grid.len()
    );
    Ok(())
}
