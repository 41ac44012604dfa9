//! Bakry-Emery curvature, mean curvature and excess along a perturbed sphere.

use std::collections::BTreeMap;

use smms_geometry::smms::{make_space, RhoMode};

fn main() -> smms_geometry::Result<()> {
    let params = BTreeMap::from([("eps".to_string(), 0.05), ("omega".to_string(), 3.0)]);
    let s = make_space("perturbed_sphere", 3, &params)?;
    let h = 1.0;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "r", "Ric_f rad", "min Ric_f", "m_f", "rho"
    );
    for i in 1..=8 {
        let r = s.r_max() * i as f64 / 9.0;
        let c = s.sample(h, r, RhoMode::Full)?;
        println!(
            "{r:>6.3} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            c.ric_f_radial, c.lambda_min, c.m_f, c.rho
        );
    }
    let bounds = s.potential_bounds();
    println!("sup|f| = {}, sup|f'| = {}", bounds.k, bounds.grad_sup);
    println!("l (radial) = {:.6}", s.excess_constant(h, RhoMode::Radial)?);
    println!("l (full)   = {:.6}", s.excess_constant(h, RhoMode::Full)?);
    Ok(())
}
