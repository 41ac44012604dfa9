//! Model functions of the weighted space forms.

use smms_geometry::model::{c_const, mean_curvature_model, sn, ModelSpace};

fn main() -> smms_geometry::Result<()> {
    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>12}",
        "H", "r", "sn_H(r)", "m_H(r)", "V(r)"
    );
    for h in [-1.0, 0.0, 1.0] {
        let model = ModelSpace::new(2.0, h, 0.0)?;
        for r in [0.25, 0.5, 1.0] {
            println!(
                "{h:>6} {r:>6} {:>12.6} {:>12.6} {:>12.6}",
                sn(h, r),
                mean_curvature_model(2.0, h, r)?,
                model.volume(r)?
            );
        }
    }

    let drift = ModelSpace::new(2.0, 0.0, 1.0)?;
    println!(
        "with drift a = 1, m(0.5) = {:.6}",
        drift.mean_curvature(0.5)?
    );
    println!("c(n=3, k=0.5) = {:.6}", c_const(3, 0.5, 0.0)?);
    Ok(())
}
