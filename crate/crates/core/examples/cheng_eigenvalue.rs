//! Dirichlet eigenvalues of balls and the eigenvalue comparison.

use std::collections::BTreeMap;

use smms_geometry::eigen::{
    check_cheng_estimate, cheng_epsilon, model_eigenvalue, rayleigh_quotient_transplant,
    smms_radial_eigenvalue, DEFAULT_TOL,
};
use smms_geometry::smms::{make_space, RhoMode};

fn main() -> smms_geometry::Result<()> {
    let pi2 = model_eigenvalue(3, 0.0, 0.0, 1.0, DEFAULT_TOL)?;
    println!(
        "lambda(B_1 in R^3) = {:.10} (pi^2 = {:.10})",
        pi2.lambda,
        std::f64::consts::PI.powi(2)
    );
    let hemi = model_eigenvalue(3, 0.0, 1.0, std::f64::consts::FRAC_PI_2, DEFAULT_TOL)?;
    println!("lambda(hemisphere of S^3) = {:.10}", hemi.lambda);

    let soliton = make_space("gaussian_soliton", 3, &BTreeMap::new())?;
    let g = smms_radial_eigenvalue(&soliton, 1.0, DEFAULT_TOL)?;
    println!("gaussian soliton, R = 1: lambda = {:.8}", g.lambda);

    let eps = cheng_epsilon(3, 0.0, 0.0, 1.0, 0.1)?;
    println!("epsilon for delta = 0.1: {:.6e}", eps.epsilon);

    let s = make_space(
        "euclidean",
        3,
        &BTreeMap::from([("r_max".to_string(), 1.2)]),
    )?;
    let rep = check_cheng_estimate(&s, 0.0, 0.0, 1.0, 0.1, RhoMode::Radial)?;
    println!(
        "lambda_B / lambda_model = {:.8} ({})",
        rep.ratio, rep.verdict
    );
    let q = rayleigh_quotient_transplant(&s, 0.0, 0.0, 1.0)?;
    println!("transplanted Rayleigh quotient = {:.8}", q.quotient);
    Ok(())
}
