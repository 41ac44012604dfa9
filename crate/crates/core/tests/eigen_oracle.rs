//! Shooting eigenvalues against an independent finite-difference solve of the
//! radial weighted Dirichlet problem.

use std::collections::BTreeMap;

use smms_geometry::eigen::{smms_radial_eigenvalue, DEFAULT_TOL};
use smms_geometry::smms::{make_space, WarpedSMMS};

/// Cell-centred discretisation of `-(p φ')'/p = λ φ`, `p = w^{n-1} e^{-f}`,
/// with a ghost cell for `φ(R) = 0`. Returns the symmetric tridiagonal
/// matrix `M^{-1/2} K M^{-1/2}` as `(diagonal, off-diagonal)`.
fn finite_difference(s: &WarpedSMMS, radius: f64, cells: usize) -> (Vec<f64>, Vec<f64>) {
    let nm1 = s.n() as i32 - 1;
    let p = |r: f64| s.w().eval(r).powi(nm1) * (-s.f().eval(r)).exp();
    let h = radius / cells as f64;
    let mass: Vec<f64> = (0..cells).map(|i| p((i as f64 + 0.5) * h) * h).collect();
    let flux: Vec<f64> = (0..=cells).map(|i| p(i as f64 * h) / h).collect();
    let mut diag = vec![0.0; cells];
    let mut off = vec![0.0; cells - 1];
    for i in 0..cells {
        let right = if i + 1 == cells {
            2.0 * flux[cells]
        } else {
            flux[i + 1]
        };
        diag[i] = (flux[i] + right) / mass[i];
        if i + 1 < cells {
            off[i] = -flux[i + 1] / (mass[i] * mass[i + 1]).sqrt();
        }
    }
    (diag, off)
}

/// Number of eigenvalues below `x` (Sturm sequence).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while count_below(diag, off, hi) == 0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn compare(s: &WarpedSMMS, radius: f64) -> (f64, f64) {
    let (diag, off) = finite_difference(s, radius, 2000);
    let fd = smallest_eigenvalue(&diag, &off);
    let shot = smms_radial_eigenvalue(s, radius, DEFAULT_TOL)
        .unwrap()
        .lambda;
    (fd, shot)
}

#[test]
fn finite_difference_reproduces_the_flat_ball() {
    let s = make_space("euclidean", 3, &BTreeMap::new()).unwrap();
    let (fd, shot) = compare(&s, 1.0);
    let exact = std::f64::consts::PI.powi(2);
    assert!((fd - exact).abs() < 1e-5 * exact, "fd {fd}");
    assert!((shot - exact).abs() < 1e-9 * exact, "shooting {shot}");
}

#[test]
fn gaussian_soliton_ball() {
    let s = make_space("gaussian_soliton", 3, &BTreeMap::new()).unwrap();
    let (fd, shot) = compare(&s, 1.0);
    assert!(
        (fd - shot).abs() < 1e-4 * shot,
        "fd {fd} vs shooting {shot}"
    );
}

#[test]
fn perturbed_ball_with_potential() {
    let params = BTreeMap::from([
        ("H".to_string(), 0.0),
        ("eps".to_string(), 0.08),
        ("omega".to_string(), 3.0),
        ("f_cos".to_string(), 0.1),
        ("r_max".to_string(), 1.5),
    ]);
    let s = make_space("perturbed_sphere", 3, &params).unwrap();
    let (fd, shot) = compare(&s, 1.2);
    assert!(
        (fd - shot).abs() < 1e-4 * shot,
        "fd {fd} vs shooting {shot}"
    );
}

#[test]
fn hemisphere() {
    let s = make_space("sphere", 4, &BTreeMap::new()).unwrap();
    let (fd, shot) = compare(&s, std::f64::consts::FRAC_PI_2);
    assert!((shot - 4.0).abs() < 1e-8, "shooting {shot}");
    assert!((fd - 4.0).abs() < 1e-4 * 4.0, "fd {fd}");
}
