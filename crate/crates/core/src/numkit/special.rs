use std::f64::consts::PI;

use super::NumError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real arguments (Lanczos, g = 7).
pub fn gamma_real(x: f64) -> Result<f64, NumError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumError::Domain(format!("gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS_P[0];
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Area of the unit (d-1)-sphere in R^d, `2 π^{d/2} / Γ(d/2)`, for real d >= 1.
pub fn sphere_area(d: f64) -> Result<f64, NumError> {
    if !(d >= 1.0) || !d.is_finite() {
        return Err(NumError::Domain(format!(
            "sphere_area needs d >= 1, got {d}"
        )));
    }
    Ok(2.0 * PI.powf(0.5 * d) / gamma_real(0.5 * d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert!(rel(gamma_real(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_real(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma_real(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_real(1.0).unwrap(), 1.0) < 1e-14);
    }

    #[test]
    fn factorials_up_to_fifty() {
        let mut fact = 1.0_f64;
        for k in 1..50 {
            // fact = (k-1)!
            assert!(rel(gamma_real(k as f64).unwrap(), fact) < 1e-12, "k = {k}");
            fact *= k as f64;
        }
    }

    #[test]
    fn half_integers() {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let mut val = PI.sqrt();
        for m in 0..40 {
            let x = m as f64 + 0.5;
            assert!(rel(gamma_real(x).unwrap(), val) < 1e-12, "x = {x}");
            val *= x;
        }
    }

    #[test]
    fn small_arguments_use_recurrence() {
        let g = gamma_real(0.25).unwrap();
        assert!(rel(g, 3.625_609_908_221_908) < 1e-13);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(gamma_real(0.0).is_err());
        assert!(gamma_real(-1.5).is_err());
        assert!(gamma_real(f64::NAN).is_err());
    }

    #[test]
    fn integer_sphere_areas() {
        assert!(rel(sphere_area(1.0).unwrap(), 2.0) < 1e-14);
        assert!(rel(sphere_area(2.0).unwrap(), 2.0 * PI) < 1e-14);
        assert!(rel(sphere_area(3.0).unwrap(), 4.0 * PI) < 1e-14);
        assert!(rel(sphere_area(4.0).unwrap(), 2.0 * PI * PI) < 1e-14);
        assert!(rel(sphere_area(5.0).unwrap(), 8.0 * PI * PI / 3.0) < 1e-14);
        assert!(sphere_area(0.5).is_err());
    }
}
