#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smms_geometry::smms::{make_space, WarpedSMMS};

/// A randomized perturbation of the round sphere (`H = 1`, closed) or of
/// euclidean space (`H = 0`, `r_max = 3`), with a small potential.
pub struct RandomSpace {
    pub h: f64,
    pub params: BTreeMap<String, f64>,
    pub space: WarpedSMMS,
}

pub fn random_space(rng: &mut ChaCha8Rng, closed: bool) -> RandomSpace {
    let mut params = BTreeMap::new();
    let eps = rng.gen_range(-0.1..=0.1);
    let h = if closed { 1.0 } else { 0.0 };
    let omega = if closed {
        rng.gen_range(1..=5) as f64
    } else {
        rng.gen_range(0.5..=5.0)
    };
    params.insert("H".to_string(), h);
    params.insert("eps".to_string(), eps);
    params.insert("omega".to_string(), omega);
    params.insert("f_cos".to_string(), rng.gen_range(-0.1..=0.1));
    params.insert("f_sin".to_string(), rng.gen_range(-0.1..=0.1));
    if !closed {
        params.insert("r_max".to_string(), 3.0);
    }
    let space = make_space("perturbed_sphere", 3, &params).expect("valid catalog space");
    RandomSpace { h, params, space }
}

/// Fifty spaces, alternating between the two families.
pub fn suite(seed: u64) -> Vec<RandomSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..50)
        .map(|i| random_space(&mut rng, i % 2 == 0))
        .collect()
}

pub fn closed_suite(seed: u64, count: usize) -> Vec<RandomSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_space(&mut rng, true)).collect()
}
