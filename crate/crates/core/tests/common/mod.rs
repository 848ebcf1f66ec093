//! Test-only generators and oracles shared by the integration targets.
#![allow(dead_code)]

use qhe_core::{BathPair, EngineSetup};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random work-extracting setup: `theta in [0.05, 0.8]`, `T2 in [0.2, 5]`,
/// `nu` strictly inside `(theta, 1)` and `a1/T1 in [0.05, 10]`.
pub fn extracting_setup(rng: &mut impl Rng) -> EngineSetup {
    let theta = rng.gen_range(0.05..0.8);
    let t2 = rng.gen_range(0.2..5.0);
    let baths = BathPair::new(t2 / theta, t2).unwrap();
    let margin = 0.01 * (1.0 - theta);
    let nu = rng.gen_range(theta + margin..1.0 - margin);
    let a1 = rng.gen_range(0.05..10.0) * baths.t_hot();
    EngineSetup::from_gap_ratio(a1, nu, baths).unwrap()
}

/// Random setup with any gap ratio, extracting or not.
pub fn any_setup(rng: &mut impl Rng) -> EngineSetup {
    let t2 = rng.gen_range(0.2..5.0);
    let t1 = t2 * rng.gen_range(1.01..20.0);
    let baths = BathPair::new(t1, t2).unwrap();
    let a1 = rng.gen_range(0.01..20.0) * t1;
    let nu = rng.gen_range(0.01..0.99);
    EngineSetup::from_gap_ratio(a1, nu, baths).unwrap()
}

/// All orderings of `items`, by recursive insertion.
pub fn permutations<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for perm in permutations(&items[1..]) {
        for slot in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(slot, items[0]);
            out.push(p);
        }
    }
    out
}

/// Independent evaluation of the excited occupation, `1 / (1 + e^(a/T))`.
pub fn occupation_oracle(gap: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + (gap / temperature).exp())
}

/// Work of the swap written out from the level populations,
/// `W(a1, a2) = (a1 - a2) (s2(a2) - r2(a1))`.
pub fn work_oracle(a1: f64, a2: f64, baths: &BathPair) -> f64 {
    (a1 - a2) * (occupation_oracle(a2, baths.t_cold()) - occupation_oracle(a1, baths.t_hot()))
}

/// Central-difference gradient of `work_oracle` with relative step `step`.
pub fn work_gradient_fd(a1: f64, a2: f64, baths: &BathPair, step: f64) -> (f64, f64) {
    let h1 = step * a1;
    let h2 = step * a2;
    let g1 = (work_oracle(a1 + h1, a2, baths) - work_oracle(a1 - h1, a2, baths)) / (2.0 * h1);
    let g2 = (work_oracle(a1, a2 + h2, baths) - work_oracle(a1, a2 - h2, baths)) / (2.0 * h2);
    (g1, g2)
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
