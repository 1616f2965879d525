#![allow(dead_code)]

use freeclt::measure::standardize;
use freeclt::Measure;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standardized `atoms((0,¾),(1,¼))`.
pub fn skewed() -> Measure {
    standardize(&Measure::atomic(&[(0.0, 0.75), (1.0, 0.25)]).unwrap()).unwrap()
}

/// Standardized atomic law with `k` distinct atoms in `[-2, 2]` and weights
/// bounded below by `min_weight / k`.
pub fn random_atomic(rng: &mut impl Rng, k: usize, min_weight: f64) -> Measure {
    loop {
        let mut pos: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        pos.sort_by(f64::total_cmp);
        if pos.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(min_weight..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let pairs: Vec<(f64, f64)> = pos.iter().zip(&raw).map(|(&p, &w)| (p, w / total)).collect();
        return standardize(&Measure::atomic(&pairs).unwrap()).unwrap();
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..n).map(|i| lo * (r * i as f64 / (n - 1) as f64).exp()).collect()
}
