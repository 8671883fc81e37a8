//! Seeded random instances.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::WeightedPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightProfile {
    /// Uniform on [0.5, 2].
    #[default]
    Uniform,
    /// Log-uniform on [0.1, 100].
    Heavy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapeProfile {
    /// Ordinates uniform on [0, 100).
    #[default]
    Random,
    /// `k` plateaus plus noise of at most 0.5.
    Staircase,
    /// Integer ordinates and weights of 0.01 or 100, so costs tie often.
    Adversarial,
}

impl FromStr for WeightProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(WeightProfile::Uniform),
            "heavy" => Ok(WeightProfile::Heavy),
            _ => Err(format!("unknown weight profile `{s}`")),
        }
    }
}

impl FromStr for ShapeProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(ShapeProfile::Random),
            "staircase" => Ok(ShapeProfile::Staircase),
            "adversarial" => Ok(ShapeProfile::Adversarial),
            _ => Err(format!("unknown profile `{s}`")),
        }
    }
}

/// `n` points with distinct abscissae `i + U(0, 0.5)`, listed in shuffled order.
pub fn generate(
    n: usize,
    k: usize,
    seed: u64,
    weights: WeightProfile,
    shape: ShapeProfile,
) -> Vec<WeightedPoint<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = k.max(1);
    let levels: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..100.0)).collect();
    let mut pts: Vec<WeightedPoint<f64>> = (0..n)
        .map(|i| {
            let x = i as f64 + rng.gen_range(0.0..0.5);
            let y = match shape {
                ShapeProfile::Random => rng.gen_range(0.0..100.0),
                ShapeProfile::Staircase => levels[i * k / n.max(1)] + rng.gen_range(-0.5..=0.5),
                ShapeProfile::Adversarial => rng.gen_range(0..10) as f64,
            };
            let w = match (shape, weights) {
                (ShapeProfile::Adversarial, _) => {
                    if rng.gen_bool(0.5) {
                        0.01
                    } else {
                        100.0
                    }
                }
                (_, WeightProfile::Uniform) => rng.gen_range(0.5..=2.0),
                (_, WeightProfile::Heavy) => 10f64.powf(rng.gen_range(-1.0..=2.0)),
            };
            WeightedPoint::new(x, y, w, 0)
        })
        .collect();
    pts.shuffle(&mut rng);
    for (i, p) in pts.iter_mut().enumerate() {
        p.id = i;
    }
    pts
}
