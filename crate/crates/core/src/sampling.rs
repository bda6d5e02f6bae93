//! Seeded per-path random streams and order-fixed reductions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for path `index` of a run seeded with `seed`.
///
/// Streams depend only on `(seed, index)`, so results do not depend on the
/// order in which paths are evaluated.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanEstimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = pairwise_sum(values) / n as f64;
        if n == 1 {
            return MeanEstimate { mean, stderr: 0.0 };
        }
        let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&squares) / (n - 1) as f64;
        MeanEstimate {
            mean,
            stderr: (var / n as f64).sqrt(),
        }
    }
}
