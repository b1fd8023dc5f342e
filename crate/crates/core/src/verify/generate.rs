use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::StepFunction;

/// Shape of a random step function.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub j: i32,
    pub k: i32,
    /// Probability that a cell is nonzero.
    pub sparsity: f64,
    /// Magnitudes are uniform in `[lo, hi)`.
    pub lo: f64,
    pub hi: f64,
    /// Random signs when set, nonnegative values otherwise.
    pub signed: bool,
}

impl GenSpec {
    pub fn new(n: usize, j: i32, k: i32) -> Self {
        Self { n, j, k, sparsity: 0.6, lo: 0.0, hi: 1.0, signed: true }
    }

    pub fn nonnegative(mut self) -> Self {
        self.signed = false;
        self
    }

    pub fn with_sparsity(mut self, s: f64) -> Self {
        self.sparsity = s;
        self
    }
}

/// Seeded random step function; the stream is ChaCha8, identical on every platform.
pub fn gen_random_step(spec: &GenSpec, seed: u64) -> Result<StepFunction> {
    if !(0.0..=1.0).contains(&spec.sparsity) || !(spec.lo < spec.hi) {
        return Err(Error::InvalidParams(format!(
            "need sparsity in [0,1] and lo < hi (got {}, [{}, {}))",
            spec.sparsity, spec.lo, spec.hi
        )));
    }
    let mut f = StepFunction::zeros(spec.n, spec.j, spec.k, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in f.values_mut() {
        let on = rng.random::<f64>() < spec.sparsity;
        let mag = rng.random_range(spec.lo..spec.hi);
        let neg = spec.signed && rng.random::<bool>();
        if on {
            *v = if neg { -mag } else { mag };
        }
    }
    Ok(f)
}
