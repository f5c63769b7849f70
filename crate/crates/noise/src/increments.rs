use plap_spectral::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ThetaLevel;

/// Complex increments `ΔW^{k,i}` over one step, one per positive
/// representative `k` and frame index `i`, laid out representative-major.
///
/// `Re ΔW` and `Im ΔW` are independent `N(0, dt)`, so `E|ΔW|² = 2dt` and the
/// real drivers of the cosine and sine fields are standard Brownian increments.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementBatch {
    dt: f64,
    per_mode: usize,
    values: Vec<Complex64>,
}

impl IncrementBatch {
    pub fn new(dt: f64, per_mode: usize, values: Vec<Complex64>) -> IncrementBatch {
        assert!(per_mode > 0 && values.len().is_multiple_of(per_mode), "ragged increment batch");
        IncrementBatch { dt, per_mode, values }
    }

    pub fn zeros(level: &ThetaLevel, dt: f64) -> IncrementBatch {
        let per_mode = level.dim() - 1;
        IncrementBatch { dt, per_mode, values: vec![Complex64::default(); level.representatives().len() * per_mode] }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ΔW` for representative number `rep` and frame index `i`.
    pub fn get(&self, rep: usize, i: usize) -> Complex64 {
        self.values[rep * self.per_mode + i]
    }

    pub fn matches(&self, level: &ThetaLevel) -> bool {
        self.per_mode == level.dim() - 1 && self.values.len() == level.representatives().len() * self.per_mode
    }
}

/// Counter-based Gaussian source. Path `p` owns ChaCha key `(seed, p)`; fine
/// step `s` owns stream `s` within that key; draws inside a stream follow the
/// representative order of the active level. Results therefore depend only on
/// `(seed, path, step)` and never on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStream {
    seed: u64,
    path: u64,
    substeps: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, path: u64) -> NoiseStream {
        NoiseStream { seed, path, substeps: 1 }
    }

    /// Each coarse increment becomes the sum of `substeps` fine increments, so
    /// runs at `dt` and `dt / substeps` see the same Brownian path.
    pub fn with_substeps(self, substeps: u64) -> NoiseStream {
        assert!(substeps > 0);
        NoiseStream { substeps, ..self }
    }

    pub fn path(&self) -> u64 {
        self.path
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng(&self, fine_step: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.path.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(fine_step);
        rng
    }

    /// Increments for coarse step `step` of length `dt` under `level`.
    pub fn sample(&self, level: &ThetaLevel, step: u64, dt: f64) -> IncrementBatch {
        assert!(dt > 0.0, "time step must be positive");
        let mut batch = IncrementBatch::zeros(level, dt);
        let sd = (dt / self.substeps as f64).sqrt();
        for s in 0..self.substeps {
            let mut rng = self.rng(step * self.substeps + s);
            for v in batch.values.iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *v += Complex64::new(re, im) * sd;
            }
        }
        batch
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_path_dependent() {
        let level = ThetaLevel::uniform(2, &[1, 2]).unwrap();
        let s = NoiseStream::new(42, 3);
        assert_eq!(s.sample(&level, 17, 0.01), s.sample(&level, 17, 0.01));
        assert_ne!(s.sample(&level, 17, 0.01), s.sample(&level, 18, 0.01));
        assert_ne!(s.sample(&level, 17, 0.01), NoiseStream::new(42, 4).sample(&level, 17, 0.01));
        assert_eq!(s.sample(&level, 0, 0.01).len(), 4);
    }

    #[test]
    fn coarse_increment_is_sum_of_fine() {
        let level = ThetaLevel::uniform(3, &[1]).unwrap();
        let fine = NoiseStream::new(1, 0);
        let coarse = fine.with_substeps(4);
        let c = coarse.sample(&level, 2, 0.04);
        let mut sum = vec![Complex64::default(); c.len()];
        for s in 8..12 {
            for (a, b) in sum.iter_mut().zip(fine.sample(&level, s, 0.01).values()) {
                *a += b;
            }
        }
        for (a, b) in sum.iter().zip(c.values()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
