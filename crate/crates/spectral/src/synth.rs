use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Grid, SpectralField};

/// Random real field supported on `0 < |k|_∞ ≤ max_mode` with amplitudes
/// `N(0,1) · (1 + |k|²)^{-decay/2}` per real and imaginary part.
///
/// `max_mode` is clamped to the grid cutoff, so the result is always dealiased.
pub fn random_band_limited(grid: Grid, max_mode: usize, decay: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_mode = max_mode.min(grid.cutoff()) as i64;
    let mut modes = Vec::new();
    for idx in 0..grid.len() {
        let k = grid.mode_at(idx);
        if !k.is_positive() || k.sup_norm() > max_mode {
            continue;
        }
        let amp = (1.0 + k.norm_sq() as f64).powf(-0.5 * decay);
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        modes.push((k, Complex64::new(re, im) * amp));
    }
    SpectralField::from_modes(grid, &modes).expect("modes within the cutoff are representable")
}
