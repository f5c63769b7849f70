//! Real, zero-mean scalar and vector fields on the unit torus `T^d = R^d / Z^d`,
//! held as Fourier coefficients `û(k) = ∫ u(x) e^{-2πik·x} dx` on an `n^d` grid.
//!
//! The torus has unit volume, so `‖u‖²_{L²} = Σ_k |û(k)|²` with no extra factor.

mod fft;
mod field;
mod grid;
mod synth;

pub use field::{Norm, PhysicalField, SpectralField, VectorField};
pub use grid::{Grid, Mode};
pub use num_complex::Complex64;
pub use synth::random_band_limited;

use thiserror::Error;

/// Smallest nonzero eigenvalue of `-Δ` on the unit torus.
pub const SPECTRAL_GAP: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error("grid resolution {0} must be even and at least 8")]
    Resolution(usize),
    #[error("cutoff {cutoff} exceeds the two-thirds limit {limit} for n = {n}")]
    Cutoff { cutoff: usize, limit: usize, n: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("mode {0:?} is not representable on this grid")]
    ModeOutOfRange(Mode),
    #[error("the zero mode carries the mean and must vanish")]
    ZeroMode,
    #[error("norm exponent {0} is below 2")]
    Exponent(f64),
    #[error("expected {expected} coefficients, found {found}")]
    Length { expected: usize, found: usize },
    #[error("coefficients are not Hermitian-symmetric (defect {0:e})")]
    NotHermitian(f64),
}

/// `λ_k = 4π²|k|²`, the eigenvalue of `-Δ` on `e_k`.
pub fn eigenvalue(norm_sq: i64) -> f64 {
    SPECTRAL_GAP * norm_sq as f64
}
