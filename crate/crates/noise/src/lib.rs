//! Transport noise `Σ ξ_{k,i}·∇u dB^{k,i}` built from divergence-free Fourier modes.
//!
//! Every supported `k` carries `d-1` unit vectors `a_{k,i} ⊥ k` shared with `-k`.
//! For the lexicographically positive member of each `±k` pair,
//! `ξ_{k,i} = 2√(C_d κ) θ_k a_{k,i} cos(2πk·x)` and `ξ_{-k,i} = -2√(C_d κ) θ_k a_{k,i} sin(2πk·x)`,
//! with `C_d = d/(d-1)`. Both are driven by one complex increment `ΔW` per pair:
//! the cosine field by `Re ΔW`, the sine field by `Im ΔW`.

mod increments;
mod lattice;
mod theta;
mod transport;

pub use increments::{IncrementBatch, NoiseStream};
pub use lattice::{build_frame, build_shells, Frame, Shell};
pub use theta::{NoiseMode, ThetaLevel, ThetaSpec};
pub use transport::{advect, CorrectorMode, NoiseSpec};

use plap_spectral::{Mode, SpectralError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("no lattice point in dimension {dim} has |k|² = {radius_sq}")]
    EmptyShell { dim: usize, radius_sq: u32 },
    #[error("the zero mode has no orthogonal frame")]
    ZeroMode,
    #[error("noise needs at least one shell with positive weight")]
    EmptySupport,
    #[error("shell weight {0} is negative or not finite")]
    Weight(f64),
    #[error("shell |k|² = {0} is listed twice")]
    DuplicateShell(u32),
    #[error("noise intensity {0} must be positive and finite")]
    Intensity(f64),
    #[error("mode {0:?} is not in the noise support")]
    Unsupported(Mode),
    #[error("frame index {index} out of range for dimension {dim}")]
    FrameIndex { index: usize, dim: usize },
    #[error("step-doubling schedule needs mu0 > 0 and at least one level")]
    Schedule,
    #[error("noise dimension {noise} differs from grid dimension {grid}")]
    Dimension { noise: usize, grid: usize },
    #[error("increment batch does not match the active noise level")]
    BatchMismatch,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
