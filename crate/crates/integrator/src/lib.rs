//! Time stepping for the Itô form
//! `du = Δ_p u dt + κΔu dt + Σ ξ_{k,i}·∇u dB^{k,i}`
//! by the exponential Euler-Maruyama map
//! `u⁺ = e^{κΔ dt}[u + dt Δ_p u + Σ (ξ_{k,i}·∇u) ΔB^{k,i}]`.
//!
//! Steps are counted by integers, so interval boundaries `t = n` are hit
//! exactly whenever `1/dt` is an integer.

mod config;
mod ledger;
mod step;

pub use config::{SimConfig, Terms};
pub use ledger::{energy_residual, EnergyLedger, Trajectory};
pub use step::{simulate, simulate_observed, step, StepObserver, StepRecord, StepResult};

use plap_noise::NoiseError;
use plap_spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("time step {0} must be positive and finite")]
    TimeStep(f64),
    #[error("horizon {horizon} is not a positive integer multiple of dt = {dt}")]
    Horizon { horizon: f64, dt: f64 },
    #[error("dt = {0} does not divide the unit interval; schedule boundaries would fall between steps")]
    Misaligned(f64),
    #[error("step [{t}, {t} + {dt}] straddles an integer schedule boundary")]
    Straddle { t: f64, dt: f64 },
    #[error("non-finite field values after step {step} (t = {t})")]
    NonFinite { step: u64, t: f64 },
    #[error("stability guard could not find a non-expanding substep at t = {0}")]
    Stiff(f64),
    #[error("save interval must be at least one step")]
    SaveEvery,
    #[error("p is set for dimension {p_dim} but the grid has dimension {grid_dim}")]
    Dimension { p_dim: usize, grid_dim: usize },
    #[error("increment batch does not match the active noise level")]
    Batch,
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
