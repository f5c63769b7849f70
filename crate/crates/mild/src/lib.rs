//! The mild split `u(r) = v₁(r) + v₂(r) + v₃(r)` on `[t_n, t_n + t₀]`: heat flow of
//! `u(t_n)`, heat-convolved `Δ_p u`, and the stochastic convolution of the
//! transport noise, each compared with its interval lemma bound.

mod checks;
mod tracker;

pub use checks::{
    case2_mu_floor, case2_pipeline, check_v1_bound, check_v2_bound, check_v3_moment, BoundCheck, Case2Pipeline,
    V3Moment,
};
pub use tracker::{heat_norm_average, MildTracker};

use plap_integrator::{step, IntegratorError, SimConfig, Trajectory};
use plap_noise::{IncrementBatch, NoiseError};
use plap_spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MildError {
    #[error("interval length {t0} is not a whole number of steps of {dt}")]
    IntervalLength { t0: f64, dt: f64 },
    #[error("state at step {0} was not saved; replay needs every step of the interval")]
    MissingState(u64),
    #[error("interval {n} runs past the end of the trajectory")]
    Horizon { n: usize },
    #[error("step {0} arrived out of order")]
    OutOfOrder(u64),
    #[error("replayed step {0} does not reproduce the saved state")]
    Replay(u64),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// One interval of the split. Averages are `(1/t₀)∫‖v_i(r)‖ dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct MildSplit {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub u_start_norm: f64,
    pub u_end_norm: f64,
    pub v1_avg: f64,
    pub v2_avg: f64,
    pub v3_avg: f64,
    /// `max_r ‖u(r) - v₁(r) - v₂(r) - v₃(r)‖` over the step ends.
    pub residual: f64,
    /// `∫‖∇u‖^p_{L^p}` over the interval, left-endpoint.
    pub dissipation: f64,
}

impl MildSplit {
    /// Residual relative to `‖u(t_n)‖`; zero when both vanish.
    pub fn relative_residual(&self) -> f64 {
        if self.u_start_norm == 0.0 {
            return self.residual;
        }
        self.residual / self.u_start_norm
    }
}

/// Replays interval `n` of a trajectory saved at every step, regenerating
/// the Brownian increments from the configuration's seed and path and
/// re-running each step to recover its drift.
pub fn decompose(traj: &Trajectory, n: usize, cfg: &SimConfig, t0: f64) -> Result<MildSplit, MildError> {
    let mut tracker = MildTracker::new(cfg, t0)?;
    let m = cfg.steps_in(t0).ok_or(MildError::IntervalLength { t0, dt: cfg.dt() })?;
    let first = n as u64 * m;
    if first + m > cfg.steps() {
        return Err(MildError::Horizon { n });
    }
    let stream = cfg.stream();
    let noise_on = !cfg.noise().is_off() && cfg.terms().transport;
    for j in first..first + m {
        let before = traj.state_at_step(j).ok_or(MildError::MissingState(j))?;
        let after = traj.state_at_step(j + 1).ok_or(MildError::MissingState(j + 1))?;
        let interval = cfg.interval(j);
        let level = cfg.noise().level(interval);
        let batch = noise_on.then(|| stream.sample(level, j, cfg.dt()));
        let zeros = IncrementBatch::zeros(level, cfg.dt());
        let result = step(before, cfg, cfg.time(j), batch.as_ref().unwrap_or(&zeros))?;
        if result.state.sub(after)?.l2_norm() > 1e-12 * after.l2_norm().max(f64::MIN_POSITIVE) {
            return Err(MildError::Replay(j));
        }
        tracker.push(j, interval, before, after, &result.drift, result.grad_norm_p, batch.as_ref())?;
    }
    Ok(tracker.finish()?.pop().expect("a full interval was pushed"))
}
