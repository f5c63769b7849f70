//! Independent paths of one configuration run side by side, reduced in path
//! order so the statistics do not depend on how the work was scheduled.
//!
//! Every path keeps its full energy ledger, so interval labels, the events
//! `A_n` and the pathwise envelope are all recomputed from per-step data.

mod classify;
mod pathwise;

pub use classify::{check_avg_decay, classify_interval, Case, DecayCheck, IntervalLabel};
pub use pathwise::{
    pathwise_envelope, pathwise_stats, replay_pathwise, EventRow, MomentRow, PathwiseReplay, PathwiseStats, Violation,
};

use plap_integrator::{simulate, EnergyLedger, IntegratorError, SimConfig};
use rayon::prelude::*;
use thiserror::Error;

/// Width of every confidence buffer, in standard errors.
pub const CI_SIGMAS: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("an ensemble needs at least two paths, got {0}")]
    TooFewPaths(usize),
    #[error("only {finished} of {requested} paths finished")]
    Survivors { finished: usize, requested: usize },
    #[error("interval length {t0} is not a whole number of steps of {dt}")]
    IntervalLength { t0: f64, dt: f64 },
    #[error("the horizon holds no complete interval of length {0}")]
    NoInterval(f64),
    #[error("pathwise statistics need the step-doubling schedule, or no noise at all")]
    Schedule,
    #[error("pathwise statistics need 1/dt to be an integer")]
    UnitIntervals,
    #[error("initial data is zero, so the events A_n are undefined")]
    ZeroInitial,
    #[error("exponent p = {0} must exceed 2")]
    Exponent(f64),
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Summed in slice order; the divisor of the variance is `len - 1`.
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let m = xs.len() as f64;
        if xs.is_empty() {
            return Estimate { mean: f64::NAN, std_err: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / m;
        if xs.len() < 2 {
            return Estimate { mean, std_err: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        Estimate { mean, std_err: (var / m).sqrt() }
    }

    pub fn upper(&self) -> f64 {
        self.mean + CI_SIGMAS * self.std_err
    }

    pub fn lower(&self) -> f64 {
        self.mean - CI_SIGMAS * self.std_err
    }
}

/// Time profile of the noise, as far as the statistics care.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Off,
    Constant,
    StepDoubling { mu0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path: u64,
    pub ledger: EnergyLedger,
    pub max_substeps: u32,
}

impl PathRecord {
    pub fn energy_at(&self, step: u64) -> f64 {
        self.ledger.energy()[step as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathFailure {
    pub path: u64,
    pub error: IntegratorError,
}

/// Everything the checks read. Paths appear in index order; failed paths are
/// listed in `failures` and left out of every statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub seed: u64,
    pub requested: usize,
    pub p: f64,
    pub u0_norm: f64,
    pub dt: f64,
    pub t0: f64,
    pub steps_per_interval: u64,
    pub steps_per_unit: Option<u64>,
    pub schedule: Schedule,
    pub paths: Vec<PathRecord>,
    pub failures: Vec<PathFailure>,
    /// `‖u(t_n)‖²` over paths, `n = 0..=intervals`.
    pub energy: Vec<Estimate>,
    /// `∫_{t_n}^{t_{n+1}} ‖∇u‖^p_{L^p} ds` over paths.
    pub dissipation: Vec<Estimate>,
}

impl EnsembleSummary {
    pub fn intervals(&self) -> usize {
        self.dissipation.len()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// `‖u(t_n)‖²` on each path.
    pub fn energy_samples(&self, n: usize) -> Vec<f64> {
        let j = n as u64 * self.steps_per_interval;
        self.paths.iter().map(|r| r.energy_at(j)).collect()
    }

    /// Interval `n`'s dissipation on each path.
    pub fn dissipation_samples(&self, n: usize) -> Vec<f64> {
        let a = n * self.steps_per_interval as usize;
        let b = a + self.steps_per_interval as usize;
        self.paths.iter().map(|r| r.ledger.dissipation_between(a, b)).collect()
    }
}

/// Runs `f` on paths `0..paths` of `cfg` in parallel. Results come back in
/// path order whatever the thread count.
pub fn par_paths<T, E, F>(cfg: &SimConfig, paths: usize, f: F) -> Vec<Result<T, E>>
where
    T: Send,
    E: Send,
    F: Fn(SimConfig) -> Result<T, E> + Sync,
{
    (0..paths as u64).into_par_iter().map(|i| f(cfg.clone().with_path(i))).collect()
}

/// `paths` independent trajectories of `cfg`, path `i` driven by stream
/// `(seed, i)`, summarised on the intervals `[n t₀, (n+1) t₀]`.
///
/// Without transport every path is the same deterministic run, which is then
/// computed once.
pub fn run_ensemble(cfg: &SimConfig, paths: usize, t0: f64) -> Result<EnsembleSummary, EnsembleError> {
    if paths < 2 {
        return Err(EnsembleError::TooFewPaths(paths));
    }
    let m = cfg.steps_in(t0).ok_or(EnsembleError::IntervalLength { t0, dt: cfg.dt() })?;
    let intervals = (cfg.steps() / m) as usize;
    if intervals == 0 {
        return Err(EnsembleError::NoInterval(t0));
    }
    let deterministic = cfg.noise().is_off() || !cfg.terms().transport;
    let run = |c: SimConfig| {
        simulate(&c, u64::MAX).map(|traj| PathRecord {
            path: c.path(),
            ledger: traj.ledger,
            max_substeps: traj.max_substeps,
        })
    };
    let outcomes: Vec<Result<PathRecord, IntegratorError>> = if deterministic {
        let once = run(cfg.clone().with_path(0));
        (0..paths as u64).map(|i| once.clone().map(|r| PathRecord { path: i, ..r })).collect()
    } else {
        par_paths(cfg, paths, run)
    };

    let mut records = Vec::with_capacity(paths);
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(error) => failures.push(PathFailure { path: i as u64, error }),
        }
    }
    if records.len() < 2 {
        return Err(EnsembleError::Survivors { finished: records.len(), requested: paths });
    }

    let schedule = match cfg.noise().theta().mu0() {
        _ if cfg.noise().is_off() => Schedule::Off,
        Some(mu0) => Schedule::StepDoubling { mu0 },
        None => Schedule::Constant,
    };
    let mut summary = EnsembleSummary {
        seed: cfg.seed(),
        requested: paths,
        p: cfg.p().value(),
        u0_norm: cfg.u0().l2_norm(),
        dt: cfg.dt(),
        t0,
        steps_per_interval: m,
        steps_per_unit: cfg.steps_per_unit(),
        schedule,
        paths: records,
        failures,
        energy: Vec::new(),
        dissipation: Vec::new(),
    };
    summary.energy = (0..=intervals).map(|n| Estimate::from_samples(&summary.energy_samples(n))).collect();
    summary.dissipation = (0..intervals).map(|n| Estimate::from_samples(&summary.dissipation_samples(n))).collect();
    Ok(summary)
}
