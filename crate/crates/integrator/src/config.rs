use plap_noise::{NoiseSpec, NoiseStream};
use plap_operator::PExponent;
use plap_spectral::{Grid, SpectralField};

use crate::IntegratorError;

/// Which right-hand-side terms are active. Both are on for the real equation;
/// switching one off isolates the other in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub plaplace: bool,
    pub transport: bool,
}

impl Default for Terms {
    fn default() -> Terms {
        Terms { plaplace: true, transport: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    grid: Grid,
    p: PExponent,
    noise: NoiseSpec,
    u0: SpectralField,
    dt: f64,
    steps: u64,
    steps_per_unit: Option<u64>,
    seed: u64,
    path: u64,
    brownian_substeps: u64,
    terms: Terms,
}

/// `Some(round(x))` when `x` is an integer up to relative rounding.
fn as_integer(x: f64) -> Option<u64> {
    let r = x.round();
    ((x - r).abs() <= 1e-9 * x.max(1.0) && r >= 1.0).then_some(r as u64)
}

impl SimConfig {
    pub fn new(
        grid: Grid,
        p: PExponent,
        noise: NoiseSpec,
        u0: SpectralField,
        dt: f64,
        horizon: f64,
        seed: u64,
    ) -> Result<SimConfig, IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::TimeStep(dt));
        }
        if p.dim() != grid.dim() {
            return Err(IntegratorError::Dimension { p_dim: p.dim(), grid_dim: grid.dim() });
        }
        if u0.grid() != grid {
            return Err(plap_spectral::SpectralError::GridMismatch.into());
        }
        noise.check_grid(grid)?;
        let steps = as_integer(horizon / dt).ok_or(IntegratorError::Horizon { horizon, dt })?;
        let steps_per_unit = as_integer(1.0 / dt);
        if noise.theta().is_step_doubling() && steps_per_unit.is_none() {
            return Err(IntegratorError::Misaligned(dt));
        }
        Ok(SimConfig {
            grid,
            p,
            noise,
            u0: u0.dealias(),
            dt,
            steps,
            steps_per_unit,
            seed,
            path: 0,
            brownian_substeps: 1,
            terms: Terms::default(),
        })
    }

    /// Selects the independent Brownian path `path` under the same seed.
    pub fn with_path(self, path: u64) -> SimConfig {
        SimConfig { path, ..self }
    }

    pub fn with_terms(self, terms: Terms) -> SimConfig {
        SimConfig { terms, ..self }
    }

    /// Builds each increment from `r` finer draws, so that this run and one at
    /// `dt / r` (with `r = 1`) are driven by the same Brownian path.
    pub fn with_brownian_substeps(self, r: u64) -> SimConfig {
        assert!(r > 0);
        SimConfig { brownian_substeps: r, ..self }
    }

    pub fn with_initial(self, u0: SpectralField) -> Result<SimConfig, IntegratorError> {
        if u0.grid() != self.grid {
            return Err(plap_spectral::SpectralError::GridMismatch.into());
        }
        Ok(SimConfig { u0: u0.dealias(), ..self })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn u0(&self) -> &SpectralField {
        &self.u0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// `1/dt` when it is an integer.
    pub fn steps_per_unit(&self) -> Option<u64> {
        self.steps_per_unit
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> u64 {
        self.path
    }

    pub fn terms(&self) -> Terms {
        self.terms
    }

    pub fn stream(&self) -> NoiseStream {
        NoiseStream::new(self.seed, self.path).with_substeps(self.brownian_substeps)
    }

    pub fn time(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    /// Schedule interval `[n, n+1)` containing step `step`'s left end.
    pub fn interval(&self, step: u64) -> usize {
        match self.steps_per_unit {
            Some(m) => (step / m) as usize,
            None => (self.time(step) + 1e-9).floor() as usize,
        }
    }

    /// Number of whole steps in a time span, if it is a whole number.
    pub fn steps_in(&self, span: f64) -> Option<u64> {
        as_integer(span / self.dt)
    }
}
