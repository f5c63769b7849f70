use std::path::{Path, PathBuf};

use plap_integrator::{IntegratorError, SimConfig, Terms};
use plap_noise::{NoiseSpec, ThetaLevel, ThetaSpec};
use plap_operator::PExponent;
use plap_spectral::{random_band_limited, Complex64, Grid, Mode, SpectralField};
use serde::Deserialize;

use crate::checkpoint;
use crate::CliError;

/// One document drives every command; each reads only its own sections.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub dynamics: DynamicsSection,
    pub noise: Option<NoiseSection>,
    pub initial: InitialSection,
    pub ensemble: Option<EnsembleSection>,
    pub bounds: Option<BoundsSection>,
    pub mild: Option<MildSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub d: usize,
    pub n_per_axis: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub p: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default = "one_step")]
    pub save_every: u64,
    /// Switching both terms off leaves the heat flow.
    #[serde(default = "on")]
    pub plaplace: bool,
    #[serde(default = "on")]
    pub transport: bool,
}

fn one_step() -> u64 {
    1
}

fn on() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub kappa: f64,
    /// `(|k|², weight)` pairs; the level on `[0, 1)` under step doubling.
    #[serde(default)]
    pub shells: Vec<(u32, f64)>,
    #[serde(default)]
    pub schedule: ScheduleSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSection {
    #[default]
    Constant,
    /// `levels[n]` is used on `[n+1, n+2)`; the last one repeats.
    StepDoubling {
        mu0: f64,
        #[serde(default)]
        levels: Vec<Vec<(u32, f64)>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    Modes {
        modes: Vec<ModeEntry>,
        norm: Option<f64>,
    },
    Random {
        seed: u64,
        decay: f64,
        max_mode: usize,
        norm: Option<f64>,
    },
    /// Last state of a checkpoint written by `simulate`.
    File {
        path: PathBuf,
    },
}

/// Coefficient `re + i im` on `k`, mirrored onto `-k`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(rename = "M")]
    pub paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "unit")]
    pub t0: f64,
    /// Rate in the interval labels and the averaged-decay envelopes.
    #[serde(default)]
    pub mu: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub beta: f64,
    #[serde(rename = "C0_override")]
    pub c0_override: Option<f64>,
    #[serde(default = "unit")]
    pub mu: f64,
    #[serde(default = "unit")]
    pub r: f64,
    /// Optional sweep over `κ` with shell-uniform noise on `|k|² ≤ N`.
    #[serde(default)]
    pub kappas: Vec<f64>,
    #[serde(default = "default_max_shell")]
    pub max_shell: u32,
    #[serde(default = "default_truncation")]
    pub truncation: u32,
}

fn default_max_shell() -> u32 {
    10
}

fn default_truncation() -> u32 {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MildSection {
    pub t0: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Replay a dense checkpoint instead of simulating.
    pub checkpoint: Option<PathBuf>,
}

fn default_tolerance() -> f64 {
    1e-3
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Invalid { field: field.to_string(), reason: reason.to_string() }
}

fn positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} must be positive and finite")))
    }
}

/// A parsed document plus where it came from, so relative paths resolve
/// against the document's directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub doc: RunConfig,
    pub bytes: Vec<u8>,
    pub dir: PathBuf,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> Result<LoadedConfig, CliError> {
        let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let text = std::str::from_utf8(&bytes).map_err(|_| invalid("<document>", "not UTF-8"))?;
        let doc: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let loaded = LoadedConfig { doc, bytes, dir };
        loaded.validate()?;
        Ok(loaded)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    /// Range checks that need no heavy construction, run before any command.
    fn validate(&self) -> Result<(), CliError> {
        let c = &self.doc;
        let dy = &c.dynamics;
        positive("dynamics.dt", dy.dt)?;
        positive("dynamics.T", dy.horizon)?;
        if dy.save_every == 0 {
            return Err(invalid("dynamics.save_every", "must be at least 1"));
        }
        let steps_of = |span: f64| {
            let x = span / dy.dt;
            ((x - x.round()).abs() <= 1e-9 * x.max(1.0) && x.round() >= 1.0).then(|| x.round() as u64)
        };
        let mut spans = vec![("unit interval", 1.0)];
        if let Some(e) = &c.ensemble {
            spans.push(("ensemble.t0", positive("ensemble.t0", e.t0)?));
            if e.paths < 2 {
                return Err(invalid("ensemble.M", "an ensemble needs at least two paths"));
            }
            if !(e.mu >= 0.0 && e.mu.is_finite()) {
                return Err(invalid("ensemble.mu", "must be finite and nonnegative"));
            }
        }
        if let Some(m) = &c.mild {
            spans.push(("mild.t0", positive("mild.t0", m.t0)?));
            positive("mild.tolerance", m.tolerance)?;
        }
        for (name, span) in spans {
            if let Some(m) = steps_of(span) {
                if m % dy.save_every != 0 {
                    return Err(invalid(
                        "dynamics.save_every",
                        format!("{} does not divide the {m} steps of the {name}", dy.save_every),
                    ));
                }
            } else if name != "unit interval" {
                return Err(invalid(name, format!("{span} is not a whole number of steps of {}", dy.dt)));
            }
        }
        if let Some(n) = &c.noise {
            if !(n.kappa >= 0.0 && n.kappa.is_finite()) {
                return Err(invalid("noise.kappa", "must be finite and nonnegative"));
            }
            if n.kappa > 0.0 && n.shells.is_empty() {
                return Err(invalid("noise.shells", "no shells: the noise is empty and C2 is undefined"));
            }
        }
        if let Some(b) = &c.bounds {
            positive("bounds.mu", b.mu)?;
            positive("bounds.r", b.r)?;
            if let Some(c0) = b.c0_override {
                positive("bounds.C0_override", c0)?;
            }
            for &k in &b.kappas {
                positive("bounds.kappas", k)?;
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.doc.grid.d, self.doc.grid.n_per_axis).map_err(|e| invalid("grid", e))
    }

    pub fn p(&self) -> Result<PExponent, CliError> {
        PExponent::new(self.doc.dynamics.p, self.doc.grid.d).map_err(|e| invalid("dynamics.p", e))
    }

    pub fn noise(&self) -> Result<NoiseSpec, CliError> {
        let d = self.doc.grid.d;
        let Some(n) = self.doc.noise.as_ref().filter(|n| n.kappa > 0.0) else {
            if let Some(ScheduleSection::StepDoubling { .. }) = self.doc.noise.as_ref().map(|n| &n.schedule) {
                return Err(invalid("noise.schedule", "step doubling needs kappa > 0"));
            }
            return Ok(NoiseSpec::off(d));
        };
        let first = ThetaLevel::new(d, &n.shells).map_err(|e| invalid("noise.shells", e))?;
        let theta = match &n.schedule {
            ScheduleSection::Constant => ThetaSpec::Constant(first),
            ScheduleSection::StepDoubling { mu0, levels } => {
                let mut all = vec![first];
                for (i, l) in levels.iter().enumerate() {
                    all.push(ThetaLevel::new(d, l).map_err(|e| invalid(&format!("noise.schedule.levels[{i}]"), e))?);
                }
                ThetaSpec::step_doubling(*mu0, all).map_err(|e| invalid("noise.schedule.mu0", e))?
            }
        };
        NoiseSpec::new(n.kappa, theta).map_err(|e| invalid("noise", e))
    }

    pub fn initial(&self, grid: Grid) -> Result<SpectralField, CliError> {
        let scaled = |u: SpectralField, norm: Option<f64>| match norm {
            Some(v) => positive("initial.norm", v).map(|v| u.with_l2_norm(v)),
            None => Ok(u),
        };
        match &self.doc.initial {
            InitialSection::Modes { modes, norm } => {
                let mut list = Vec::with_capacity(modes.len());
                for (i, m) in modes.iter().enumerate() {
                    if m.k.len() != grid.dim() {
                        return Err(invalid(
                            &format!("initial.modes[{i}].k"),
                            format!("needs {} components", grid.dim()),
                        ));
                    }
                    list.push((Mode::new(&m.k), Complex64::new(m.re, m.im)));
                }
                let u = SpectralField::from_modes(grid, &list).map_err(|e| invalid("initial.modes", e))?;
                scaled(u, *norm)
            }
            InitialSection::Random { seed, decay, max_mode, norm } => {
                positive("initial.decay", *decay)?;
                if *max_mode == 0 || *max_mode > grid.cutoff() {
                    return Err(invalid("initial.max_mode", format!("must lie in 1..={}", grid.cutoff())));
                }
                scaled(random_band_limited(grid, *max_mode, *decay, *seed), *norm)
            }
            InitialSection::File { path } => {
                let ck = checkpoint::read(&self.resolve(path))?;
                if ck.grid != grid {
                    return Err(invalid("initial.path", "checkpoint grid differs from [grid]"));
                }
                Ok(ck.trajectory.last().clone())
            }
        }
    }

    pub fn seed(&self) -> u64 {
        self.doc.ensemble.as_ref().map_or(0, |e| e.seed)
    }

    pub fn sim_config(&self, seed: u64) -> Result<SimConfig, CliError> {
        let grid = self.grid()?;
        let dy = &self.doc.dynamics;
        let cfg = SimConfig::new(grid, self.p()?, self.noise()?, self.initial(grid)?, dy.dt, dy.horizon, seed)
            .map_err(|e| match e {
                IntegratorError::Horizon { .. } => invalid("dynamics.T", e),
                IntegratorError::Misaligned(_) => invalid("dynamics.dt", e),
                other => invalid("noise", other),
            })?;
        Ok(cfg.with_terms(Terms { plaplace: dy.plaplace, transport: dy.transport }))
    }
}
