//! Plain-text trajectory checkpoint:
//!
//! ```text
//! # schema: plap-checkpoint/1
//! grid <d> <n> <cutoff>
//! dt <dt>
//! seed <seed>
//! path <path>
//! substeps <largest stability split>
//! ledger <rows>
//! <‖u(t_j)‖²> <2∫₀^{t_j}‖∇u‖^p>        one row per step, from j = 0
//! state <step>
//! <re> <im> <re> <im> ...              every coefficient, grid order
//! ```
//!
//! The Brownian increments are not stored: they are a function of
//! `(seed, path, step)` and are regenerated on replay.

use std::fmt::Write as _;
use std::path::Path;

use plap_integrator::{EnergyLedger, Trajectory};
use plap_spectral::{Complex64, Grid, SpectralField};

use crate::CliError;

const SCHEMA: &str = "plap-checkpoint/1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub grid: Grid,
    pub seed: u64,
    pub path: u64,
    pub trajectory: Trajectory,
}

pub fn render(ck: &Checkpoint) -> String {
    let g = ck.grid;
    let traj = &ck.trajectory;
    let ledger = &traj.ledger;
    let mut out = format!("# schema: {SCHEMA}\ngrid {} {} {}\n", g.dim(), g.n(), g.cutoff());
    let _ = writeln!(out, "dt {:e}\nseed {}\npath {}\nsubsteps {}", ledger.dt(), ck.seed, ck.path, traj.max_substeps);
    let _ = writeln!(out, "ledger {}", ledger.len());
    for (e, d) in ledger.energy().iter().zip(ledger.dissipation()) {
        let _ = writeln!(out, "{e:e} {d:e}");
    }
    for (step, state) in traj.steps.iter().zip(&traj.states) {
        let _ = writeln!(out, "state {step}");
        let mut line = String::new();
        for (i, c) in state.coeffs().iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{:e} {:e}", c.re, c.im);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn read(file: &Path) -> Result<Checkpoint, CliError> {
    let text = std::fs::read_to_string(file).map_err(|source| CliError::Io { path: file.to_path_buf(), source })?;
    parse(&text)
}

fn keyed<'a>(line: Option<&'a str>, key: &str) -> Result<Vec<&'a str>, CliError> {
    let line = line.ok_or_else(|| bad(&format!("missing {key} line")))?;
    let mut parts = line.split(' ');
    if parts.next() != Some(key) {
        return Err(bad(&format!("expected {key}, found {line:?}")));
    }
    Ok(parts.collect())
}

fn bad(why: &str) -> CliError {
    CliError::Parse(format!("checkpoint: {why}"))
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| bad(&format!("{s:?} is not a number")))
}

pub fn parse(text: &str) -> Result<Checkpoint, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(&format!("# schema: {SCHEMA}")[..]) {
        return Err(bad("unknown schema"));
    }
    let g = keyed(lines.next(), "grid")?;
    if g.len() != 3 {
        return Err(bad("grid needs d, n and cutoff"));
    }
    let grid = Grid::with_cutoff(num(g[0])?, num(g[1])?, num(g[2])?).map_err(|e| bad(&e.to_string()))?;
    let dt: f64 = num(keyed(lines.next(), "dt")?.first().copied().unwrap_or(""))?;
    let seed: u64 = num(keyed(lines.next(), "seed")?.first().copied().unwrap_or(""))?;
    let path: u64 = num(keyed(lines.next(), "path")?.first().copied().unwrap_or(""))?;
    let max_substeps: u32 = num(keyed(lines.next(), "substeps")?.first().copied().unwrap_or(""))?;
    let rows: usize = num(keyed(lines.next(), "ledger")?.first().copied().unwrap_or(""))?;
    let (mut energy, mut dissipation) = (Vec::with_capacity(rows), Vec::with_capacity(rows));
    for _ in 0..rows {
        let line = lines.next().ok_or_else(|| bad("ledger is short"))?;
        let (e, d) = line.split_once(' ').ok_or_else(|| bad("ledger row needs two values"))?;
        energy.push(num(e)?);
        dissipation.push(num(d)?);
    }
    let ledger =
        EnergyLedger::from_columns(dt, energy, dissipation).ok_or_else(|| bad("ledger columns are inconsistent"))?;

    let (mut steps, mut states, mut times) = (Vec::new(), Vec::new(), Vec::new());
    while let Some(header) = lines.next() {
        let step: u64 = num(keyed(Some(header), "state")?.first().copied().unwrap_or(""))?;
        let values: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("state without coefficients"))?
            .split(' ')
            .map(num)
            .collect::<Result<_, _>>()?;
        if values.len() != 2 * grid.len() {
            return Err(bad(&format!("state {step} has {} values, expected {}", values.len(), 2 * grid.len())));
        }
        let coeffs = values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let state = SpectralField::from_coeffs(grid, coeffs).map_err(|e| bad(&e.to_string()))?;
        if steps.last().is_some_and(|&s| s >= step) || step as usize >= ledger.len() {
            return Err(bad(&format!("state {step} is out of order or past the ledger")));
        }
        steps.push(step);
        times.push(step as f64 * dt);
        states.push(state);
    }
    if steps.first() != Some(&0) {
        return Err(bad("the initial state is missing"));
    }
    Ok(Checkpoint { grid, seed, path, trajectory: Trajectory { times, states, steps, ledger, max_substeps } })
}
