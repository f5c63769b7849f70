use plap_noise::IncrementBatch;
use plap_operator::evaluate;
use plap_spectral::{PhysicalField, SpectralField};

use crate::ledger::{EnergyLedger, Trajectory};
use crate::{IntegratorError, SimConfig};

/// Largest `h (p-1) max|∇u|^{p-2} λ_max` the explicit `Δ_p` update may use.
const STIFFNESS_BUDGET: f64 = 1.9;
/// An explicit substep may grow `‖u‖_{L²}` by at most this factor.
const GROWTH_LIMIT: f64 = 1.001;
const MAX_HALVINGS: u32 = 40;

/// One step of the scheme plus the quantities the ledger and observers use.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: SpectralField,
    /// `Δ_p u` at the left end; zero when the term is switched off.
    pub plap: SpectralField,
    /// `Σ h Δ_p w` over the substeps: the stepper's own quadrature of
    /// `∫ Δ_p u` across the step.
    pub drift: SpectralField,
    /// `‖∇u‖^p_{L^p}` at the left end.
    pub grad_norm_p: f64,
    /// `2 Σ h ‖∇w‖^p_{L^p}` over the substeps.
    pub dissipation: f64,
    pub substeps: u32,
}

/// Advances `u` from `t` to `t + dt` under the level active at `t`.
pub fn step(u: &SpectralField, cfg: &SimConfig, t: f64, batch: &IncrementBatch) -> Result<StepResult, IntegratorError> {
    let dt = cfg.dt();
    let n = (t + 1e-9).floor();
    if cfg.noise().theta().is_step_doubling() && t + dt > n + 1.0 + 1e-9 {
        return Err(IntegratorError::Straddle { t, dt });
    }
    let noise_on = !cfg.noise().is_off() && cfg.terms().transport;
    advance(u, cfg, n as usize, noise_on.then_some(batch), t)
}

fn advance(
    u: &SpectralField,
    cfg: &SimConfig,
    interval: usize,
    batch: Option<&IncrementBatch>,
    t: f64,
) -> Result<StepResult, IntegratorError> {
    let dt = cfg.dt();
    let p = cfg.p();
    let grid = cfg.grid();
    let mut w = u.clone();
    let mut dissipation = 0.0;
    let mut substeps = 0;
    let (plap, grad_norm_p, gradient): (SpectralField, f64, Option<Vec<PhysicalField>>) = if cfg.terms().plaplace {
        let mut ev = evaluate(u, p);
        let gradient = std::mem::take(&mut ev.gradient);
        let plap = ev.value.clone();
        let gnp = ev.grad_norm_p;
        let lambda_max = grid.max_eigenvalue();
        let mut remaining = dt;
        loop {
            let stiffness = (p.value() - 1.0) * ev.max_grad.powf(p.value() - 2.0) * lambda_max;
            let pieces = (remaining * stiffness / STIFFNESS_BUDGET).ceil().max(1.0);
            let mut h = remaining / pieces;
            let start = w.l2_norm_sq();
            let mut halvings = 0;
            let next = loop {
                let mut trial = w.clone();
                trial.add_scaled(h, &ev.value)?;
                let grown = trial.l2_norm_sq();
                if !grown.is_finite() {
                    return Err(IntegratorError::NonFinite { step: (t / dt).round() as u64 + 1, t: t + dt });
                }
                if grown <= start * GROWTH_LIMIT * GROWTH_LIMIT {
                    break trial;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(IntegratorError::Stiff(t));
                }
                h *= 0.5;
            };
            dissipation += 2.0 * h * ev.grad_norm_p;
            substeps += 1;
            w = next;
            remaining -= h;
            if remaining <= 1e-12 * dt {
                break;
            }
            ev = evaluate(&w, p);
        }
        (plap, gnp, Some(gradient))
    } else {
        (SpectralField::zeros(grid), 0.0, None)
    };
    let drift = w.sub(u)?;

    if let Some(batch) = batch {
        if !batch.matches(cfg.noise().level(interval)) {
            return Err(IntegratorError::Batch);
        }
        let gradient = gradient.unwrap_or_else(|| u.gradient().to_physical());
        w.add_scaled(1.0, &cfg.noise().transport_with_gradient(&gradient, batch, interval)?)?;
    }
    let kappa = cfg.noise().kappa();
    if kappa > 0.0 {
        w = w.heat(kappa * dt);
    }
    Ok(StepResult { state: w, plap, drift, grad_norm_p, dissipation, substeps })
}

/// What an observer sees after each step.
#[derive(Debug)]
pub struct StepRecord<'a> {
    pub index: u64,
    /// Left end of the step.
    pub time: f64,
    pub interval: usize,
    pub before: &'a SpectralField,
    pub after: &'a SpectralField,
    pub result: &'a StepResult,
    pub batch: Option<&'a IncrementBatch>,
}

pub trait StepObserver {
    fn observe(&mut self, record: &StepRecord<'_>);
}

impl StepObserver for () {
    fn observe(&mut self, _: &StepRecord<'_>) {}
}

impl<F: FnMut(&StepRecord<'_>)> StepObserver for F {
    fn observe(&mut self, record: &StepRecord<'_>) {
        self(record)
    }
}

/// Runs the whole horizon, saving every `save_every` steps, at every integer
/// time, and at the end.
pub fn simulate(cfg: &SimConfig, save_every: u64) -> Result<Trajectory, IntegratorError> {
    simulate_observed(cfg, save_every, &mut ())
}

pub fn simulate_observed<O: StepObserver>(
    cfg: &SimConfig,
    save_every: u64,
    observer: &mut O,
) -> Result<Trajectory, IntegratorError> {
    if save_every == 0 {
        return Err(IntegratorError::SaveEvery);
    }
    let stream = cfg.stream();
    let noise_on = !cfg.noise().is_off() && cfg.terms().transport;
    let mut u = cfg.u0().clone();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![u.clone()],
        steps: vec![0],
        ledger: EnergyLedger::new(cfg.dt(), u.l2_norm_sq()),
        max_substeps: 0,
    };
    for j in 0..cfg.steps() {
        let interval = cfg.interval(j);
        let t = cfg.time(j);
        let batch = noise_on.then(|| stream.sample(cfg.noise().level(interval), j, cfg.dt()));
        let result = advance(&u, cfg, interval, batch.as_ref(), t)?;
        if !result.state.is_finite() {
            return Err(IntegratorError::NonFinite { step: j + 1, t: cfg.time(j + 1) });
        }
        traj.ledger.push(result.state.l2_norm_sq(), result.dissipation);
        traj.max_substeps = traj.max_substeps.max(result.substeps);
        observer.observe(&StepRecord {
            index: j,
            time: t,
            interval,
            before: &u,
            after: &result.state,
            result: &result,
            batch: batch.as_ref(),
        });
        u = result.state;
        let k = j + 1;
        let on_integer = cfg.steps_per_unit().is_some_and(|m| k % m == 0);
        if k % save_every == 0 || on_integer || k == cfg.steps() {
            traj.times.push(cfg.time(k));
            traj.states.push(u.clone());
            traj.steps.push(k);
        }
    }
    Ok(traj)
}
