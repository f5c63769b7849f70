use plap_integrator::{SimConfig, StepObserver, StepRecord};
use plap_noise::{IncrementBatch, NoiseSpec};
use plap_spectral::{Grid, SpectralField};

use crate::{MildError, MildSplit};

/// Builds the split online, one interval `[n t₀, (n+1) t₀]` after another,
/// so no dense trajectory is stored.
///
/// On each interval, with `m` steps of size `dt` and `r_j = t_n + j dt`:
/// `v₁(r) = e^{κ(r-t_n)Δ} u(t_n)` exactly,
/// `v₂ ← e^{κΔ dt} v₂ + (φ/dt) D_j` with `φ = (1 - e^{-κλ dt})/(κλ)` per mode,
/// which is the convolution integral with `Δ_p u` frozen at its step average
/// `D_j/dt`, where `D_j` is the stepper's substep sum `Σ h Δ_p w`; and
/// `v₃ ← e^{κΔ dt}(v₃ + Σ (ξ·∇u(r_j)) ΔB_j)` on the recorded increments.
#[derive(Debug, Clone)]
pub struct MildTracker {
    grid: Grid,
    noise: NoiseSpec,
    kappa: f64,
    dt: f64,
    steps_per_interval: u64,
    decay: Vec<f64>,
    phi: Vec<f64>,
    current: Option<Open>,
    splits: Vec<MildSplit>,
    error: Option<MildError>,
}

#[derive(Debug, Clone)]
struct Open {
    index: usize,
    first_step: u64,
    u_start: SpectralField,
    v2: SpectralField,
    v3: SpectralField,
    v2_sum: f64,
    v3_sum: f64,
    dissipation: f64,
    residual: f64,
}

impl MildTracker {
    pub fn new(cfg: &SimConfig, t0: f64) -> Result<MildTracker, MildError> {
        let steps_per_interval = cfg.steps_in(t0).ok_or(MildError::IntervalLength { t0, dt: cfg.dt() })?;
        let grid = cfg.grid();
        let kappa = cfg.noise().kappa();
        let dt = cfg.dt();
        let rate = |idx: usize| kappa * grid.eigenvalue_at(idx);
        let decay = (0..grid.len()).map(|i| (-rate(i) * dt).exp()).collect();
        let phi = (0..grid.len())
            .map(|i| {
                let a = rate(i) * dt;
                if a < 1e-12 {
                    dt
                } else {
                    -(-a).exp_m1() / rate(i)
                }
            })
            .collect();
        Ok(MildTracker {
            grid,
            noise: cfg.noise().clone(),
            kappa,
            dt,
            steps_per_interval,
            decay,
            phi,
            current: None,
            splits: Vec::new(),
            error: None,
        })
    }

    pub fn t0(&self) -> f64 {
        self.steps_per_interval as f64 * self.dt
    }

    /// Feeds one step. `drift` is the step's `∫ Δ_p u` as the stepper formed it
    /// and `grad_norm_p` is `‖∇u(r_j)‖^p_{L^p}`; `batch` is `None` when the
    /// transport term is off.
    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        step: u64,
        interval: usize,
        before: &SpectralField,
        after: &SpectralField,
        drift: &SpectralField,
        grad_norm_p: f64,
        batch: Option<&IncrementBatch>,
    ) -> Result<(), MildError> {
        let m = self.steps_per_interval;
        let j = step % m;
        if j == 0 {
            self.current = Some(Open {
                index: (step / m) as usize,
                first_step: step,
                u_start: before.clone(),
                v2: SpectralField::zeros(self.grid),
                v3: SpectralField::zeros(self.grid),
                v2_sum: 0.0,
                v3_sum: 0.0,
                dissipation: 0.0,
                residual: 0.0,
            });
        }
        let open = match self.current.as_mut() {
            Some(o) if o.first_step + j == step => o,
            _ => return Err(MildError::OutOfOrder(step)),
        };
        // left-endpoint time averages
        open.v2_sum += self.dt * open.v2.l2_norm();
        open.v3_sum += self.dt * open.v3.l2_norm();
        open.dissipation += self.dt * grad_norm_p;

        let mut v2 = open.v2.map_real_multiplier(|i| self.decay[i]);
        v2.add_scaled(1.0 / self.dt, &drift.map_real_multiplier(|i| self.phi[i]))?;
        open.v2 = v2;
        if let Some(batch) = batch {
            let transport = self.noise.transport_increment(before, batch, interval)?;
            open.v3.add_scaled(1.0, &transport)?;
        }
        open.v3 = open.v3.map_real_multiplier(|i| self.decay[i]);

        let elapsed = (j + 1) as f64 * self.dt;
        let mut gap = after.sub(&open.u_start.heat(self.kappa * elapsed))?;
        gap.add_scaled(-1.0, &open.v2)?;
        gap.add_scaled(-1.0, &open.v3)?;
        open.residual = open.residual.max(gap.l2_norm());

        if j + 1 == m {
            let open = self.current.take().expect("interval is open");
            let t0 = self.t0();
            let t_start = open.first_step as f64 * self.dt;
            self.splits.push(MildSplit {
                index: open.index,
                t_start,
                t_end: t_start + t0,
                u_start_norm: open.u_start.l2_norm(),
                u_end_norm: after.l2_norm(),
                v1_avg: heat_norm_average(&open.u_start, self.kappa, t0),
                v2_avg: open.v2_sum / t0,
                v3_avg: open.v3_sum / t0,
                residual: open.residual,
                dissipation: open.dissipation,
            });
        }
        Ok(())
    }

    /// Completed intervals so far; a trailing partial interval is dropped.
    pub fn splits(&self) -> &[MildSplit] {
        &self.splits
    }

    /// The completed splits, or the first error an observed step raised.
    pub fn finish(self) -> Result<Vec<MildSplit>, MildError> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.splits),
        }
    }
}

impl StepObserver for MildTracker {
    fn observe(&mut self, record: &StepRecord<'_>) {
        if self.error.is_some() {
            return;
        }
        let r = record.result;
        if let Err(e) =
            self.push(record.index, record.interval, record.before, record.after, &r.drift, r.grad_norm_p, record.batch)
        {
            self.error = Some(e);
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, 8 points.
const GL_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// `(1/t₀)∫₀^{t₀} ‖e^{κsΔ}u‖ ds`.
///
/// `‖e^{κsΔ}u‖² = Σ_λ E_λ e^{-2κλs}` with `E_λ` the energy on each shell, and
/// the integral runs over panels that grow geometrically from the fastest
/// decay scale, 8-point Gauss-Legendre on each.
pub fn heat_norm_average(u: &SpectralField, kappa: f64, t0: f64) -> f64 {
    let grid = u.grid();
    let mut shells: Vec<(i64, f64)> = Vec::new();
    for (idx, c) in u.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        if e == 0.0 {
            continue;
        }
        let r = grid.mode_at(idx).norm_sq();
        match shells.binary_search_by_key(&r, |s| s.0) {
            Ok(i) => shells[i].1 += e,
            Err(i) => shells.insert(i, (r, e)),
        }
    }
    if shells.is_empty() {
        return 0.0;
    }
    if kappa == 0.0 {
        return shells.iter().map(|s| s.1).sum::<f64>().sqrt();
    }
    let rates: Vec<(f64, f64)> = shells.iter().map(|&(r, e)| (2.0 * kappa * plap_spectral::eigenvalue(r), e)).collect();
    let norm_at = |s: f64| rates.iter().map(|&(a, e)| e * (-a * s).exp()).sum::<f64>().sqrt();
    let fastest = rates.iter().map(|r| r.0).fold(0.0, f64::max);
    let mut edges = vec![0.0];
    let mut h = (0.05 / fastest).min(t0);
    while *edges.last().unwrap() < t0 {
        let next = (edges.last().unwrap() + h).min(t0);
        edges.push(next);
        h *= 1.3;
    }
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += wt * half * (norm_at(mid - half * x) + norm_at(mid + half * x));
        }
    }
    total / t0
}
