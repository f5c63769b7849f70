use plap_spectral::SpectralField;

/// Both sides of the energy balance at every step:
/// `‖u(t_j)‖²` and `2∫₀^{t_j} ‖∇u‖^p_{L^p} ds`, the integral by left-endpoint
/// sums over the stepper's (sub)steps.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    dt: f64,
    energy: Vec<f64>,
    dissipation: Vec<f64>,
}

impl EnergyLedger {
    pub(crate) fn new(dt: f64, e0: f64) -> EnergyLedger {
        EnergyLedger { dt, energy: vec![e0], dissipation: vec![0.0] }
    }

    pub(crate) fn push(&mut self, energy: f64, increment: f64) {
        let d = self.dissipation.last().copied().unwrap_or(0.0) + increment;
        self.energy.push(energy);
        self.dissipation.push(d);
    }

    /// Rebuilds a ledger from its two columns, as read back from a checkpoint.
    /// `None` unless both columns have the same nonzero length and the
    /// integral starts at zero.
    pub fn from_columns(dt: f64, energy: Vec<f64>, dissipation: Vec<f64>) -> Option<EnergyLedger> {
        let valid = !energy.is_empty() && energy.len() == dissipation.len() && dissipation[0] == 0.0;
        valid.then_some(EnergyLedger { dt, energy, dissipation })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of recorded times, steps plus one.
    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn dissipation(&self) -> &[f64] {
        &self.dissipation
    }

    /// `‖u(t_j)‖² + 2∫₀^{t_j}‖∇u‖^p − ‖u₀‖²`.
    pub fn residual(&self, step: usize) -> f64 {
        self.energy[step] + self.dissipation[step] - self.energy[0]
    }

    /// `∫_{t_a}^{t_b} ‖∇u‖^p ds` between two step indices.
    pub fn dissipation_between(&self, a: usize, b: usize) -> f64 {
        0.5 * (self.dissipation[b] - self.dissipation[a])
    }

    /// `max ‖u‖²` over steps `a..=b`.
    pub fn max_energy_between(&self, a: usize, b: usize) -> f64 {
        self.energy[a..=b].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    /// Step index of each saved state.
    pub steps: Vec<u64>,
    pub ledger: EnergyLedger,
    /// Largest number of stability substeps any single step needed.
    pub max_substeps: u32,
}

impl Trajectory {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("a trajectory holds at least u₀")
    }

    /// Saved state at step `step`, if it was kept.
    pub fn state_at_step(&self, step: u64) -> Option<&SpectralField> {
        self.steps.binary_search(&step).ok().map(|i| &self.states[i])
    }
}

/// `max_j |‖u(t_j)‖² + 2∫₀^{t_j}‖∇u‖^p − ‖u₀‖²|` over every step, a superset
/// of the saved times.
pub fn energy_residual(traj: &Trajectory) -> f64 {
    (0..traj.ledger.len()).map(|j| traj.ledger.residual(j).abs()).fold(0.0, f64::max)
}
