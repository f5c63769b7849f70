use plap_spectral::{Complex64, Grid, Mode, PhysicalField, SpectralField, VectorField};

use crate::{IncrementBatch, NoiseError, ThetaLevel, ThetaSpec};

/// How [`NoiseSpec::ito_corrector`] evaluates `½ Σ ξ·∇(ξ·∇u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectorMode {
    /// Direct sum over every supported `(k, i)`, products dealiased.
    Exact,
    /// The closed form `κΔu`, valid for complete-shell `θ`.
    Limit,
}

/// Intensity `κ` and coefficient profile `θ` of the transport noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    kappa: f64,
    theta: ThetaSpec,
}

impl NoiseSpec {
    pub fn new(kappa: f64, theta: ThetaSpec) -> Result<NoiseSpec, NoiseError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(NoiseError::Intensity(kappa));
        }
        if theta.levels().iter().any(ThetaLevel::is_empty) {
            return Err(NoiseError::EmptySupport);
        }
        Ok(NoiseSpec { kappa, theta })
    }

    /// Zero intensity and empty support: the deterministic equation.
    pub fn off(dim: usize) -> NoiseSpec {
        NoiseSpec { kappa: 0.0, theta: ThetaSpec::Constant(ThetaLevel::empty(dim)) }
    }

    pub fn is_off(&self) -> bool {
        self.kappa == 0.0
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn theta(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Level active on `[n, n+1)`.
    pub fn level(&self, interval: usize) -> &ThetaLevel {
        self.theta.level(interval)
    }

    /// `2√(C_d κ)` with `C_d = d/(d-1)`.
    pub fn amplitude(&self) -> f64 {
        let d = self.dim() as f64;
        2.0 * (d / (d - 1.0) * self.kappa).sqrt()
    }

    /// Checks dimension and that every noise mode sits inside the cutoff.
    pub fn check_grid(&self, grid: Grid) -> Result<(), NoiseError> {
        if grid.dim() != self.dim() {
            return Err(NoiseError::Dimension { noise: self.dim(), grid: grid.dim() });
        }
        for level in self.theta.levels() {
            if let Some(m) = level.representatives().iter().find(|m| m.mode.sup_norm() > grid.cutoff() as i64) {
                return Err(NoiseError::Unsupported(m.mode));
            }
        }
        Ok(())
    }

    /// `ξ_{k,i}` under the level of interval `n`; `k` may have either sign.
    pub fn xi_field(&self, grid: Grid, k: Mode, i: usize, interval: usize) -> Result<VectorField, NoiseError> {
        self.check_grid(grid)?;
        let d = self.dim();
        if i + 1 >= d {
            return Err(NoiseError::FrameIndex { index: i, dim: d });
        }
        let level = self.level(interval);
        let rep = k.representative();
        let m = level
            .representatives()
            .binary_search_by_key(&rep, |m| m.mode)
            .map(|j| &level.representatives()[j])
            .map_err(|_| NoiseError::Unsupported(k))?;
        let c = 0.5 * self.amplitude() * m.theta;
        let comps = (0..d)
            .map(|j| {
                let a = c * m.frame[i][j];
                // cos(2πk·x) for k⁺; sin(2πk·x) = (e_k - e_{-k}) / 2i for k⁻
                let coeff = if k.is_positive() { Complex64::new(a, 0.0) } else { Complex64::new(0.0, -a) };
                SpectralField::from_modes(grid, &[(k, coeff)])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField::new(comps)?)
    }

    /// Noise velocity over one step, `Σ_{k,i} ξ_{k,i} ΔB^{k,i}`.
    ///
    /// Per pair this is `2√(C_d κ) θ_k a_{k,i} Re(e_k ΔW^{k,i})`.
    pub fn velocity(&self, grid: Grid, interval: usize, batch: &IncrementBatch) -> Result<VectorField, NoiseError> {
        self.check_grid(grid)?;
        let level = self.level(interval);
        if level.is_empty() {
            return Ok(VectorField::zeros(grid));
        }
        if !batch.matches(level) {
            return Err(NoiseError::BatchMismatch);
        }
        let half_amp = 0.5 * self.amplitude();
        let comps = (0..self.dim())
            .map(|j| {
                let modes: Vec<(Mode, Complex64)> = level
                    .representatives()
                    .iter()
                    .enumerate()
                    .map(|(r, m)| {
                        let w: Complex64 = (0..self.dim() - 1).map(|i| batch.get(r, i) * m.frame[i][j]).sum();
                        (m.mode, w * (half_amp * m.theta))
                    })
                    .collect();
                SpectralField::from_modes(grid, &modes)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField::new(comps)?)
    }

    /// `Σ_{k,i} (ξ_{k,i}·∇u) ΔB^{k,i}`, dealiased.
    pub fn transport_increment(
        &self,
        u: &SpectralField,
        batch: &IncrementBatch,
        interval: usize,
    ) -> Result<SpectralField, NoiseError> {
        self.transport_with_gradient(&u.gradient().to_physical(), batch, interval)
    }

    /// As [`NoiseSpec::transport_increment`], from precomputed point values of `∇u`.
    pub fn transport_with_gradient(
        &self,
        gradient: &[PhysicalField],
        batch: &IncrementBatch,
        interval: usize,
    ) -> Result<SpectralField, NoiseError> {
        let v = self.velocity(gradient[0].grid(), interval, batch)?;
        Ok(advect(&v.to_physical(), gradient))
    }

    /// Itô-Stratonovich drift `½ Σ_{k,i} ξ_{k,i}·∇(ξ_{k,i}·∇u)`.
    pub fn ito_corrector(
        &self,
        u: &SpectralField,
        interval: usize,
        mode: CorrectorMode,
    ) -> Result<SpectralField, NoiseError> {
        let grid = u.grid();
        self.check_grid(grid)?;
        match mode {
            CorrectorMode::Limit => Ok(u.laplacian().scaled(self.kappa)),
            CorrectorMode::Exact => {
                let grad = u.gradient().to_physical();
                let mut acc = SpectralField::zeros(grid);
                let level = self.level(interval);
                for m in level.representatives() {
                    for k in [m.mode, m.mode.neg()] {
                        for i in 0..self.dim() - 1 {
                            let xi = self.xi_field(grid, k, i, interval)?.to_physical();
                            let once = advect(&xi, &grad);
                            let twice = advect(&xi, &once.gradient().to_physical());
                            acc.add_scaled(0.5, &twice)?;
                        }
                    }
                }
                Ok(acc)
            }
        }
    }
}

/// Dealiased spectral image of the pointwise product `v·g`.
pub fn advect(velocity: &[PhysicalField], gradient: &[PhysicalField]) -> SpectralField {
    let grid = velocity[0].grid();
    let len = grid.len();
    let mut prod = vec![0.0; len];
    for (v, g) in velocity.iter().zip(gradient) {
        for ((p, a), b) in prod.iter_mut().zip(v.values()).zip(g.values()) {
            *p += a * b;
        }
    }
    let phys = PhysicalField::new(grid, prod).expect("product has grid length");
    let mut out = SpectralField::from_physical(&phys);
    out.dealias_in_place();
    out
}
