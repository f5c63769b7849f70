use plap_spectral::Mode;

use crate::lattice::{build_frame, build_shells, Shell};
use crate::NoiseError;

/// One `±k` pair of the noise support, stored under its positive member.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMode {
    pub mode: Mode,
    pub theta: f64,
    pub frame: Vec<[f64; 3]>,
}

/// Shell-constant coefficients `θ_k` normalised to `Σ_k θ_k² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaLevel {
    dim: usize,
    shells: Vec<(Shell, f64)>,
    reps: Vec<NoiseMode>,
}

impl ThetaLevel {
    /// `weights` lists `(|k|², w)`; every mode of that shell gets `θ_k ∝ w`.
    pub fn new(dim: usize, weights: &[(u32, f64)]) -> Result<ThetaLevel, NoiseError> {
        if let Some(&(_, w)) = weights.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(NoiseError::Weight(w));
        }
        let radii: Vec<u32> = weights.iter().map(|(r, _)| *r).collect();
        let shells = build_shells(dim, &radii)?;
        let total: f64 = shells.iter().zip(weights).map(|(s, (_, w))| s.len() as f64 * w * w).sum();
        if total <= 0.0 {
            return Err(NoiseError::EmptySupport);
        }
        let scale = total.sqrt().recip();
        let shells: Vec<(Shell, f64)> = shells.into_iter().zip(weights).map(|(s, (_, w))| (s, w * scale)).collect();

        let mut reps = Vec::new();
        for (shell, theta) in &shells {
            for &k in shell.modes.iter().filter(|k| k.is_positive()) {
                reps.push(NoiseMode { mode: k, theta: *theta, frame: build_frame(dim, k)?.vectors });
            }
        }
        reps.sort_by_key(|m| m.mode);
        Ok(ThetaLevel { dim, shells, reps })
    }

    /// Equal `θ_k` on every mode of the listed shells.
    pub fn uniform(dim: usize, radii: &[u32]) -> Result<ThetaLevel, NoiseError> {
        let weights: Vec<(u32, f64)> = radii.iter().map(|&r| (r, 1.0)).collect();
        ThetaLevel::new(dim, &weights)
    }

    /// No noise at all; only meaningful together with zero intensity.
    pub fn empty(dim: usize) -> ThetaLevel {
        ThetaLevel { dim, shells: Vec::new(), reps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// `θ_k`, or `None` outside the support.
    pub fn theta(&self, k: Mode) -> Option<f64> {
        let r = k.norm_sq();
        self.shells.iter().find(|(s, _)| s.radius_sq as i64 == r).map(|(_, t)| *t)
    }

    /// `‖θ‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.shells.iter().map(|(_, t)| t.abs()).fold(0.0, f64::max)
    }

    /// `Σ_k θ_k²` over all of `Z^d_0`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.shells.iter().map(|(s, t)| s.len() as f64 * t * t).sum()
    }

    /// Positive representatives in ascending mode order; this order fixes the
    /// layout of [`crate::IncrementBatch`].
    pub fn representatives(&self) -> &[NoiseMode] {
        &self.reps
    }

    /// Number of supported modes, counting `k` and `-k` separately.
    pub fn support_len(&self) -> usize {
        2 * self.reps.len()
    }

    /// `(|k|², shell size, θ)` per shell.
    pub fn shells(&self) -> impl Iterator<Item = (u32, usize, f64)> + '_ {
        self.shells.iter().map(|(s, t)| (s.radius_sq, s.len(), *t))
    }

    /// Largest `|k|_∞` in the support.
    pub fn max_sup_mode(&self) -> i64 {
        self.reps.iter().map(|m| m.mode.sup_norm()).max().unwrap_or(0)
    }
}

/// Time profile of `θ`: constant, or piecewise constant on `[n, n+1)` with
/// the last listed level reused beyond the list.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSpec {
    Constant(ThetaLevel),
    StepDoubling { mu0: f64, levels: Vec<ThetaLevel> },
}

impl ThetaSpec {
    pub fn step_doubling(mu0: f64, levels: Vec<ThetaLevel>) -> Result<ThetaSpec, NoiseError> {
        if !(mu0 > 0.0 && mu0.is_finite()) || levels.is_empty() {
            return Err(NoiseError::Schedule);
        }
        Ok(ThetaSpec::StepDoubling { mu0, levels })
    }

    /// Level active on `[n, n+1)`.
    pub fn level(&self, n: usize) -> &ThetaLevel {
        match self {
            ThetaSpec::Constant(l) => l,
            ThetaSpec::StepDoubling { levels, .. } => &levels[n.min(levels.len() - 1)],
        }
    }

    /// Level active at time `t`; prefer [`ThetaSpec::level`] when the interval
    /// index is known exactly.
    pub fn level_at(&self, t: f64) -> &ThetaLevel {
        self.level(interval_of(t))
    }

    pub fn is_step_doubling(&self) -> bool {
        matches!(self, ThetaSpec::StepDoubling { .. })
    }

    pub fn mu0(&self) -> Option<f64> {
        match self {
            ThetaSpec::Constant(_) => None,
            ThetaSpec::StepDoubling { mu0, .. } => Some(*mu0),
        }
    }

    /// Distinct levels, in schedule order.
    pub fn levels(&self) -> &[ThetaLevel] {
        match self {
            ThetaSpec::Constant(l) => std::slice::from_ref(l),
            ThetaSpec::StepDoubling { levels, .. } => levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.levels()[0].dim()
    }
}

/// `⌊t⌋`, tolerant of rounding just below an integer.
pub(crate) fn interval_of(t: f64) -> usize {
    (t + 1e-9).floor().max(0.0) as usize
}
