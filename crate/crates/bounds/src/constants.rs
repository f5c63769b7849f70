use plap_noise::{ThetaLevel, ThetaSpec};
use plap_spectral::SPECTRAL_GAP;
use serde::Serialize;

use crate::heat::golden_max;
use crate::BoundsError;

/// `η = 1/2 + (d/2)(1/2 - 1/p)`, the blow-up rate of `e^{tΔ}: L² → W^{1,p}`.
pub fn eta(dim: usize, p: f64) -> f64 {
    0.5 + 0.5 * dim as f64 * (0.5 - 1.0 / p)
}

/// The problem-level inputs shared by `C₁` and `C₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemConstants {
    dim: usize,
    p: f64,
    beta: f64,
    eta: f64,
    c0: f64,
    lambda_beta: f64,
}

impl ProblemConstants {
    /// `c0` and `lambda_beta` come from [`crate::heat_constant_c0`] and
    /// [`crate::lambda_beta`], or from an analytic value the caller trusts more.
    pub fn new(dim: usize, p: f64, beta: f64, c0: f64, lambda_beta: f64) -> Result<ProblemConstants, BoundsError> {
        let upper = match dim {
            2 => f64::INFINITY,
            3 => 6.0,
            d => return Err(BoundsError::Dimension(d)),
        };
        if !(p > 2.0 && p < upper) {
            return Err(BoundsError::Exponent { p, dim });
        }
        if !(beta > dim as f64 / 2.0 + 1.0) {
            return Err(BoundsError::Beta { beta, dim });
        }
        if !(c0 >= 0.0 && c0.is_finite() && lambda_beta > 0.0 && lambda_beta.is_finite()) {
            return Err(BoundsError::Constant);
        }
        Ok(ProblemConstants { dim, p, beta, eta: eta(dim, p), c0, lambda_beta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn lambda_beta(&self) -> f64 {
        self.lambda_beta
    }

    /// `C₁(κ,t₀,R) = {6/(4π²κt₀)² + 6(C₀/(κ^η t₀^{η-1/p}))² R^{2-4/p}}^{(p-2)/2}`.
    pub fn c1(&self, kappa: f64, t0: f64, r: f64) -> f64 {
        let p = self.p;
        let heat = 6.0 / (SPECTRAL_GAP * kappa * t0).powi(2);
        let nonlinear =
            6.0 * (self.c0 / (kappa.powf(self.eta) * t0.powf(self.eta - 1.0 / p))).powi(2) * r.powf(2.0 - 4.0 / p);
        (heat + nonlinear).powf(0.5 * (p - 2.0))
    }

    /// `C₂(θ,μ) = (6d μ^{(2/p)(1-1/β)} Λ_β ‖θ‖_∞^{2/β})^{(p-2)/2}`.
    pub fn c2(&self, theta_sup: f64, mu: f64) -> f64 {
        let (p, b) = (self.p, self.beta);
        let inner =
            6.0 * self.dim as f64 * mu.powf(2.0 / p * (1.0 - 1.0 / b)) * self.lambda_beta * theta_sup.powf(2.0 / b);
        inner.powf(0.5 * (p - 2.0))
    }

    /// Pathwise bound on `(1/t₀)∫‖v₂‖`:
    /// `C₀/(κ^η t₀^{η-1/p}) · ‖u(t_n)‖^{2(p-1)/p}`.
    pub fn v2_average_bound(&self, kappa: f64, t0: f64, u_norm: f64) -> f64 {
        let p = self.p;
        self.c0 / (kappa.powf(self.eta) * t0.powf(self.eta - 1.0 / p)) * u_norm.powf(2.0 * (p - 1.0) / p)
    }

    /// Bound on `E((1/t₀)∫‖v₃‖)²`, namely
    /// `d μ^{(2/p)(1-1/β)} Λ_β ‖θ‖_∞^{2/β} E‖u(t_n)‖²`. It needs the interval to be
    /// weakly dissipating, `E∫‖∇u‖^p < μ t₀ (E‖u(t_n)‖²)^{p/2}`.
    pub fn v3_mean_square_bound(&self, theta_sup: f64, mu: f64, mean_u_sq: f64) -> f64 {
        let (p, b) = (self.p, self.beta);
        self.dim as f64 * mu.powf(2.0 / p * (1.0 - 1.0 / b)) * self.lambda_beta * theta_sup.powf(2.0 / b) * mean_u_sq
    }
}

pub fn constants_c1_c2(
    consts: &ProblemConstants,
    kappa: f64,
    t0: f64,
    r: f64,
    theta: &ThetaLevel,
    mu: f64,
) -> (f64, f64) {
    (consts.c1(kappa, t0, r), consts.c2(theta.sup_norm(), mu))
}

/// Left-hand side of the averaged-decay condition and how far below 1 it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub lhs: f64,
    pub margin: f64,
    pub satisfied: bool,
}

/// `max{C₁, C₂}·(1 + μt₀/(1-t₀)·(p-2)R^{p-2})` against 1; `c2` must already
/// be evaluated at `μ/(1-t₀)`.
pub fn check_condition_avg(c1: f64, c2: f64, t0: f64, mu: f64, p: f64, r: f64) -> ConditionCheck {
    let lhs = c1.max(c2) * (1.0 + mu * t0 / (1.0 - t0) * (p - 2.0) * r.powf(p - 2.0));
    ConditionCheck { lhs, margin: 1.0 - lhs, satisfied: lhs < 1.0 }
}

/// The best `t₀` found for one `(κ, θ)` and everything evaluated there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvgCondition {
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
    pub check: ConditionCheck,
}

const T0_RANGE: (f64, f64) = (0.01, 0.99);
const T0_SCAN: usize = 197;

/// Minimises the left-hand side over `t₀ ∈ [0.01, 0.99]`: a uniform scan,
/// then golden section on the two cells around the best scan point.
pub fn search_condition_avg(consts: &ProblemConstants, kappa: f64, theta_sup: f64, mu: f64, r: f64) -> AvgCondition {
    let eval = |t0: f64| {
        let c1 = consts.c1(kappa, t0, r);
        let c2 = consts.c2(theta_sup, mu / (1.0 - t0));
        AvgCondition { t0, c1, c2, check: check_condition_avg(c1, c2, t0, mu, consts.p, r) }
    };
    let (lo, hi) = T0_RANGE;
    let h = (hi - lo) / (T0_SCAN - 1) as f64;
    let best = (0..T0_SCAN)
        .map(|i| eval(lo + i as f64 * h))
        .min_by(|a, b| a.check.lhs.total_cmp(&b.check.lhs))
        .expect("scan is nonempty");
    let a = (best.t0 - h).max(lo);
    let b = (best.t0 + h).min(hi);
    let (t0, _) = golden_max(&|t| -eval(t).check.lhs, a, b, 1e-12);
    let refined = eval(t0);
    if refined.check.lhs < best.check.lhs {
        refined
    } else {
        best
    }
}

/// One row of the `(κ, N)` sweep: shell-uniform `θ` on every nonempty shell
/// `|k|² ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub kappa: f64,
    pub max_shell: u32,
    pub support: usize,
    pub theta_sup: f64,
    pub condition: AvgCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// Smallest `κ`, then smallest `N` at that `κ`, meeting the condition.
    pub first: Option<SweepPoint>,
    /// Per `κ`, the smallest satisfying `N` if any.
    pub per_kappa: Vec<(f64, Option<u32>)>,
    pub evaluated: usize,
}

/// Shell-uniform level on all nonempty shells with `|k|² ≤ max_shell`.
pub fn shell_uniform_level(dim: usize, max_shell: u32) -> Option<ThetaLevel> {
    let radii: Vec<u32> = (1..=max_shell).filter(|&r| plap_noise::build_shells(dim, &[r]).is_ok()).collect();
    ThetaLevel::uniform(dim, &radii).ok()
}

pub fn sweep_condition_avg(consts: &ProblemConstants, kappas: &[f64], max_shell: u32, mu: f64, r: f64) -> SweepReport {
    let levels: Vec<(u32, ThetaLevel)> =
        (1..=max_shell).filter_map(|n| shell_uniform_level(consts.dim, n).map(|l| (n, l))).collect();
    let mut first = None;
    let mut per_kappa = Vec::with_capacity(kappas.len());
    let mut evaluated = 0;
    for &kappa in kappas {
        let mut found = None;
        for (n, level) in &levels {
            evaluated += 1;
            let condition = search_condition_avg(consts, kappa, level.sup_norm(), mu, r);
            if condition.check.satisfied {
                found = Some(*n);
                if first.is_none() {
                    first = Some(SweepPoint {
                        kappa,
                        max_shell: *n,
                        support: level.support_len(),
                        theta_sup: level.sup_norm(),
                        condition,
                    });
                }
                break;
            }
        }
        per_kappa.push((kappa, found));
    }
    SweepReport { first, per_kappa, evaluated }
}

/// Both halves of the step-doubling condition, with `μ_n = 2ⁿμ₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathwiseCondition {
    pub c1: f64,
    /// `min{1/(1+μ₀(p-2)R^{p-2}), 1/3}`.
    pub threshold: f64,
    pub c1_ok: bool,
    /// `C₂(θ^{(n)}, 2ⁿμ₀)` for `n = 0, 1, ...`.
    pub c2: Vec<f64>,
    pub c2_ok: Vec<bool>,
}

impl PathwiseCondition {
    pub fn satisfied(&self) -> bool {
        self.c1_ok && self.c2_ok.iter().all(|&ok| ok)
    }
}

/// Evaluates levels `n < n_levels`; a schedule reuses its last level beyond
/// the listed ones, so the sup over all `n` is only probed up to `n_levels`.
pub fn check_condition_pathwise(
    consts: &ProblemConstants,
    kappa: f64,
    theta: &ThetaSpec,
    mu0: f64,
    r: f64,
    n_levels: usize,
) -> PathwiseCondition {
    let p = consts.p;
    let threshold = (1.0 / (1.0 + mu0 * (p - 2.0) * r.powf(p - 2.0))).min(1.0 / 3.0);
    let c1 = consts.c1(kappa, 1.0, r);
    let c2: Vec<f64> = (0..n_levels).map(|n| consts.c2(theta.level(n).sup_norm(), 2f64.powi(n as i32) * mu0)).collect();
    let c2_ok = c2.iter().map(|&c| c <= threshold).collect();
    PathwiseCondition { c1, threshold, c1_ok: c1 <= threshold, c2, c2_ok }
}
