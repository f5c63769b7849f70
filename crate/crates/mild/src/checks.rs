use plap_bounds::{case2_factor, ProblemConstants};
use plap_spectral::SPECTRAL_GAP;

use crate::MildSplit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(value: f64, bound: f64) -> BoundCheck {
        BoundCheck { value, bound, holds: value <= bound * (1.0 + 1e-12) }
    }
}

/// `V₁ ≤ ‖u(t_n)‖/(4π²κt₀)`, a pathwise fact.
pub fn check_v1_bound(split: &MildSplit, kappa: f64, t0: f64) -> BoundCheck {
    BoundCheck::new(split.v1_avg, split.u_start_norm / (SPECTRAL_GAP * kappa * t0))
}

/// `V₂ ≤ C₀/(κ^η t₀^{η-1/p}) R^{1-2/p} ‖u(t_n)‖`. With an estimated `C₀` a
/// failure is a finding about the estimate, not about the run.
pub fn check_v2_bound(split: &MildSplit, consts: &ProblemConstants, kappa: f64, t0: f64, r: f64) -> BoundCheck {
    let p = consts.p();
    let per_r = consts.v2_average_bound(kappa, t0, 1.0);
    BoundCheck::new(split.v2_avg, per_r * r.powf(1.0 - 2.0 / p) * split.u_start_norm)
}

/// Monte Carlo `E V₃²` against its lemma bound on one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V3Moment {
    pub paths: usize,
    pub mean_dissipation: f64,
    /// `μ t₀ (E‖u(t_n)‖²)^{p/2}`; the lemma needs the mean dissipation below it.
    pub case2_threshold: f64,
    pub applicable: bool,
    pub estimate: f64,
    pub std_err: f64,
    pub bound: f64,
    /// `estimate + 3 std_err ≤ bound`; `false` when not applicable.
    pub holds: bool,
}

/// `E∫‖∇u‖^p / (t₀ (E‖u(t_n)‖²)^{p/2})`: the interval is in the weakly
/// dissipating case exactly for `μ` above this.
pub fn case2_mu_floor(splits: &[MildSplit], p: f64) -> f64 {
    let m = splits.len() as f64;
    let t0 = splits.first().map_or(0.0, |s| s.t_end - s.t_start);
    let mean_u_sq = splits.iter().map(|s| s.u_start_norm * s.u_start_norm).sum::<f64>() / m;
    let mean_dissipation = splits.iter().map(|s| s.dissipation).sum::<f64>() / m;
    mean_dissipation / (t0 * mean_u_sq.powf(0.5 * p))
}

/// `splits` are the same interval on independent paths.
pub fn check_v3_moment(splits: &[MildSplit], consts: &ProblemConstants, theta_sup: f64, mu: f64) -> V3Moment {
    let m = splits.len() as f64;
    let t0 = splits.first().map_or(0.0, |s| s.t_end - s.t_start);
    let mean = |f: &dyn Fn(&MildSplit) -> f64| splits.iter().map(f).sum::<f64>() / m;
    let mean_u_sq = mean(&|s| s.u_start_norm * s.u_start_norm);
    let mean_dissipation = mean(&|s| s.dissipation);
    let case2_threshold = mu * t0 * mean_u_sq.powf(0.5 * consts.p());
    let applicable = splits.len() > 1 && mean_dissipation < case2_threshold;
    let estimate = mean(&|s| s.v3_avg * s.v3_avg);
    let var = splits.iter().map(|s| (s.v3_avg * s.v3_avg - estimate).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let std_err = (var / m).sqrt();
    let bound = consts.v3_mean_square_bound(theta_sup, mu, mean_u_sq);
    V3Moment {
        paths: splits.len(),
        mean_dissipation,
        case2_threshold,
        applicable,
        estimate,
        std_err,
        bound,
        holds: applicable && estimate + 3.0 * std_err <= bound,
    }
}

/// The chain `E‖u(t_{n+1})‖² ≤ 3(E V₁² + E V₂² + E V₃²) ≤ ½(C₁^{2/(p-2)} + C₂^{2/(p-2)}) E‖u(t_n)‖²`
/// evaluated on one interval's ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Pipeline {
    pub mean_end_sq: f64,
    /// `3(E V₁² + E V₂² + E V₃²)`.
    pub cauchy: f64,
    /// `3(b₁² + b₂² + b₃)` with the three lemma bounds.
    pub lemma_sum: f64,
    /// `½(C₁^{2/(p-2)} + C₂^{2/(p-2)}) E‖u(t_n)‖²`.
    pub constants: f64,
    pub cauchy_holds: bool,
    /// `lemma_sum` and `constants` are the same number written two ways.
    pub arithmetic_matches: bool,
}

pub fn case2_pipeline(
    splits: &[MildSplit],
    consts: &ProblemConstants,
    kappa: f64,
    r: f64,
    theta_sup: f64,
    mu: f64,
) -> Case2Pipeline {
    let m = splits.len() as f64;
    let p = consts.p();
    let t0 = splits.first().map_or(0.0, |s| s.t_end - s.t_start);
    let mean = |f: &dyn Fn(&MildSplit) -> f64| splits.iter().map(f).sum::<f64>() / m;
    let mean_start_sq = mean(&|s| s.u_start_norm * s.u_start_norm);
    let mean_end_sq = mean(&|s| s.u_end_norm * s.u_end_norm);
    let cauchy = 3.0 * mean(&|s| s.v1_avg * s.v1_avg + s.v2_avg * s.v2_avg + s.v3_avg * s.v3_avg);

    let b1_sq = mean_start_sq / (SPECTRAL_GAP * kappa * t0).powi(2);
    let b2_sq = (consts.v2_average_bound(kappa, t0, 1.0) * r.powf(1.0 - 2.0 / p)).powi(2) * mean_start_sq;
    let b3 = consts.v3_mean_square_bound(theta_sup, mu, mean_start_sq);
    let lemma_sum = 3.0 * (b1_sq + b2_sq + b3);
    let factor = case2_factor(consts.c1(kappa, t0, r), consts.c2(theta_sup, mu), p);
    let constants = factor * mean_start_sq;
    Case2Pipeline {
        mean_end_sq,
        cauchy,
        lemma_sum,
        constants,
        cauchy_holds: mean_end_sq <= cauchy,
        arithmetic_matches: (lemma_sum - constants).abs() <= 1e-12 * constants.max(f64::MIN_POSITIVE),
    }
}
