use plap_bounds::{decay_envelope_avg, decay_envelope_geometric, decay_map};

use crate::{EnsembleSummary, Estimate, Schedule, CI_SIGMAS};

/// The interval dichotomy: strong dissipation
/// `E∫‖∇u‖^p ≥ μ t₀ (E‖u(t_n)‖²)^{p/2}` (Case 1) or its strict negation
/// (Case 2). `Undetermined` when the confidence band straddles the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Case1,
    Case2,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalLabel {
    pub n: usize,
    pub mu: f64,
    pub dissipation: f64,
    pub threshold: f64,
    /// Standard error of `dissipation - threshold`, the threshold linearised
    /// in the mean energy and paired path by path.
    pub std_err: f64,
    pub case: Case,
}

/// Paired standard error of `mean(a) - g(mean(b))` with `g'(mean(b)) = slope`.
fn paired_std_err(a: &[f64], b: &[f64], slope: f64) -> f64 {
    let z: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - slope * y).collect();
    Estimate::from_samples(&z).std_err
}

pub fn classify_interval(summary: &EnsembleSummary, n: usize, mu: f64) -> IntervalLabel {
    let half_p = 0.5 * summary.p;
    let e = summary.energy_samples(n);
    let d = summary.dissipation_samples(n);
    let mean_e = summary.energy[n].mean;
    let dissipation = summary.dissipation[n].mean;
    let threshold = mu * summary.t0 * mean_e.powf(half_p);
    let slope = mu * summary.t0 * half_p * mean_e.powf(half_p - 1.0);
    let std_err = paired_std_err(&d, &e, slope);
    let gap = dissipation - threshold;
    let case = if threshold <= 0.0 || gap - CI_SIGMAS * std_err >= 0.0 {
        Case::Case1
    } else if gap + CI_SIGMAS * std_err < 0.0 {
        Case::Case2
    } else {
        Case::Undetermined
    };
    IntervalLabel { n, mu, dissipation, threshold, std_err, case }
}

/// Decay at `t_n` against the one-step bound from `t_{n-1}` and the
/// cumulative envelope from `u₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub n: usize,
    pub energy: Estimate,
    /// `E‖u(t_{n-1})‖² / (1 + μ_{n-1}(p-2)t₀ (E‖u(t_{n-1})‖²)^{(p-2)/2})^{2/(p-2)}`
    /// with `μ_{n-1} = 2^{n-1}μ` under step doubling.
    pub one_step: f64,
    /// `one_step - (energy + 3σ)`, σ paired across the two times.
    pub one_step_margin: f64,
    pub one_step_holds: bool,
    /// `‖u₀‖²/(1 + μ(p-2)t_n ‖u₀‖^{p-2})^{2/(p-2)}`, or the geometric
    /// `2ⁿ - 1` form under step doubling on unit intervals.
    pub cumulative: f64,
    pub cumulative_margin: f64,
    pub cumulative_holds: bool,
    /// Label of the interval that ends at `t_n`.
    pub case: Case,
}

const ROUNDING: f64 = 1e-12;

pub fn check_avg_decay(summary: &EnsembleSummary, mu: f64) -> Vec<DecayCheck> {
    let p = summary.p;
    let q = p - 2.0;
    let u0 = summary.u0_norm;
    let unit_doubling = matches!(summary.schedule, Schedule::StepDoubling { .. })
        && summary.steps_per_unit == Some(summary.steps_per_interval);
    (1..=summary.intervals())
        .map(|n| {
            let rate = if unit_doubling { mu * 2f64.powi(n as i32 - 1) } else { mu };
            let c = rate * q * summary.t0;
            let prev = summary.energy[n - 1].mean;
            let one_step = decay_map(prev, c, p);
            // d/dx of x(1 + c x^{q/2})^{-2/q} is (1 + c x^{q/2})^{-2/q - 1}
            let slope = (1.0 + c * prev.powf(0.5 * q)).powf(-2.0 / q - 1.0);
            let sigma = paired_std_err(&summary.energy_samples(n), &summary.energy_samples(n - 1), slope);
            let energy = summary.energy[n];
            let one_step_margin = one_step - (energy.mean + CI_SIGMAS * sigma);
            let cumulative = if unit_doubling {
                decay_envelope_geometric(u0, n as u32, mu, p).powi(2)
            } else {
                decay_envelope_avg(u0, n as f64 * summary.t0, mu, p).powi(2)
            };
            let cumulative_margin = cumulative - energy.upper();
            DecayCheck {
                n,
                energy,
                one_step,
                one_step_margin,
                one_step_holds: one_step_margin >= -ROUNDING * one_step,
                cumulative,
                cumulative_margin,
                cumulative_holds: cumulative_margin >= -ROUNDING * cumulative,
                case: classify_interval(summary, n - 1, rate).case,
            }
        })
        .collect()
}
