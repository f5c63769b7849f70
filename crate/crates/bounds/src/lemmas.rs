use serde::Serialize;

use crate::BoundsError;

/// Relative slack allowed when testing the iteration hypotheses and the
/// composed bound, which are often tight.
const TIGHT: f64 = 1e-12;

/// Both sides of `1 - 2x/(p-2) ≤ (1+x)^{-2/(p-2)}`.
pub fn lemma_convexity(p: f64, x: f64) -> (f64, f64) {
    let q = p - 2.0;
    (1.0 - 2.0 * x / q, (1.0 + x).powf(-2.0 / q))
}

/// `x ↦ x / (1 + c x^{(p-2)/2})^{2/(p-2)}`.
///
/// With `y = x^{-(p-2)/2}` this is `y ↦ y + c`, so maps compose by adding
/// their `c`.
pub fn decay_map(x: f64, c: f64, p: f64) -> f64 {
    let q = p - 2.0;
    if x == 0.0 {
        return 0.0;
    }
    x / (1.0 + c * x.powf(0.5 * q)).powf(2.0 / q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationCheck {
    /// `decay_map(x, a + b, p)`.
    pub bound: f64,
    pub holds: bool,
}

/// If `y ≤ decay_map(x, a)` and `z ≤ decay_map(y, b)` then
/// `z ≤ decay_map(x, a + b)`. Inputs breaking a hypothesis are rejected.
pub fn lemma_iteration(p: f64, x: f64, a: f64, b: f64, y: f64, z: f64) -> Result<IterationCheck, BoundsError> {
    if !(p > 2.0) {
        return Err(BoundsError::Exponent { p, dim: 0 });
    }
    if !(a >= 0.0 && b >= 0.0 && x >= 0.0 && y >= 0.0 && z >= 0.0) {
        return Err(BoundsError::Hypothesis("a, b, x, y, z must be nonnegative"));
    }
    if y > decay_map(x, a, p) * (1.0 + TIGHT) {
        return Err(BoundsError::Hypothesis("y exceeds the first-step bound"));
    }
    if z > decay_map(y, b, p) * (1.0 + TIGHT) {
        return Err(BoundsError::Hypothesis("z exceeds the second-step bound"));
    }
    let bound = decay_map(x, a + b, p);
    Ok(IterationCheck { bound, holds: z <= bound * (1.0 + TIGHT) })
}

/// `n` applications of `decay_map(·, c)` starting from `x`.
pub fn iterate_decay_map(x: f64, c: f64, n: usize, p: f64) -> f64 {
    (0..n).fold(x, |acc, _| decay_map(acc, c, p))
}

/// Closed form of the averaged chain after `n` intervals of length `t₀`:
/// `‖u₀‖² / (1 + μ′(p-2)n t₀ ‖u₀‖^{p-2})^{2/(p-2)}`.
pub fn telescoped_chain(u0_sq: f64, mu_prime: f64, t0: f64, n: usize, p: f64) -> f64 {
    decay_map(u0_sq, mu_prime * (p - 2.0) * n as f64 * t0, p)
}

/// `‖u₀‖ / (1 + (p-2)μt‖u₀‖^{p-2})^{1/(p-2)}`, meant for `t ≥ 1`.
pub fn decay_envelope_avg(u0_norm: f64, t: f64, mu: f64, p: f64) -> f64 {
    let q = p - 2.0;
    u0_norm / (1.0 + q * mu * t * u0_norm.powf(q)).powf(1.0 / q)
}

/// Norm-level bound at `t = n` under the step-doubling schedule:
/// the square root of `‖u₀‖² / (1 + μ₀(p-2)(2ⁿ-1)‖u₀‖^{p-2})^{2/(p-2)}`.
pub fn decay_envelope_geometric(u0_norm: f64, n: u32, mu0: f64, p: f64) -> f64 {
    let q = p - 2.0;
    let growth = 2f64.powi(n as i32) - 1.0;
    u0_norm / (1.0 + mu0 * q * growth * u0_norm.powf(q)).powf(1.0 / q)
}

/// Squared threshold of the event `A_n`:
/// `‖u₀‖² / (1 + μ₀(p-2)n‖u₀‖^{p-2})^{2/(p-2)}`.
pub fn pathwise_threshold_sq(u0_norm: f64, n: u32, mu0: f64, p: f64) -> f64 {
    decay_map(u0_norm * u0_norm, mu0 * (p - 2.0) * n as f64, p)
}

/// Chebyshev bound on `P(A_n)`: the geometric envelope over the event
/// threshold, both squared.
pub fn chebyshev_bound(u0_norm: f64, n: u32, mu0: f64, p: f64) -> f64 {
    let q = p - 2.0;
    let s = u0_norm.powf(q);
    ((1.0 + mu0 * q * n as f64 * s) / (1.0 + mu0 * q * (2f64.powi(n as i32) - 1.0) * s)).powf(2.0 / q)
}

/// Moments `E C(ω)^q` are finite for `q` below `ln 2 / (μ₀(p-2)²)`.
pub fn moment_exponent_limit(mu0: f64, p: f64) -> f64 {
    std::f64::consts::LN_2 / (mu0 * (p - 2.0).powi(2))
}

/// `C(ω) = e^{μ₀(p-2)(1+N(ω))}`.
pub fn random_constant(mu0: f64, p: f64, last_event: u32) -> f64 {
    (mu0 * (p - 2.0) * (1.0 + last_event as f64)).exp()
}

/// `exp(-1/x^{p-2})`, taken as 0 at `x = 0`.
pub fn stretched_exp(norm: f64, p: f64) -> f64 {
    if norm <= 0.0 {
        return 0.0;
    }
    (-norm.powf(2.0 - p)).exp()
}

/// Both sides of `exp(-1/‖u(t)‖^{p-2}) ≤ C e^{-(p-2)μ₀t} exp(-1/‖u₀‖^{p-2})`.
pub fn pathwise_inequality(norm_t: f64, t: f64, u0_norm: f64, c: f64, mu0: f64, p: f64) -> (f64, f64) {
    (stretched_exp(norm_t, p), c * (-(p - 2.0) * mu0 * t).exp() * stretched_exp(u0_norm, p))
}

/// `(1 - e^{-4π²κt₀})/(4π²κt₀)`, the time-average of `‖v₁‖/‖u(t_n)‖` when all
/// energy sits on the lowest shell, and an upper bound otherwise.
pub fn v1_average_factor(kappa: f64, t0: f64) -> f64 {
    let x = plap_spectral::SPECTRAL_GAP * kappa * t0;
    if x < 1e-12 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Case-2 per-interval contraction of `E‖u‖²`:
/// `(C₁^{2/(p-2)} + C₂^{2/(p-2)}) / 2`.
pub fn case2_factor(c1: f64, c2: f64, p: f64) -> f64 {
    let e = 2.0 / (p - 2.0);
    0.5 * (c1.powf(e) + c2.powf(e))
}
