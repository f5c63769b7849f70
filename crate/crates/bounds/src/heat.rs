use plap_spectral::{random_band_limited, Complex64, Grid, Norm, SpectralField};
use serde::Serialize;

use crate::{eta, BoundsError};

/// Numerical stand-in for the heat-semigroup constant
/// `‖e^{tΔ}φ‖_{W^{1,p}} ≤ C t^{-η} ‖φ‖_{L²}`.
///
/// `sup_ratio` is the largest `t^η ‖e^{tΔ}φ‖_{W^{1,p}} / ‖φ‖_{L²}` seen over
/// the probes, so it bounds the true `C` from below, and so does `c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C0Estimate {
    pub eta: f64,
    pub sup_ratio: f64,
    /// `sup_ratio / (1 - η)`.
    pub c0: f64,
    pub argmax_t: f64,
    pub argmax_probe: usize,
    pub lower_estimate: bool,
}

/// Single modes `√2 cos(2πk·x)` for every positive `k` with `|k|² ≤ max_norm_sq`
/// that the grid resolves, followed by `random` band-limited fields.
pub fn standard_probes(grid: Grid, max_norm_sq: i64, random: usize, seed: u64) -> Vec<SpectralField> {
    let mut probes = Vec::new();
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for idx in 0..grid.len() {
        let k = grid.mode_at(idx);
        if k.is_positive() && k.norm_sq() <= max_norm_sq && k.sup_norm() <= grid.cutoff() as i64 {
            let f = SpectralField::from_modes(grid, &[(k, amp), (k.neg(), amp)])
                .expect("a dealiased mode is representable");
            probes.push(f);
        }
    }
    for r in 0..random {
        probes.push(random_band_limited(grid, grid.cutoff(), 1.0, seed.wrapping_add(r as u64)).with_l2_norm(1.0));
    }
    probes
}

/// Maximises over a logarithmic `t` grid on `[t_horizon·1e-6, t_horizon]`,
/// then refines each probe's best grid point by golden section.
///
/// `p ≥ 2` is accepted so the `p = 2` closed form can be checked.
pub fn heat_constant_c0(
    grid: Grid,
    p: f64,
    t_horizon: f64,
    probes: &[SpectralField],
    t_points: usize,
) -> Result<C0Estimate, BoundsError> {
    if !(t_horizon > 0.0 && t_horizon.is_finite()) {
        return Err(BoundsError::Horizon(t_horizon));
    }
    if !(p >= 2.0) {
        return Err(BoundsError::Exponent { p, dim: grid.dim() });
    }
    let eta = eta(grid.dim(), p);
    let t_points = t_points.max(2);
    let log_lo = (t_horizon * 1e-6).ln();
    let log_hi = t_horizon.ln();
    let mut best = (0.0, t_horizon, 0);
    for (i, phi) in probes.iter().enumerate() {
        let norm = phi.l2_norm();
        if norm == 0.0 {
            continue;
        }
        let ratio = |log_t: f64| {
            let t = log_t.exp();
            let w = phi.heat(t).norm(Norm::W1p(p)).expect("p ≥ 2 was checked");
            t.powf(eta) * w / norm
        };
        let step = (log_hi - log_lo) / (t_points - 1) as f64;
        let (mut at, mut val) = (0, f64::NEG_INFINITY);
        for j in 0..t_points {
            let r = ratio(log_lo + j as f64 * step);
            if r > val {
                (at, val) = (j, r);
            }
        }
        let a = log_lo + at.saturating_sub(1) as f64 * step;
        let b = (log_lo + (at + 1) as f64 * step).min(log_hi);
        let (log_t, refined) = golden_max(&ratio, a, b, 1e-10);
        let (log_t, val) = if refined > val { (log_t, refined) } else { (log_lo + at as f64 * step, val) };
        if val > best.0 {
            best = (val, log_t.exp(), i);
        }
    }
    Ok(C0Estimate {
        eta,
        sup_ratio: best.0,
        c0: best.0 / (1.0 - eta),
        argmax_t: best.1,
        argmax_probe: best.2,
        lower_estimate: true,
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol * (1.0 + a.abs().max(b.abs())) {
        if f1 < f2 {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
