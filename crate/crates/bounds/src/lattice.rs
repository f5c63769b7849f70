use std::f64::consts::PI;

use plap_spectral::SPECTRAL_GAP;
use serde::Serialize;

use crate::BoundsError;

/// `Λ_β = (Σ_{l≠0} λ_l^{1-β})^{1/β}` with a two-sided enclosure of the
/// truncated tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaBeta {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// `upper - lower`.
    pub tail_width: f64,
}

/// Sums `|l|^{-s}` over `0 < |l| ≤ trunc` directly and encloses the rest by
/// comparing each lattice point with the unit cube around it: on that cube
/// `|x| - c ≤ |l| ≤ |x| + c` with `c = √d/2`.
pub fn lambda_beta(beta: f64, dim: usize, trunc: u32) -> Result<LambdaBeta, BoundsError> {
    if dim != 2 && dim != 3 {
        return Err(BoundsError::Dimension(dim));
    }
    if !(beta > dim as f64 / 2.0 + 1.0) || !beta.is_finite() {
        return Err(BoundsError::Beta { beta, dim });
    }
    if trunc < 10 {
        return Err(BoundsError::Truncation(trunc));
    }
    let s = 2.0 * beta - 2.0;
    let head = lattice_head(dim, trunc as i64, s);
    let c = (dim as f64).sqrt() / 2.0;
    let r = trunc as f64;
    let upper_tail = shell_integral(dim, r - 2.0 * c, c, s);
    let lower_tail = shell_integral(dim, r + 2.0 * c, -c, s);

    // λ_l^{1-β} = (4π²)^{1-β} |l|^{-s}
    let scale = SPECTRAL_GAP.powf(1.0 - beta);
    let root = |sum: f64| (scale * sum).powf(1.0 / beta);
    let lower = root(head + lower_tail);
    let upper = root(head + upper_tail);
    Ok(LambdaBeta { value: 0.5 * (lower + upper), lower, upper, tail_width: upper - lower })
}

/// `Σ_{0<|l|≤R} |l|^{-s}`, summed shell by shell so the float order is fixed.
fn lattice_head(dim: usize, trunc: i64, s: f64) -> f64 {
    let r2 = trunc * trunc;
    let mut counts = vec![0u64; r2 as usize + 1];
    for a in -trunc..=trunc {
        let ra = a * a;
        for b in -trunc..=trunc {
            let rb = ra + b * b;
            if rb > r2 {
                continue;
            }
            if dim == 2 {
                counts[rb as usize] += 1;
                continue;
            }
            let room = ((r2 - rb) as f64).sqrt() as i64;
            for cc in -room..=room {
                let rc = rb + cc * cc;
                if rc <= r2 {
                    counts[rc as usize] += 1;
                }
            }
        }
    }
    // Largest shells first keeps the small terms from being swamped.
    counts.iter().enumerate().skip(1).rev().map(|(m, &n)| n as f64 * (m as f64).powf(-s / 2.0)).sum()
}

/// `ω_d ∫_a^∞ (σ + shift)^{d-1} σ^{-s} dσ`, expanded binomially.
fn shell_integral(dim: usize, a: f64, shift: f64, s: f64) -> f64 {
    let omega = if dim == 2 { 2.0 * PI } else { 4.0 * PI };
    let power_tail = |j: f64| a.powf(j + 1.0 - s) / (s - j - 1.0);
    let sum = match dim {
        2 => power_tail(1.0) + shift * power_tail(0.0),
        _ => power_tail(2.0) + 2.0 * shift * power_tail(1.0) + shift * shift * power_tail(0.0),
    };
    omega * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_counts_small_shells() {
        // only the four (six in 3D) unit vectors lie within radius 1
        let h = lattice_head(2, 1, 4.0);
        assert!((h - 4.0).abs() < 1e-15);
        let h3 = lattice_head(3, 1, 2.0);
        assert!((h3 - 6.0).abs() < 1e-15);
    }
}
