//! `Δ_p u = div(|∇u|^{p-2} ∇u)` on the torus, evaluated pseudo-spectrally.
//!
//! The flux `|∇u|^{p-2}∇u` is formed pointwise on the grid, so the discrete
//! pairing `⟨Δ_p u, u⟩` equals minus the grid quadrature of `|∇u|^p` up to
//! round-off whenever `u` is dealiased.

use plap_spectral::{PhysicalField, SpectralError, SpectralField, VectorField};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("exponent p = {p} is outside (2, {upper}) for dimension {dim}")]
    Exponent { p: f64, dim: usize, upper: f64 },
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Nonlinearity exponent, `2 < p < 2d/(d-2)` (no upper limit when `d = 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    dim: usize,
}

impl PExponent {
    pub fn new(p: f64, dim: usize) -> Result<PExponent, OperatorError> {
        let upper = PExponent::upper_limit(dim)?;
        if !(p > 2.0 && p < upper) {
            return Err(OperatorError::Exponent { p, dim, upper });
        }
        Ok(PExponent { p, dim })
    }

    /// Skips the range check. Only for probing the `p = 2` limit in tests.
    pub fn unchecked(p: f64, dim: usize) -> PExponent {
        PExponent { p, dim }
    }

    /// `2d/(d-2)`, infinite for `d = 2`.
    pub fn upper_limit(dim: usize) -> Result<f64, OperatorError> {
        match dim {
            2 => Ok(f64::INFINITY),
            3 => Ok(6.0),
            d => Err(OperatorError::Dimension(d)),
        }
    }

    pub fn value(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `Δ_p u` together with the by-products the time stepper needs.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: SpectralField,
    /// `∫|∇u|^p` by grid quadrature.
    pub grad_norm_p: f64,
    /// `max_x |∇u(x)|` over grid points.
    pub max_grad: f64,
    /// Point values of `∇u`, reusable by other pointwise products.
    pub gradient: Vec<PhysicalField>,
}

pub fn evaluate(u: &SpectralField, p: PExponent) -> Evaluation {
    let grid = u.grid();
    let grad = u.gradient().to_physical();
    let len = grid.len();
    let half = 0.5 * (p.value() - 2.0);
    let mut flux: Vec<Vec<f64>> = vec![vec![0.0; len]; grad.len()];
    let mut sum_p = 0.0;
    let mut max_sq: f64 = 0.0;
    for i in 0..len {
        let s: f64 = grad.iter().map(|g| g.values()[i] * g.values()[i]).sum();
        max_sq = max_sq.max(s);
        // z ↦ |z|^{p-2} z is continuous with value 0 at z = 0
        let w = if s > 0.0 {
            s.powf(half)
        } else if half == 0.0 {
            1.0
        } else {
            0.0
        };
        sum_p += w * s;
        for (f, g) in flux.iter_mut().zip(&grad) {
            f[i] = w * g.values()[i];
        }
    }
    let parts: Vec<PhysicalField> =
        flux.into_iter().map(|f| PhysicalField::new(grid, f).expect("flux has grid length")).collect();
    let mut value = VectorField::from_physical(&parts).expect("components share the grid").divergence();
    value.dealias_in_place();
    Evaluation { value, grad_norm_p: sum_p / len as f64, max_grad: max_sq.sqrt(), gradient: grad }
}

pub fn apply_plaplace(u: &SpectralField, p: PExponent) -> SpectralField {
    evaluate(u, p).value
}

/// `⟨Δ_p u, u⟩` and `‖∇u‖^p_{L^p}`; the first is minus the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipation {
    pub pairing: f64,
    pub grad_norm_p: f64,
}

pub fn dissipativity_pairing(u: &SpectralField, p: PExponent) -> Dissipation {
    let e = evaluate(u, p);
    let pairing = e.value.inner(u).expect("same grid");
    Dissipation { pairing, grad_norm_p: e.grad_norm_p }
}

/// Deterministic decay bound
/// `‖u₀‖ / (1 + (p-2) λ₁^{p/2} t ‖u₀‖^{p-2})^{1/(p-2)}`.
pub fn deterministic_envelope(u0_norm: f64, t: f64, p: PExponent, lambda1: f64) -> f64 {
    let q = p.value() - 2.0;
    u0_norm / (1.0 + q * lambda1.powf(0.5 * p.value()) * t * u0_norm.powf(q)).powf(1.0 / q)
}
