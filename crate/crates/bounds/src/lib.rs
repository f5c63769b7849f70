//! Constants and sufficient conditions for transport noise to speed up the
//! decay of `du = Δ_p u dt + ∇u ∘ dW` on `T^d`, plus the elementary
//! inequalities that chain per-interval estimates into decay envelopes.
//!
//! Everything here is closed-form arithmetic except `Λ_β` (a lattice sum with
//! an enclosed tail) and `C₀` (a probed supremum, hence a lower estimate).

mod constants;
mod heat;
mod lattice;
mod lemmas;

pub use constants::{
    check_condition_avg, check_condition_pathwise, constants_c1_c2, eta, search_condition_avg, shell_uniform_level,
    sweep_condition_avg, AvgCondition, ConditionCheck, PathwiseCondition, ProblemConstants, SweepPoint, SweepReport,
};
pub use heat::{heat_constant_c0, standard_probes, C0Estimate};
pub use lattice::{lambda_beta, LambdaBeta};
pub use lemmas::{
    case2_factor, chebyshev_bound, decay_envelope_avg, decay_envelope_geometric, decay_map, iterate_decay_map,
    lemma_convexity, lemma_iteration, moment_exponent_limit, pathwise_inequality, pathwise_threshold_sq,
    random_constant, stretched_exp, telescoped_chain, v1_average_factor, IterationCheck,
};

use plap_noise::ThetaLevel;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("beta = {beta} must exceed d/2 + 1 = {} for the lattice sum to converge", *dim as f64 / 2.0 + 1.0)]
    Beta { beta: f64, dim: usize },
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error("truncation radius {0} is below 10")]
    Truncation(u32),
    #[error("exponent p = {p} is outside the admissible range for dimension {dim}")]
    Exponent { p: f64, dim: usize },
    #[error("time horizon {0} must be positive and finite")]
    Horizon(f64),
    #[error("C0 and Lambda_beta must be finite, with Lambda_beta positive")]
    Constant,
    #[error("lemma hypothesis violated: {0}")]
    Hypothesis(&'static str),
}

/// Every constant that enters the averaged-decay condition for one choice of
/// noise, and the verdict at the best `t₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub d: usize,
    pub p: f64,
    pub beta: f64,
    pub eta: f64,
    /// Lower estimate unless the caller supplied an analytic value.
    pub c0: f64,
    pub lambda_beta: f64,
    pub kappa: f64,
    pub mu: f64,
    pub r: f64,
    pub theta_sup: f64,
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
    pub condition_lhs: f64,
    pub condition_margin: f64,
    pub satisfied: bool,
}

impl BoundsReport {
    pub fn new(consts: &ProblemConstants, kappa: f64, theta: &ThetaLevel, mu: f64, r: f64) -> BoundsReport {
        let best = search_condition_avg(consts, kappa, theta.sup_norm(), mu, r);
        BoundsReport {
            d: consts.dim(),
            p: consts.p(),
            beta: consts.beta(),
            eta: consts.eta(),
            c0: consts.c0(),
            lambda_beta: consts.lambda_beta(),
            kappa,
            mu,
            r,
            theta_sup: theta.sup_norm(),
            t0: best.t0,
            c1: best.c1,
            c2: best.c2,
            condition_lhs: best.check.lhs,
            condition_margin: best.check.margin,
            satisfied: best.check.satisfied,
        }
    }
}
