use plap_bounds::{chebyshev_bound, moment_exponent_limit, pathwise_threshold_sq};

use crate::{EnsembleError, EnsembleSummary, Estimate, Schedule, CI_SIGMAS};

/// Frequency of `A_n = {sup_{[n,n+1]} ‖u‖² ≥ ‖u₀‖²/(1 + μ₀(p-2)n‖u₀‖^{p-2})^{2/(p-2)}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRow {
    pub n: usize,
    pub threshold_sq: f64,
    pub count: usize,
    pub freq: f64,
    /// Binomial, `√(f(1-f)/M)`.
    pub std_err: f64,
    /// The Chebyshev ratio with the geometric mean-decay bound plugged in.
    /// It bounds `P(A_n)` only where that mean bound holds.
    pub chebyshev_geometric: f64,
    /// `Ê‖u(n)‖² / threshold`: the same Chebyshev step on the measured mean.
    pub chebyshev_empirical: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub q: f64,
    /// `E exp(μ₀(p-2) q N(ω))`.
    pub estimate: Estimate,
    pub below_limit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathwiseStats {
    pub mu0: f64,
    pub p: f64,
    pub u0_norm: f64,
    /// Whole unit intervals simulated.
    pub horizon: usize,
    pub events: Vec<EventRow>,
    /// `N(ω)`, the last `n` with `A_n`, per path in summary order.
    pub last_event: Vec<u32>,
    /// Paths whose last event is in the last interval, so `N(ω)` is only a
    /// lower bound.
    pub censored: usize,
    /// `histogram[k]` paths with `N(ω) = k`.
    pub histogram: Vec<usize>,
    /// `ln C(ω) = μ₀(p-2)(1 + N(ω))` per path; `C(ω)` itself overflows for
    /// the large `μ₀` that desk-scale runs need.
    pub ln_random_constants: Vec<f64>,
    /// `ln 2/(μ₀(p-2)²)`.
    pub moment_limit: f64,
    pub moments: Vec<MomentRow>,
    /// First `n ≥ 1` where the measured mean contracts at least as fast as
    /// the event threshold: `Ê‖u(n)‖²/Ê‖u(n-1)‖² ≤ thr_n/thr_{n-1}`.
    pub crossover: Option<usize>,
    /// `Σ_{m ≥ n} freq(A_m)`.
    pub tail_sums: Vec<f64>,
}

impl PathwiseStats {
    /// `freq(A_{n+1}) ≤ freq(A_n) + 3σ` for every `n` from the crossover on.
    pub fn monotone_beyond_crossover(&self) -> bool {
        let Some(start) = self.crossover else {
            return false;
        };
        self.events.windows(2).skip(start).all(|w| {
            let band = CI_SIGMAS * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
            w[1].freq <= w[0].freq + band
        })
    }

    /// Tail sums never grow and the last one is strictly below the first.
    pub fn tail_shrinks(&self) -> bool {
        let sums = &self.tail_sums;
        sums.windows(2).all(|w| w[1] <= w[0]) && sums.last() < sums.first()
    }

    /// `freq(A_n) ≤ Ê‖u(n)‖²/thr_n + 3σ` on every interval.
    pub fn chebyshev_consistent(&self) -> bool {
        self.events.iter().all(|e| e.freq <= e.chebyshev_empirical + CI_SIGMAS * e.std_err)
    }
}

const MOMENT_GRID: [f64; 5] = [0.25, 0.5, 0.75, 1.5, 2.0];

/// The event statistics on unit intervals. With noise off this is the
/// deterministic baseline; a constant noise schedule is rejected.
pub fn pathwise_stats(summary: &EnsembleSummary, mu0: f64) -> Result<PathwiseStats, EnsembleError> {
    if summary.schedule == Schedule::Constant {
        return Err(EnsembleError::Schedule);
    }
    let spu = summary.steps_per_unit.ok_or(EnsembleError::UnitIntervals)?;
    let p = summary.p;
    if !(p > 2.0) {
        return Err(EnsembleError::Exponent(p));
    }
    let u0 = summary.u0_norm;
    if u0 == 0.0 {
        return Err(EnsembleError::ZeroInitial);
    }
    let steps = summary.paths[0].ledger.len() as u64 - 1;
    let horizon = (steps / spu) as usize;
    let paths = summary.paths.len();
    let m = paths as f64;
    let thresholds: Vec<f64> = (0..horizon).map(|n| pathwise_threshold_sq(u0, n as u32, mu0, p)).collect();

    let mut occurred = vec![vec![false; horizon]; paths];
    for (row, rec) in occurred.iter_mut().zip(&summary.paths) {
        for (n, hit) in row.iter_mut().enumerate() {
            let a = n * spu as usize;
            *hit = rec.ledger.max_energy_between(a, a + spu as usize) >= thresholds[n];
        }
    }
    let mean_energy = |n: usize| {
        let xs: Vec<f64> = summary.paths.iter().map(|r| r.energy_at(n as u64 * spu)).collect();
        Estimate::from_samples(&xs).mean
    };

    let events: Vec<EventRow> = (0..horizon)
        .map(|n| {
            let count = occurred.iter().filter(|row| row[n]).count();
            let freq = count as f64 / m;
            EventRow {
                n,
                threshold_sq: thresholds[n],
                count,
                freq,
                std_err: (freq * (1.0 - freq) / m).sqrt(),
                chebyshev_geometric: chebyshev_bound(u0, n as u32, mu0, p),
                chebyshev_empirical: mean_energy(n) / thresholds[n],
            }
        })
        .collect();

    let last_event: Vec<u32> = occurred.iter().map(|row| row.iter().rposition(|&h| h).unwrap_or(0) as u32).collect();
    let censored = last_event.iter().filter(|&&k| horizon > 0 && k as usize == horizon - 1).count();
    let mut histogram = vec![0; horizon.max(1)];
    for &k in &last_event {
        histogram[k as usize] += 1;
    }
    let q = p - 2.0;
    let ln_random_constants = last_event.iter().map(|&k| mu0 * q * (1.0 + k as f64)).collect();
    let moment_limit = moment_exponent_limit(mu0, p);
    let moments = MOMENT_GRID
        .iter()
        .map(|&f| {
            let qm = f * moment_limit;
            let xs: Vec<f64> = last_event.iter().map(|&k| (mu0 * q * qm * k as f64).exp()).collect();
            MomentRow { q: qm, estimate: Estimate::from_samples(&xs), below_limit: qm < moment_limit }
        })
        .collect();

    let crossover = (1..horizon).find(|&n| mean_energy(n) / mean_energy(n - 1) <= thresholds[n] / thresholds[n - 1]);
    let mut tail_sums = vec![0.0; horizon];
    let mut acc = 0.0;
    for n in (0..horizon).rev() {
        acc += events[n].freq;
        tail_sums[n] = acc;
    }
    Ok(PathwiseStats {
        mu0,
        p,
        u0_norm: u0,
        horizon,
        events,
        last_event,
        censored,
        histogram,
        ln_random_constants,
        moment_limit,
        moments,
        crossover,
        tail_sums,
    })
}

/// `‖u₀‖/(1 + ((p-2)μ₀t - ln C)‖u₀‖^{p-2})^{1/(p-2)}`, or `+∞` while the bracket
/// is not positive (the bound says nothing yet).
pub fn pathwise_envelope(t: f64, mu0: f64, p: f64, u0_norm: f64, c: f64) -> f64 {
    let q = p - 2.0;
    let base = 1.0 + (q * mu0 * t - c.ln()) * u0_norm.powf(q);
    if base <= 0.0 {
        return f64::INFINITY;
    }
    u0_norm / base.powf(1.0 / q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub path: u64,
    pub step: u64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Every recorded step of every path checked against
/// `exp(-1/‖u(t)‖^{p-2}) ≤ C(ω) e^{-(p-2)μ₀t} exp(-1/‖u₀‖^{p-2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwiseReplay {
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// Smallest `rhs - lhs`, both sides taken in logarithms.
    pub min_slack: f64,
}

/// Compared in logarithms, where `exp(-1/0₊) = 0` becomes `-∞` and nothing
/// underflows.
pub fn replay_pathwise(summary: &EnsembleSummary, stats: &PathwiseStats) -> PathwiseReplay {
    let q = stats.p - 2.0;
    let spu = summary.steps_per_unit.unwrap_or(1);
    let last = stats.horizon as u64 * spu;
    let base = -stats.u0_norm.powf(-q);
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    for (rec, &ln_c) in summary.paths.iter().zip(&stats.ln_random_constants) {
        for j in 0..=last {
            let norm = rec.energy_at(j).sqrt();
            let lhs = if norm > 0.0 { -norm.powf(-q) } else { f64::NEG_INFINITY };
            let rhs = ln_c - q * stats.mu0 * summary.dt * j as f64 + base;
            checked += 1;
            min_slack = min_slack.min(rhs - lhs);
            if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                violations.push(Violation { path: rec.path, step: j, lhs, rhs });
            }
        }
    }
    PathwiseReplay { checked, violations, min_slack }
}
