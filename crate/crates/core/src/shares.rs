//! Monte-Carlo models of the clause-selection share ratios a random
//! extension induces.
//!
//! When a base formula is extended with implied clauses, each drawn
//! independently with probability `p` from fixed pools, three ratios
//! govern how a local-search step interacts with the extension at a given
//! assignment:
//!
//! * the **flip share** `A / (ℓ (A + B))` — the chance that a uniformly
//!   chosen unsatisfied *implied* clause both contains a fixed variable
//!   and flips it, where `A ~ Bin(n_in, p)` counts unsatisfied implied
//!   clauses containing the variable and `B ~ Bin(n_out, p)` those
//!   avoiding it;
//! * the **base share** `m / (m + U)` — the fraction of unsatisfied
//!   clauses belonging to the base formula, with `U ~ Bin(n_pool, p)`
//!   unsatisfied implied clauses and `m` a fixed base count;
//! * the **extension share** `U / (m + U)`, its complement.
//!
//! All three are smooth functions of binomial counts, so as the pools
//! grow they converge to bounded, log-ratio-driven laws of Johnson SB
//! type. The simulators here realize finite-pool versions of those
//! variables so the fitting machinery can check the asymptotic claims,
//! and [`binomial_log_mean_moments`] checks the underlying limit: the log
//! of a Bernoulli sample mean is asymptotically normal with mean `ln p`
//! and variance `(1 - p) / (n p)`.
//!
//! Zero denominators are rejected and flagged, never regularized: in the
//! asymptotic regime they are vanishingly rare, and nudging them would
//! bias the fits. A rejection rate above 10% aborts instead.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fit::{FitError, Sample};
use crate::rng::{derive_seed, BinomialSampler, Rng, Role};

/// Share simulations fail on malformed regimes, not on unlucky draws —
/// except when bad luck (zero denominators) stops being rare.
#[derive(Debug, Error)]
pub enum ShareError {
    /// The base formula must contribute at least one unsatisfied clause.
    #[error("base unsatisfied-clause count must be at least 1")]
    NoBaseUnsat,
    /// Inclusion probability outside the open unit interval.
    #[error("inclusion probability {p} outside (0, 1)")]
    BadInclusionProb {
        /// Offending value.
        p: f64,
    },
    /// Clause length must be positive.
    #[error("clause length must be at least 1")]
    BadClauseLen,
    /// Too few repetitions for a usable sample.
    #[error("need at least 1000 repetitions, got {got}")]
    TooFewReps {
        /// Requested repetitions.
        got: u64,
    },
    /// Zero-denominator draws exceeded the abort threshold.
    #[error("{rejected} of {reps} repetitions rejected (zero denominator); \
             pools too sparse for the asymptotic regime")]
    RejectionRateTooHigh {
        /// Rejected repetitions.
        rejected: u64,
        /// Requested repetitions.
        reps: u64,
    },
    /// The Bernoulli mean is too coarse for the lognormal limit.
    #[error("n*p*(1-p) = {npq:.2} is below 50; too far from the lognormal regime")]
    RegimeTooThin {
        /// The observed n·p·(1−p).
        npq: f64,
    },
}

/// Abort threshold: more than 10% rejected repetitions.
const MAX_REJECTION_PERCENT: u64 = 10;

/// Pool sizes and draw parameters for the share simulators.
///
/// Pools may be zero — the spec'd degenerate cases (`avoiding = 0` makes
/// the flip share a point mass, `implied_unsat = 0` makes the base share
/// identically 1) are legitimate — but the base formula must contribute
/// at least one unsatisfied clause, since every ratio divides by
/// `base_unsat + U`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SharePools {
    /// Implied clauses unsatisfied and containing the tracked variable.
    pub containing: u64,
    /// Implied clauses unsatisfied and avoiding the tracked variable.
    pub avoiding: u64,
    /// Implied clauses unsatisfied at the assignment driving the
    /// base/extension shares.
    pub implied_unsat: u64,
    /// Unsatisfied base-formula clauses (a fixed count, not a pool).
    pub base_unsat: u64,
    /// Independent inclusion probability for each pool clause.
    pub inclusion_prob: f64,
    /// Uniform clause length of the implied clauses.
    pub clause_len: u32,
}

impl SharePools {
    /// Validates the regime: `base_unsat >= 1`, `inclusion_prob` in
    /// `(0, 1)`, `clause_len >= 1`.
    pub fn new(
        containing: u64,
        avoiding: u64,
        implied_unsat: u64,
        base_unsat: u64,
        inclusion_prob: f64,
        clause_len: u32,
    ) -> Result<Self, ShareError> {
        if base_unsat == 0 {
            return Err(ShareError::NoBaseUnsat);
        }
        if !(inclusion_prob > 0.0 && inclusion_prob < 1.0) {
            return Err(ShareError::BadInclusionProb { p: inclusion_prob });
        }
        if clause_len == 0 {
            return Err(ShareError::BadClauseLen);
        }
        Ok(SharePools {
            containing,
            avoiding,
            implied_unsat,
            base_unsat,
            inclusion_prob,
            clause_len,
        })
    }
}

/// A simulated share sample plus its rejection bookkeeping.
#[derive(Debug, Clone)]
pub struct SimulatedShares {
    /// Accepted realizations, in repetition order.
    pub values: Vec<f64>,
    /// Repetitions dropped for a zero denominator.
    pub rejected: u64,
    /// Repetitions requested.
    pub reps: u64,
}

impl SimulatedShares {
    /// Fraction of repetitions rejected.
    pub fn rejection_rate(&self) -> f64 {
        self.rejected as f64 / self.reps as f64
    }

    /// Converts to a fitting [`Sample`] (single run per point, untainted).
    pub fn into_sample(self) -> Result<Sample, FitError> {
        Sample::new(self.values, 1, false)
    }
}

fn check_reps(reps: u64) -> Result<(), ShareError> {
    if reps < 1000 {
        return Err(ShareError::TooFewReps { got: reps });
    }
    Ok(())
}

fn collect_rejecting(
    reps: u64,
    draws: Vec<Option<f64>>,
) -> Result<SimulatedShares, ShareError> {
    let mut values = Vec::with_capacity(draws.len());
    let mut rejected = 0u64;
    for d in draws {
        match d {
            Some(v) => values.push(v),
            None => rejected += 1,
        }
    }
    if rejected * 100 > reps * MAX_REJECTION_PERCENT {
        return Err(ShareError::RejectionRateTooHigh { rejected, reps });
    }
    Ok(SimulatedShares { values, rejected, reps })
}

/// Simulates the flip share `A / (ℓ (A + B))`.
///
/// Draws `A ~ Bin(containing, p)` and `B ~ Bin(avoiding, p)`
/// independently per repetition; `A = 0` repetitions are rejected.
/// Outputs lie in `(0, 1/ℓ]`. Repetitions run on seeds derived from
/// `seed`, in parallel.
pub fn simulate_flip_share(
    pools: &SharePools,
    reps: u64,
    seed: u64,
) -> Result<SimulatedShares, ShareError> {
    check_reps(reps)?;
    let in_sampler = BinomialSampler::new(pools.containing, pools.inclusion_prob);
    let out_sampler = BinomialSampler::new(pools.avoiding, pools.inclusion_prob);
    let ell = pools.clause_len as f64;
    let draws: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let a = in_sampler.sample(&mut rng);
            let b = out_sampler.sample(&mut rng);
            if a == 0 {
                None
            } else {
                Some(a as f64 / (ell * (a + b) as f64))
            }
        })
        .collect();
    collect_rejecting(reps, draws)
}

/// Simulates the base share `m / (m + U)` with `U ~ Bin(implied_unsat, p)`.
///
/// Never rejects: `U = 0` legitimately yields 1. Outputs lie in `(0, 1]`.
pub fn simulate_base_share(
    pools: &SharePools,
    reps: u64,
    seed: u64,
) -> Result<SimulatedShares, ShareError> {
    check_reps(reps)?;
    let sampler = BinomialSampler::new(pools.implied_unsat, pools.inclusion_prob);
    let m = pools.base_unsat as f64;
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let u = sampler.sample(&mut rng);
            m / (m + u as f64)
        })
        .collect();
    Ok(SimulatedShares { values, rejected: 0, reps })
}

/// Simulates the extension share `U / (m + U)`, rejecting `U = 0`.
/// Outputs lie in `(0, 1)`.
pub fn simulate_ext_share(
    pools: &SharePools,
    reps: u64,
    seed: u64,
) -> Result<SimulatedShares, ShareError> {
    check_reps(reps)?;
    let sampler = BinomialSampler::new(pools.implied_unsat, pools.inclusion_prob);
    let m = pools.base_unsat as f64;
    let draws: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let u = sampler.sample(&mut rng);
            if u == 0 {
                None
            } else {
                Some(u as f64 / (m + u as f64))
            }
        })
        .collect();
    collect_rejecting(reps, draws)
}

/// Simulates the base and extension shares from the *same* `U` draws, so
/// the two samples are exact pathwise complements: `base[i] + ext[i] = 1`
/// for every accepted repetition (the extension leg is emitted as
/// `1 - base` to make the identity hold to the last bit). Repetitions
/// with `U = 0` are rejected from both legs to keep them aligned.
pub fn simulate_paired_shares(
    pools: &SharePools,
    reps: u64,
    seed: u64,
) -> Result<(SimulatedShares, SimulatedShares), ShareError> {
    check_reps(reps)?;
    let sampler = BinomialSampler::new(pools.implied_unsat, pools.inclusion_prob);
    let m = pools.base_unsat as f64;
    let draws: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let u = sampler.sample(&mut rng);
            if u == 0 {
                None
            } else {
                Some(m / (m + u as f64))
            }
        })
        .collect();
    let base = collect_rejecting(reps, draws)?;
    let ext_values: Vec<f64> = base.values.iter().map(|&b| 1.0 - b).collect();
    let ext = SimulatedShares { values: ext_values, rejected: base.rejected, reps };
    Ok((base, ext))
}

/// Moment check of the lognormal limit for Bernoulli sample means.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogMeanMomentReport {
    /// Bernoulli trials per sample mean.
    pub trials: u64,
    /// Bernoulli success probability.
    pub prob: f64,
    /// Repetitions requested.
    pub reps: u64,
    /// Repetitions rejected for a zero sample mean.
    pub rejected: u64,
    /// Observed mean of `ln(sample mean)`.
    pub mean_log: f64,
    /// Observed variance of `ln(sample mean)`.
    pub var_log: f64,
    /// Asymptotic mean `ln p`.
    pub expected_mean: f64,
    /// Asymptotic variance `(1 - p) / (n p)`.
    pub expected_var: f64,
    /// `|mean_log - expected_mean|` in Monte Carlo standard errors.
    pub mean_dev_se: f64,
    /// `|var_log - expected_var|` in standard errors of the variance.
    pub var_dev_se: f64,
}

/// Draws `reps` sample means of `n` Bernoulli(`p`) trials and compares
/// the first two moments of their logs against the asymptotic normal law
/// `N(ln p, (1 - p)/(n p))`.
///
/// Requires `n p (1 - p) >= 50` (otherwise the regime is too coarse for
/// the limit to mean anything). `p = 1` is accepted as the degenerate
/// case where everything — observed and expected — is exactly zero.
/// Zero sample means are rejected and flagged in the report.
pub fn binomial_log_mean_moments(
    n: u64,
    p: f64,
    reps: u64,
    seed: u64,
) -> Result<LogMeanMomentReport, ShareError> {
    check_reps(reps)?;
    if p == 1.0 {
        return Ok(LogMeanMomentReport {
            trials: n,
            prob: p,
            reps,
            rejected: 0,
            mean_log: 0.0,
            var_log: 0.0,
            expected_mean: 0.0,
            expected_var: 0.0,
            mean_dev_se: 0.0,
            var_dev_se: 0.0,
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(ShareError::BadInclusionProb { p });
    }
    let npq = n as f64 * p * (1.0 - p);
    if npq < 50.0 {
        return Err(ShareError::RegimeTooThin { npq });
    }
    let sampler = BinomialSampler::new(n, p);
    let draws: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let t = sampler.sample(&mut rng);
            if t == 0 {
                None
            } else {
                Some((t as f64 / n as f64).ln())
            }
        })
        .collect();
    let logs: Vec<f64> = draws.iter().flatten().copied().collect();
    let rejected = reps - logs.len() as u64;
    let kept = logs.len() as f64;
    let mean_log = logs.iter().sum::<f64>() / kept;
    let var_log =
        logs.iter().map(|&v| (v - mean_log) * (v - mean_log)).sum::<f64>() / (kept - 1.0);
    let expected_mean = p.ln();
    let expected_var = (1.0 - p) / (n as f64 * p);
    let se_mean = (var_log / kept).sqrt();
    let se_var = var_log * (2.0 / (kept - 1.0)).sqrt();
    Ok(LogMeanMomentReport {
        trials: n,
        prob: p,
        reps,
        rejected,
        mean_log,
        var_log,
        expected_mean,
        expected_var,
        mean_dev_se: (mean_log - expected_mean).abs() / se_mean,
        var_dev_se: (var_log - expected_var).abs() / se_var,
    })
}
