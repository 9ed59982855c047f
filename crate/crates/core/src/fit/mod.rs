//! Distribution fitting and goodness-of-fit testing for hardness samples.
//!
//! The unit of data is a [`Sample`] of per-instance mean flip counts. The
//! module fits Johnson SB and lognormal families by maximum likelihood
//! ([`mle_fit_sb`], [`mle_fit_lognormal`]), measures fit quality with an
//! equiprobable-bin chi-square statistic ([`chi2_statistic`]) and the exact
//! Kolmogorov–Smirnov distance ([`ks_distance`]), and decides
//! accept/reject with a parametric bootstrap that re-injects the
//! measurement noise of the original experiment ([`bootstrap_test`]).

mod bootstrap;
mod chi2;
mod ecdf;
mod mle;
pub(crate) mod simplex;

pub use bootstrap::{bootstrap_test, BootstrapConfig, NoiseModel};
pub use chi2::{chi2_statistic, Chi2Stat};
pub use ecdf::{ecdf, empirical_quantile, ks_distance, Ecdf};
pub use mle::{mle_fit_lognormal, mle_fit_sb};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{ContinuousDist, LogNormalParams, SbParams};

/// Fitting and testing failures.
#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    /// Empty sample.
    #[error("sample is empty")]
    EmptySample,
    /// A sample value was nonfinite or not strictly positive.
    #[error("sample value {value} at index {index} is not a positive finite number")]
    BadValue {
        /// Position in the input.
        index: usize,
        /// The offending value.
        value: f64,
    },
    /// Too few points for the requested operation.
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints {
        /// Minimum required.
        needed: usize,
        /// Actual count.
        got: usize,
    },
    /// All sample values identical; no spread to fit.
    #[error("sample is constant ({value}); nothing to fit")]
    ConstantSample {
        /// The repeated value.
        value: f64,
    },
    /// A probability argument outside its open domain.
    #[error("probability {q} outside (0, 1)")]
    BadProbability {
        /// The offending value.
        q: f64,
    },
    /// The optimizer never reached a finite log-likelihood.
    #[error("optimizer failed to find a finite log-likelihood")]
    OptimizerFailed,
    /// The fitted cdf is flat across the whole sample range.
    #[error("fitted cdf is not increasing over the sample range")]
    CdfNotIncreasing,
    /// Bootstrap parameters out of range.
    #[error("bootstrap needs N >= 1 and alpha in (0, 1); got N = {n}, alpha = {alpha}")]
    BadBootstrapArgs {
        /// Replicate count.
        n: usize,
        /// Significance level.
        alpha: f64,
    },
    /// Too many bootstrap replicates failed to refit.
    #[error("{failed} of {total} bootstrap replicates failed to refit (tolerance 5%)")]
    TooManyRefitFailures {
        /// Failed replicate count.
        failed: usize,
        /// Total replicates.
        total: usize,
    },
    /// The noise model's length does not match the sample.
    #[error("noise model supplies {got} variances for {expected} points")]
    NoiseLengthMismatch {
        /// Points in the sample.
        expected: usize,
        /// Variances supplied.
        got: usize,
    },
}

/// A sample of per-instance hardness values (mean flips per instance).
///
/// `runs` is the number of solver runs behind each point — the divisor
/// that turns a per-run flip variance into the variance of the recorded
/// mean. `tainted` flags samples where some runs hit the flip budget, so
/// the recorded means are right-censored underestimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    runs: u32,
    tainted: bool,
}

impl Sample {
    /// Validates positivity and finiteness of every value.
    pub fn new(values: Vec<f64>, runs: u32, tainted: bool) -> Result<Self, FitError> {
        if values.is_empty() {
            return Err(FitError::EmptySample);
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(FitError::BadValue { index, value });
            }
        }
        Ok(Sample { values, runs, tainted })
    }

    /// The observations.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the sample is empty (never true for a constructed sample).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Solver runs averaged into each point.
    pub fn runs(&self) -> u32 {
        self.runs
    }

    /// Whether any contributing run was budget-censored.
    pub fn tainted(&self) -> bool {
        self.tainted
    }
}

/// Distribution family of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Four-parameter Johnson SB.
    Sb,
    /// Three-parameter (shifted) lognormal.
    LogNormal3,
    /// Two-parameter lognormal.
    LogNormal2,
}

impl Family {
    /// Number of free parameters estimated from data.
    pub fn n_params(self) -> usize {
        match self {
            Family::Sb => 4,
            Family::LogNormal3 => 3,
            Family::LogNormal2 => 2,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Sb => write!(f, "sb"),
            Family::LogNormal3 => write!(f, "lognormal3"),
            Family::LogNormal2 => write!(f, "lognormal2"),
        }
    }
}

/// Fitted parameters, tagged only by their field names in JSON
/// (`gamma`/`delta`/`lambda`/`xi` vs `mu`/`sigma`/`xi`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitParams {
    /// Johnson SB parameters.
    Sb(SbParams),
    /// Lognormal parameters.
    LogNormal(LogNormalParams),
}

impl FitParams {
    /// View as a distribution for evaluation.
    pub fn as_dist(&self) -> &dyn ContinuousDist {
        match self {
            FitParams::Sb(p) => p,
            FitParams::LogNormal(p) => p,
        }
    }
}

/// Accept/reject outcome of a goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The bootstrap did not reject the family.
    Accept,
    /// The bootstrap rejected the family at the configured level.
    Reject,
    /// No test was run; the report only carries the fit.
    NotTested,
}

/// A complete fit-plus-test record, serializable as one JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Which family was fitted.
    pub family: Family,
    /// The fitted parameters.
    pub params: FitParams,
    /// Attained log-likelihood.
    pub loglik: f64,
    /// Chi-square statistic over equiprobable bins.
    pub chi2: f64,
    /// Degrees of freedom: `bins - 1 - n_params`.
    pub dof: i64,
    /// Number of equiprobable bins.
    pub bins: usize,
    /// Bootstrap p-value, when a test ran.
    pub bootstrap_pvalue: Option<f64>,
    /// Decision at the configured significance level.
    pub verdict: Verdict,
    /// Sample size behind the fit.
    pub n: usize,
    /// Master seed of the bootstrap, when a test ran.
    pub seed: Option<u64>,
}

/// Fits a family and computes its chi-square statistic without running the
/// bootstrap: the `verdict` is [`Verdict::NotTested`].
pub fn fit_report(sample: &Sample, family: Family) -> Result<FitReport, FitError> {
    let (params, loglik) = match family {
        Family::Sb => {
            let (p, ll) = mle_fit_sb(sample)?;
            (FitParams::Sb(p), ll)
        }
        Family::LogNormal3 => {
            let (p, ll) = mle_fit_lognormal(sample, true)?;
            (FitParams::LogNormal(p), ll)
        }
        Family::LogNormal2 => {
            let (p, ll) = mle_fit_lognormal(sample, false)?;
            (FitParams::LogNormal(p), ll)
        }
    };
    let stat = chi2_statistic(sample.values(), params.as_dist(), family.n_params())?;
    Ok(FitReport {
        family,
        params,
        loglik,
        chi2: stat.chi2,
        dof: stat.dof,
        bins: stat.bins,
        bootstrap_pvalue: None,
        verdict: Verdict::NotTested,
        n: sample.len(),
        seed: None,
    })
}
