//! When does restarting a randomized solver beat letting it run?
//!
//! For a runtime variable `X` with quantile function `Q`, the functional
//!
//! ```text
//! R(p) = ((1 - p) * Q(p) + integral_0^p Q(u) du) / E[X]
//! ```
//!
//! equals `E[min(X, Q(p))] / E[X]`, and the expected runtime when
//! restarting at threshold `t = Q(p)` is `E[X] * R(p) / p`. Restarts are
//! *useful* exactly when `R(p) < p` somewhere; the best threshold
//! minimizes the slowdown ratio `R(p)/p`. Long-tailed runtime laws always
//! have such a point near `p -> 1`, and infinite-mean laws trivially so
//! (`R` collapses to 0). This module evaluates `R` for empirical samples
//! (exactly, via the piecewise-linear empirical quantile) and parametric
//! models (adaptive quadrature), issues usefulness verdicts, and validates
//! them against direct Monte Carlo simulation of the restarted process.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dist::{
    classify_hazard_trend, hazard_rate, ContinuousDist, DistError, HazardTrend,
};
use crate::fit::{FitError, Sample};
use crate::quad::{self, QuadError};
use crate::rng::{derive_seed, Rng, Role};

/// Epoch cap per Monte Carlo repetition; at any success probability of
/// practical interest the probability of ever hitting it is negligible.
const MAX_RESTART_EPOCHS: u64 = 100_000;

/// Mean integral ceiling past which a parametric model is declared to
/// have infinite expectation.
const MEAN_DIVERGENCE_THRESHOLD: f64 = 1e15;

/// A grid point only witnesses usefulness when `p - R(p)` clears this;
/// otherwise quadrature noise on an exactly-memoryless law would flag it.
const WITNESS_EPS: f64 = 1e-9;

/// Analysis failures.
#[derive(Debug, Error)]
pub enum RestartError {
    /// `p` outside the open unit interval.
    #[error("probability {p} outside (0, 1)")]
    BadProbability {
        /// Offending value.
        p: f64,
    },
    /// Nonpositive restart threshold.
    #[error("restart threshold {t} must be positive")]
    BadThreshold {
        /// Offending value.
        t: f64,
    },
    /// Not enough Monte Carlo repetitions for a meaningful standard error.
    #[error("need at least 1000 repetitions, got {got}")]
    TooFewReps {
        /// Requested repetitions.
        got: u64,
    },
    /// The distribution puts no mass at or below the threshold.
    #[error("success probability at threshold {t} is numerically zero")]
    NoMassBelowThreshold {
        /// The threshold.
        t: f64,
    },
    /// A time grid that is not strictly increasing.
    #[error("grid must be nonempty and strictly increasing")]
    GridNotIncreasing,
    /// Runtimes cannot be negative.
    #[error("support starts at {lo}; runtime distributions start at or above 0")]
    NegativeSupport {
        /// Lower support endpoint.
        lo: f64,
    },
    /// Propagated distribution error (e.g. survival saturation).
    #[error(transparent)]
    Dist(#[from] DistError),
    /// Propagated quadrature error.
    #[error(transparent)]
    Quad(#[from] QuadError),
    /// Propagated sample error.
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Empirical runtime model: sorted sample plus the exact running integral
/// of its piecewise-linear quantile interpolant.
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    sorted: Vec<f64>,
    /// `prefix[k]` = integral of Q̂ from 0 to the plotting position
    /// `(k + 0.5)/n`.
    prefix: Vec<f64>,
    mean: f64,
}

impl EmpiricalModel {
    fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let nf = n as f64;
        let mut prefix = Vec::with_capacity(n);
        // Flat head up to the first plotting position.
        prefix.push(sorted[0] * 0.5 / nf);
        for k in 1..n {
            let segment = (sorted[k - 1] + sorted[k]) * 0.5 / nf;
            prefix.push(prefix[k - 1] + segment);
        }
        let mean = sorted.iter().sum::<f64>() / nf;
        EmpiricalModel { sorted, prefix, mean }
    }

    fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let h = p * n as f64 - 0.5;
        if h <= 0.0 {
            return self.sorted[0];
        }
        if h >= (n - 1) as f64 {
            return self.sorted[n - 1];
        }
        let k = h.floor() as usize;
        let frac = h - k as f64;
        self.sorted[k] + frac * (self.sorted[k + 1] - self.sorted[k])
    }

    /// Exact integral of the interpolated quantile over `(0, p)`. By
    /// construction the full integral over `(0, 1)` equals the sample
    /// mean exactly (up to rounding), so `R(1) = 1` with no quadrature
    /// error.
    fn quantile_integral(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let nf = n as f64;
        let h = p * nf - 0.5;
        if h <= 0.0 {
            return self.sorted[0] * p;
        }
        if h >= (n - 1) as f64 {
            let tail = p - ((n - 1) as f64 + 0.5) / nf;
            return self.prefix[n - 1] + self.sorted[n - 1] * tail;
        }
        let k = h.floor() as usize;
        let w = (h - k as f64) / nf; // distance past position k, in p units
        let slope = (self.sorted[k + 1] - self.sorted[k]) * nf;
        self.prefix[k] + self.sorted[k] * w + 0.5 * slope * w * w
    }
}

/// A runtime distribution under restart analysis: either raw data or a
/// fitted/parametric law.
#[derive(Debug)]
pub enum RuntimeModel {
    /// Sample-based model using the plotting-position quantile.
    Empirical(EmpiricalModel),
    /// Distribution-based model; `mean` is `None` when the expectation is
    /// (numerically) infinite.
    Parametric {
        /// The runtime law.
        dist: Box<dyn ContinuousDist>,
        /// Cached expectation; `None` means divergent.
        mean: Option<f64>,
    },
}

impl RuntimeModel {
    /// Builds an empirical model from a sample of runtimes.
    pub fn from_sample(sample: &Sample) -> Self {
        RuntimeModel::Empirical(EmpiricalModel::new(sample.values()))
    }

    /// Wraps a parametric law, computing its mean (closed form when the
    /// family has one, otherwise a survival-function integral with
    /// divergence detection). The support must start at or above zero:
    /// runtimes are nonnegative.
    pub fn parametric(dist: Box<dyn ContinuousDist>) -> Result<Self, RestartError> {
        let (lo, _) = dist.support();
        if !(lo >= 0.0) {
            return Err(RestartError::NegativeSupport { lo });
        }
        let mean = match dist.mean() {
            Some(m) => Some(m),
            None => numeric_mean(dist.as_ref())?,
        };
        Ok(RuntimeModel::Parametric { dist, mean })
    }

    /// The model's expectation; `None` for infinite-mean parametric laws.
    pub fn mean(&self) -> Option<f64> {
        match self {
            RuntimeModel::Empirical(e) => Some(e.mean),
            RuntimeModel::Parametric { mean, .. } => *mean,
        }
    }

    /// Quantile under the model.
    pub fn quantile(&self, p: f64) -> Result<f64, RestartError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(RestartError::BadProbability { p });
        }
        Ok(match self {
            RuntimeModel::Empirical(e) => e.quantile(p),
            RuntimeModel::Parametric { dist, .. } => dist.quantile(p),
        })
    }
}

/// Numeric expectation `lo + integral of survival`, windowed geometrically
/// with divergence detection. Returns `None` for (numerically) infinite
/// means.
fn numeric_mean(dist: &dyn ContinuousDist) -> Result<Option<f64>, RestartError> {
    let (lo, hi) = dist.support();
    if hi.is_finite() {
        let s = quad::integrate(|x| dist.survival(x), lo, hi, 1e-10 * (hi - lo).max(1.0))?;
        return Ok(Some(lo + s));
    }
    let mut total = 0.0;
    let mut a = lo;
    let mut width = 1.0f64.max(lo.abs());
    for _ in 0..200 {
        let b = a + width;
        let chunk = quad::integrate(|x| dist.survival(x), a, b, 1e-12 * width.max(1.0))?;
        total += chunk;
        if total > MEAN_DIVERGENCE_THRESHOLD {
            return Ok(None);
        }
        if chunk <= 1e-12 * total.max(1e-300) {
            return Ok(Some(lo + total));
        }
        a = b;
        width *= 2.0;
    }
    // Windows grew past ~2^200 without the tail settling: call it infinite.
    Ok(None)
}

/// The restart functional `R(p) = E[min(X, Q(p))] / E[X]`.
///
/// Empirical models evaluate `(1 - p) Q̂(p) + ∫₀ᵖ Q̂` exactly from the
/// prefix integrals. Parametric models use the nonnegative-variable
/// identity `E[min(X, t)] = ∫₀ᵗ S(x) dx`, whose integrand is smooth and
/// bounded (the quantile itself has a vertical tangent at 0 for
/// log-scale laws, which defeats adaptive quadrature); the tolerance
/// sits far below the 1e-9 the analytic oracles demand. Infinite-mean
/// models short-circuit to 0 (any finite truncation is infinitely
/// better than the mean).
pub fn r_functional(model: &RuntimeModel, p: f64) -> Result<f64, RestartError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(RestartError::BadProbability { p });
    }
    let Some(mean) = model.mean() else {
        return Ok(0.0);
    };
    let value = match model {
        RuntimeModel::Empirical(e) => {
            ((1.0 - p) * e.quantile(p) + e.quantile_integral(p)) / mean
        }
        RuntimeModel::Parametric { dist, .. } => {
            let t = dist.quantile(p);
            let lo = dist.support().0;
            let body = if t > lo {
                quad::integrate(|x| dist.survival(x), lo, t, 1e-12 * mean.max(1e-12))?
            } else {
                0.0
            };
            (lo + body) / mean
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Usefulness verdict; serializes as
/// `{useful, witness_p, witness_threshold, margin, grid_size}`.
#[derive(Debug, Clone, Serialize)]
pub struct RestartVerdict {
    /// Whether some grid point has `R(p) < p`.
    pub useful: bool,
    /// The best witness probability (minimizing `R(p)/p`), when useful.
    pub witness_p: Option<f64>,
    /// The restart threshold `Q(witness_p)`, when useful.
    pub witness_threshold: Option<f64>,
    /// `p - R(p)` at the witness; when not useful, the largest (least
    /// negative) value of `p - R(p)` seen on the grid.
    pub margin: f64,
    /// Number of grid points scanned.
    pub grid_size: usize,
}

/// The default scan grid: 512 points log-spaced in `1 - p`, from
/// `p = 0.05` up to `p = 0.9999`. Density concentrates near 1 because
/// that is where long-tailed laws develop their witness; past
/// `1 - p = 1e-4` empirical models run out of tail data, so the scan
/// stops there.
pub fn default_probability_grid() -> Vec<f64> {
    let n = 512;
    let start = 0.95f64.log10();
    let end = -4.0;
    (0..n)
        .map(|i| {
            let l = start + (end - start) * i as f64 / (n - 1) as f64;
            1.0 - 10f64.powf(l)
        })
        .collect()
}

/// Scans `R(p) - p` over a probability grid and reports the best witness.
///
/// "Best" = the point minimizing the restarted-to-plain runtime ratio
/// `R(p)/p`, which is exactly the expected speedup of restarting at
/// `Q(p)`. Pass `None` to use [`default_probability_grid`].
pub fn restarts_useful(
    model: &RuntimeModel,
    grid: Option<&[f64]>,
) -> Result<RestartVerdict, RestartError> {
    let default_grid;
    let grid = match grid {
        Some(g) => g,
        None => {
            default_grid = default_probability_grid();
            &default_grid
        }
    };
    let mut best_ratio = f64::INFINITY;
    let mut witness: Option<(f64, f64)> = None; // (p, R(p))
    let mut best_margin = f64::NEG_INFINITY;
    for &p in grid {
        let r = r_functional(model, p)?;
        best_margin = best_margin.max(p - r);
        let ratio = r / p;
        if p - r > WITNESS_EPS && ratio < best_ratio {
            best_ratio = ratio;
            witness = Some((p, r));
        }
    }
    match witness {
        Some((p, r)) => Ok(RestartVerdict {
            useful: true,
            witness_p: Some(p),
            witness_threshold: Some(model.quantile(p)?),
            margin: p - r,
            grid_size: grid.len(),
        }),
        None => Ok(RestartVerdict {
            useful: false,
            witness_p: None,
            witness_threshold: None,
            margin: best_margin,
            grid_size: grid.len(),
        }),
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    /// Sample mean of the per-repetition totals.
    pub mean: f64,
    /// Standard error of that mean.
    pub std_error: f64,
    /// Repetitions used.
    pub reps: u64,
}

/// Simulates the restarted process directly: draw `X`; on `X <= t` finish
/// in `elapsed + X`, otherwise pay `t` and redraw.
///
/// Repetitions run in parallel on seeds derived from `seed`, so the
/// estimate is reproducible regardless of thread count.
pub fn restarted_mean_mc(
    dist: &dyn ContinuousDist,
    t: f64,
    reps: u64,
    seed: u64,
) -> Result<McEstimate, RestartError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(RestartError::BadThreshold { t });
    }
    if reps < 1000 {
        return Err(RestartError::TooFewReps { got: reps });
    }
    if dist.cdf(t) <= 0.0 {
        return Err(RestartError::NoMassBelowThreshold { t });
    }
    let totals: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(derive_seed(seed, Role::Simulation, i));
            let mut elapsed = 0.0;
            for _ in 0..MAX_RESTART_EPOCHS {
                let x = dist.sample(&mut rng);
                if x <= t {
                    return elapsed + x;
                }
                elapsed += t;
            }
            elapsed
        })
        .collect();
    let n = totals.len() as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let var = totals.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), reps })
}

/// Hazard values over a time grid plus their monotone classification.
#[derive(Debug, Clone, Serialize)]
pub struct HazardTrendReport {
    /// Grid points evaluated.
    pub grid: Vec<f64>,
    /// Hazard rate at each grid point.
    pub values: Vec<f64>,
    /// Monotone-tail classification.
    pub trend: HazardTrend,
}

/// Evaluates the hazard rate on a strictly increasing grid and classifies
/// the trend. Survival saturation at any grid point propagates as an
/// error rather than producing a truncated report.
pub fn hazard_trend(
    dist: &dyn ContinuousDist,
    grid: &[f64],
) -> Result<HazardTrendReport, RestartError> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(RestartError::GridNotIncreasing);
    }
    let values: Vec<f64> =
        grid.iter().map(|&t| hazard_rate(dist, t)).collect::<Result<_, _>>()?;
    let trend = classify_hazard_trend(&values);
    Ok(HazardTrendReport { grid: grid.to_vec(), values, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, LogNormalParams, Uniform};

    fn exp_model() -> RuntimeModel {
        RuntimeModel::parametric(Box::new(Exponential::new(1.0).unwrap())).unwrap()
    }

    fn unit_uniform_model() -> RuntimeModel {
        RuntimeModel::parametric(Box::new(Uniform::new(0.0, 1.0).unwrap())).unwrap()
    }

    fn lognormal_model() -> RuntimeModel {
        RuntimeModel::parametric(Box::new(LogNormalParams::new(1.0, 1.25, 0.0).unwrap()))
            .unwrap()
    }

    #[test]
    fn exponential_r_equals_p() {
        // Memorylessness: restarting changes nothing, R(p) = p exactly.
        let m = exp_model();
        let mut p = 0.05;
        while p < 0.96 {
            let r = r_functional(&m, p).unwrap();
            assert!((r - p).abs() < 1e-9, "R({p}) = {r}");
            p += 0.05;
        }
    }

    #[test]
    fn uniform_r_is_two_p_minus_p_squared() {
        let m = unit_uniform_model();
        let mut p = 0.05;
        while p < 0.96 {
            let r = r_functional(&m, p).unwrap();
            let want = 2.0 * p - p * p;
            assert!((r - want).abs() < 1e-9, "R({p}) = {r}, want {want}");
            p += 0.05;
        }
    }

    #[test]
    fn lognormal_r_approaches_one() {
        let m = lognormal_model();
        let r = r_functional(&m, 0.9999).unwrap();
        assert!((r - 1.0).abs() < 0.01, "R(0.9999) = {r}");
    }

    #[test]
    fn r_rejects_bad_probabilities() {
        let m = exp_model();
        assert!(matches!(
            r_functional(&m, 0.0),
            Err(RestartError::BadProbability { .. })
        ));
        assert!(matches!(
            r_functional(&m, 1.0),
            Err(RestartError::BadProbability { .. })
        ));
    }

    #[test]
    fn usefulness_verdicts_match_theory() {
        let exp_verdict = restarts_useful(&exp_model(), None).unwrap();
        assert!(!exp_verdict.useful, "exponential margin {}", exp_verdict.margin);
        assert!(exp_verdict.witness_p.is_none());
        // R = p exactly: best margin is ~0 (never positive beyond fp).
        assert!(exp_verdict.margin.abs() < 1e-9);

        let uni_verdict = restarts_useful(&unit_uniform_model(), None).unwrap();
        assert!(!uni_verdict.useful);
        assert!(uni_verdict.margin < 0.0, "uniform margin {}", uni_verdict.margin);

        let ln_verdict = restarts_useful(&lognormal_model(), None).unwrap();
        assert!(ln_verdict.useful);
        let p = ln_verdict.witness_p.unwrap();
        assert!(ln_verdict.margin > 0.05, "margin {}", ln_verdict.margin);
        // The optimal-ratio witness for this law sits in the mid range,
        // not at the grid edges.
        assert!(p > 0.1 && p < 0.9, "witness {p}");
        let threshold = ln_verdict.witness_threshold.unwrap();
        let m = lognormal_model();
        assert!((threshold - m.quantile(p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn empirical_matches_parametric_on_large_samples() {
        use crate::dist::ContinuousDist as _;
        let d = LogNormalParams::new(1.0, 1.25, 0.0).unwrap();
        let mut rng = Rng::new(77);
        let values: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        let emp = RuntimeModel::Empirical(EmpiricalModel::new(&values));
        let par = lognormal_model();
        let mut p = 0.05;
        while p < 0.99 {
            let re = r_functional(&emp, p).unwrap();
            let rp = r_functional(&par, p).unwrap();
            assert!((re - rp).abs() < 0.01, "p = {p}: empirical {re} vs parametric {rp}");
            p += 0.05;
        }
    }

    #[test]
    fn empirical_quantile_integral_is_exact() {
        // Full integral equals the sample mean by construction.
        let values = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6];
        let e = EmpiricalModel::new(&values);
        let full = e.quantile_integral(1.0 - 1e-15);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!((full - mean).abs() < 1e-12, "{full} vs {mean}");
        // And the integral is monotone with Riemann cross-check.
        let p = 0.63;
        let steps = 400_000;
        let mut acc = 0.0;
        for i in 0..steps {
            let u = p * (i as f64 + 0.5) / steps as f64;
            acc += e.quantile(u);
        }
        acc *= p / steps as f64;
        assert!((e.quantile_integral(p) - acc).abs() < 1e-6);
    }

    #[test]
    fn infinite_mean_short_circuits() {
        // Pareto(alpha = 1/2): survival x^{-1/2}, infinite mean.
        #[derive(Debug)]
        struct HeavyPareto;
        impl ContinuousDist for HeavyPareto {
            fn pdf(&self, x: f64) -> f64 {
                if x < 1.0 {
                    0.0
                } else {
                    0.5 * x.powf(-1.5)
                }
            }
            fn cdf(&self, x: f64) -> f64 {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-0.5)
                }
            }
            fn quantile(&self, q: f64) -> f64 {
                (1.0 - q).powi(-2)
            }
            fn support(&self) -> (f64, f64) {
                (1.0, f64::INFINITY)
            }
            fn mean(&self) -> Option<f64> {
                None
            }
        }
        let m = RuntimeModel::parametric(Box::new(HeavyPareto)).unwrap();
        assert_eq!(m.mean(), None);
        assert_eq!(r_functional(&m, 0.5).unwrap(), 0.0);
        let verdict = restarts_useful(&m, None).unwrap();
        assert!(verdict.useful);
        assert!(verdict.margin > 0.0);
    }

    #[test]
    fn numeric_mean_agrees_with_closed_forms() {
        // Wrapper that hides the closed-form mean to force integration.
        #[derive(Debug)]
        struct Opaque<D: ContinuousDist>(D);
        impl<D: ContinuousDist> ContinuousDist for Opaque<D> {
            fn pdf(&self, x: f64) -> f64 {
                self.0.pdf(x)
            }
            fn cdf(&self, x: f64) -> f64 {
                self.0.cdf(x)
            }
            fn survival(&self, x: f64) -> f64 {
                self.0.survival(x)
            }
            fn quantile(&self, q: f64) -> f64 {
                self.0.quantile(q)
            }
            fn support(&self) -> (f64, f64) {
                self.0.support()
            }
            fn mean(&self) -> Option<f64> {
                None
            }
        }
        let ln = LogNormalParams::new(1.0, 1.25, 0.0).unwrap();
        let want = ln.mean().unwrap();
        let m = RuntimeModel::parametric(Box::new(Opaque(ln))).unwrap();
        let got = m.mean().unwrap();
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");

        let u = Uniform::new(2.0, 6.0).unwrap();
        let m = RuntimeModel::parametric(Box::new(Opaque(u))).unwrap();
        assert!((m.mean().unwrap() - 4.0).abs() < 1e-7);
    }

    #[test]
    fn mc_recovers_the_plain_mean_at_huge_thresholds() {
        let d = Exponential::new(1.0).unwrap();
        let est = restarted_mean_mc(&d, 1e9, 20_000, 5).unwrap();
        assert!(
            (est.mean - 1.0).abs() < 3.0 * est.std_error,
            "mean {} +- {}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn mc_confirms_memorylessness() {
        let d = Exponential::new(1.0).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let est = restarted_mean_mc(&d, t, 40_000, 6).unwrap();
            assert!(
                (est.mean - 1.0).abs() < 3.0 * est.std_error,
                "t = {t}: mean {} +- {}",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn mc_realizes_the_lognormal_speedup() {
        let d = LogNormalParams::new(1.0, 1.25, 0.0).unwrap();
        let model = lognormal_model();
        let verdict = restarts_useful(&model, None).unwrap();
        let t = verdict.witness_threshold.unwrap();
        let est = restarted_mean_mc(&d, t, 40_000, 7).unwrap();
        let full_mean = d.mean().unwrap();
        assert!(
            est.mean + 3.0 * est.std_error < full_mean,
            "restarted {} +- {} vs plain {full_mean}",
            est.mean,
            est.std_error
        );
        // Cross-check against the closed evaluation E[X] R(p)/p.
        let p = verdict.witness_p.unwrap();
        let r = r_functional(&model, p).unwrap();
        let closed = full_mean * r / p;
        assert!(
            (est.mean - closed).abs() < 4.0 * est.std_error,
            "MC {} vs closed {closed}",
            est.mean
        );
    }

    #[test]
    fn mc_validation_and_determinism() {
        let d = Exponential::new(2.0).unwrap();
        assert!(matches!(
            restarted_mean_mc(&d, 0.0, 2000, 1),
            Err(RestartError::BadThreshold { .. })
        ));
        assert!(matches!(
            restarted_mean_mc(&d, 1.0, 10, 1),
            Err(RestartError::TooFewReps { got: 10 })
        ));
        let u = Uniform::new(5.0, 6.0).unwrap();
        assert!(matches!(
            restarted_mean_mc(&u, 2.0, 2000, 1),
            Err(RestartError::NoMassBelowThreshold { .. })
        ));
        let a = restarted_mean_mc(&d, 0.5, 5000, 42).unwrap();
        let b = restarted_mean_mc(&d, 0.5, 5000, 42).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn hazard_trend_reports() {
        let grid: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let ln = LogNormalParams::new(1.0, 1.25, 0.0).unwrap();
        let report = hazard_trend(&ln, &grid).unwrap();
        assert_eq!(report.trend, HazardTrend::DecreasingTowardZero);

        let e = Exponential::new(0.5).unwrap();
        let grid: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        assert_eq!(hazard_trend(&e, &grid).unwrap().trend, HazardTrend::Constant);

        let u = Uniform::new(0.0, 1.0).unwrap();
        let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        assert_eq!(hazard_trend(&u, &grid).unwrap().trend, HazardTrend::Increasing);

        assert!(matches!(
            hazard_trend(&e, &[]),
            Err(RestartError::GridNotIncreasing)
        ));
        assert!(matches!(
            hazard_trend(&e, &[2.0, 1.0]),
            Err(RestartError::GridNotIncreasing)
        ));
        // Saturation propagates.
        assert!(matches!(
            hazard_trend(&u, &[0.5, 1.0]),
            Err(RestartError::Dist(DistError::SurvivalSaturated { .. }))
        ));
    }

    #[test]
    fn empirical_model_from_sample() {
        let s = Sample::new(vec![2.0, 8.0, 4.0, 6.0], 1, false).unwrap();
        let m = RuntimeModel::from_sample(&s);
        assert_eq!(m.mean(), Some(5.0));
        assert_eq!(m.quantile(0.5).unwrap(), 5.0);
        let verdict = restarts_useful(&m, None).unwrap();
        assert_eq!(verdict.grid_size, 512);
    }

    #[test]
    fn verdict_serializes_with_the_agreed_fields() {
        let v = RestartVerdict {
            useful: true,
            witness_p: Some(0.5),
            witness_threshold: Some(2.7),
            margin: 0.17,
            grid_size: 512,
        };
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains(r#""useful":true"#));
        assert!(json.contains(r#""witness_p":0.5"#));
        assert!(json.contains(r#""grid_size":512"#));
    }
}
