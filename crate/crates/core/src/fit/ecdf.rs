//! Empirical distribution function, plotting-position quantiles, and the
//! exact Kolmogorov–Smirnov distance.

use crate::dist::ContinuousDist;

use super::{FitError, Sample};

/// Sorted view of a sample supporting O(log n) empirical cdf and quantile
/// queries.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// Sorts a copy of the values. The input must be nonempty.
    pub fn new(values: &[f64]) -> Result<Self, FitError> {
        if values.is_empty() {
            return Err(FitError::EmptySample);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    /// Always false for a constructed value.
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// The observations in ascending order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Right-continuous step function `(#{x_i <= t}) / n`.
    pub fn eval(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&x| x <= t);
        count as f64 / self.sorted.len() as f64
    }

    /// Empirical survival `1 - F̂(t)`.
    pub fn survival(&self, t: f64) -> f64 {
        1.0 - self.eval(t)
    }

    /// Piecewise-linear quantile through the plotting positions
    /// `(k - 0.5)/n`: constant at the extreme order statistics outside
    /// `[0.5/n, (n - 0.5)/n]`, linear between neighbors inside.
    ///
    /// This interpolant has the property that its exact integral over
    /// `(0, 1)` equals the sample mean, which the restart analysis relies
    /// on. Requires `q` in `(0, 1)`.
    pub fn quantile(&self, q: f64) -> Result<f64, FitError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(FitError::BadProbability { q });
        }
        let n = self.sorted.len();
        // Position of q among the plotting points p_k = (k - 0.5)/n.
        let h = q * n as f64 - 0.5;
        if h <= 0.0 {
            return Ok(self.sorted[0]);
        }
        if h >= (n - 1) as f64 {
            return Ok(self.sorted[n - 1]);
        }
        let k = h.floor() as usize;
        let frac = h - k as f64;
        Ok(self.sorted[k] + frac * (self.sorted[k + 1] - self.sorted[k]))
    }
}

/// Empirical cdf of a sample at `t`.
pub fn ecdf(sample: &Sample, t: f64) -> f64 {
    // Direct count; callers doing many queries should build an [`Ecdf`].
    let count = sample.values().iter().filter(|&&x| x <= t).count();
    count as f64 / sample.len() as f64
}

/// Plotting-position empirical quantile of a sample.
pub fn empirical_quantile(sample: &Sample, q: f64) -> Result<f64, FitError> {
    Ecdf::new(sample.values())?.quantile(q)
}

/// Exact Kolmogorov–Smirnov distance `sup_t |F̂_n(t) - F(t)|`.
///
/// The sup of the step-function difference is attained at a sample point
/// or in the limit approaching one from the left, so it suffices to
/// compare `k/n` against `F(x_(k))` and `(k-1)/n` against the left limit
/// `F(x_(k)^-)`. Taking the true left limit (instead of assuming
/// `F(x^-) = F(x)`) keeps the distance exact even when the fitted cdf
/// itself has jumps at sample points — a sample measured against its own
/// ecdf correctly scores 0.
pub fn ks_distance(sample: &Sample, fitted: &dyn ContinuousDist) -> f64 {
    let mut sorted = sample.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let left = fitted.cdf(x.next_down());
        let at = fitted.cdf(x);
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        sup = sup.max(left - below).max(above - at);
    }
    sup
}
