//! Chi-square goodness-of-fit statistic over equiprobable bins.
//!
//! Bins are equiprobable *under the fitted distribution*: bin `j` collects
//! the sample points whose fitted cdf value lands in `[j/k, (j+1)/k)`, so
//! every bin has expected count `n/k` by construction and the statistic
//! weighs the whole support evenly instead of fixating on the bulk.

use crate::dist::ContinuousDist;

use super::FitError;

/// Minimum sample size for a meaningful binned statistic.
pub(crate) const MIN_CHI2_POINTS: usize = 25;

/// The statistic together with its binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Stat {
    /// Pearson chi-square value.
    pub chi2: f64,
    /// Number of equiprobable bins `k`.
    pub bins: usize,
    /// Degrees of freedom `k - 1 - n_params`.
    pub dof: i64,
}

/// Bin-count rule: one bin per 25 points, clamped to `[8, 50]`. Keeps
/// expected counts at least 5 once `n >= 200` and caps resolution at
/// large `n`.
pub(crate) fn bin_count(n: usize) -> usize {
    (n / 25).clamp(8, 50)
}

/// Computes the chi-square statistic of `values` against a fitted
/// distribution with `n_params` estimated parameters.
///
/// Fails when the sample is too small or when the fitted cdf is flat
/// across the entire sample range (no ordering information at all). A
/// sample squeezed into a single bin is *not* an error; it simply scores
/// the maximal `n(k-1)`.
pub fn chi2_statistic(
    values: &[f64],
    fitted: &dyn ContinuousDist,
    n_params: usize,
) -> Result<Chi2Stat, FitError> {
    let n = values.len();
    if n < MIN_CHI2_POINTS {
        return Err(FitError::TooFewPoints { needed: MIN_CHI2_POINTS, got: n });
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min < max && !(fitted.cdf(max) > fitted.cdf(min)) {
        return Err(FitError::CdfNotIncreasing);
    }

    let k = bin_count(n);
    let mut counts = vec![0u64; k];
    for &v in values {
        let f = fitted.cdf(v);
        let bin = ((f * k as f64) as usize).min(k - 1);
        counts[bin] += 1;
    }
    let expected = n as f64 / k as f64;
    let chi2 = counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    Ok(Chi2Stat { chi2, bins: k, dof: k as i64 - 1 - n_params as i64 })
}
