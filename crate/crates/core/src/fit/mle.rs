//! Maximum-likelihood fitting of the Johnson SB and lognormal families.
//!
//! Both families have a location structure that makes naive 3- or
//! 4-dimensional search fragile, so the fits work in *margin space*:
//!
//! * SB: `xi = min(x) - exp(s)` and `b = max(x) + exp(t)` keep the support
//!   strictly bracketing the data for every `(s, t)`; given the endpoints,
//!   the optimal `(gamma, delta)` are the closed-form normal fit of the
//!   logit-transformed data, leaving a smooth two-dimensional profile for
//!   the simplex search.
//! * Lognormal: the two-parameter fit is fully closed-form; the
//!   three-parameter fit profiles the same closed form over
//!   `xi = min(x) - exp(theta)` with a deterministic grid-plus-golden
//!   refinement.
//!
//! Shifted differences are computed as `(x_i - min) + exp(s)` rather than
//! `x_i - xi`, which avoids catastrophic cancellation at small margins; a
//! margin that underflows the spacing of the data simply drives the
//! profile to `-inf` and is never selected.

use crate::dist::{LogNormalParams, SbParams};

use super::simplex::{self, Options};
use super::{FitError, Sample};

/// Minimum sample size for any maximum-likelihood fit.
pub(crate) const MIN_FIT_POINTS: usize = 20;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Relative margins (as fractions of the data range) seeding the SB
/// profile search. Five starts from tight to loose brackets.
const SB_STARTS: [(f64, f64); 5] =
    [(0.05, 0.05), (0.01, 0.01), (0.25, 0.25), (1.0, 1.0), (0.02, 0.5)];

fn check_fit_input(values: &[f64]) -> Result<(f64, f64), FitError> {
    if values.len() < MIN_FIT_POINTS {
        return Err(FitError::TooFewPoints { needed: MIN_FIT_POINTS, got: values.len() });
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min == max {
        return Err(FitError::ConstantSample { value: min });
    }
    Ok((min, max))
}

/// Mean and biased (maximum-likelihood) variance in one pass.
fn mean_and_mle_var(values: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    (mean, m2 / n as f64, n)
}

/// SB profile data: per-point distances to the sample extremes.
struct SbProfile {
    dmin: Vec<f64>,
    dmax: Vec<f64>,
    range: f64,
}

impl SbProfile {
    fn new(values: &[f64], min: f64, max: f64) -> Self {
        SbProfile {
            dmin: values.iter().map(|&v| v - min).collect(),
            dmax: values.iter().map(|&v| max - v).collect(),
            range: max - min,
        }
    }

    /// Profile log-likelihood at margins `(exp(s), exp(t))`; the inner
    /// `(gamma, delta)` maximization is solved in closed form.
    fn loglik(&self, s: f64, t: f64) -> f64 {
        let e_lo = s.exp();
        let e_hi = t.exp();
        if !e_lo.is_finite() || !e_hi.is_finite() || e_lo <= 0.0 || e_hi <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lambda = self.range + e_lo + e_hi;
        let n = self.dmin.len();
        let mut sum_ln = 0.0;
        let mut mean_y = 0.0;
        let mut m2 = 0.0;
        for (k, (&dlo, &dhi)) in self.dmin.iter().zip(&self.dmax).enumerate() {
            let lo = dlo + e_lo;
            let hi = dhi + e_hi;
            if lo <= 0.0 || hi <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
            sum_ln += ln_lo + ln_hi;
            let y = ln_lo - ln_hi;
            let d = y - mean_y;
            mean_y += d / (k + 1) as f64;
            m2 += d * (y - mean_y);
        }
        let var_y = m2 / n as f64;
        if !(var_y > 0.0) || !var_y.is_finite() {
            return f64::NEG_INFINITY;
        }
        let nf = n as f64;
        nf * (lambda.ln() - 0.5 * var_y.ln() - LN_SQRT_2PI) - sum_ln - 0.5 * nf
    }

    /// Closed-form `(gamma, delta)` at given margins.
    fn shape_at(&self, s: f64, t: f64) -> (f64, f64) {
        let e_lo = s.exp();
        let e_hi = t.exp();
        let ys = self
            .dmin
            .iter()
            .zip(&self.dmax)
            .map(|(&dlo, &dhi)| ((dlo + e_lo) / (dhi + e_hi)).ln());
        let (mean_y, var_y, _) = mean_and_mle_var(ys);
        let sd = var_y.sqrt();
        (-mean_y / sd, 1.0 / sd)
    }
}

/// Fits Johnson SB by maximum likelihood over raw values. Used directly by
/// the bootstrap, which must refit replicate data that no longer satisfies
/// [`Sample`]'s positivity invariant.
pub(crate) fn fit_sb_values(values: &[f64]) -> Result<(SbParams, f64), FitError> {
    let (min, max) = check_fit_input(values)?;
    let profile = SbProfile::new(values, min, max);
    let objective = |x: &[f64]| -profile.loglik(x[0], x[1]);

    let mut best: Option<simplex::Minimum> = None;
    for &(alo, ahi) in &SB_STARTS {
        let start = [(alo * profile.range).ln(), (ahi * profile.range).ln()];
        let m = simplex::minimize(objective, &start, &[0.5, 0.5], Options::default());
        if best.as_ref().map_or(true, |b| m.value < b.value) {
            best = Some(m);
        }
    }
    let coarse = best.expect("at least one start ran");
    // Polish from the winner with a tight simplex; keeps the stationarity
    // guarantee that a refit from the returned point cannot improve.
    let polished = simplex::minimize(objective, &coarse.x, &[0.02, 0.02], Options::default());
    let m = if polished.value < coarse.value { polished } else { coarse };
    if !m.value.is_finite() {
        return Err(FitError::OptimizerFailed);
    }

    let (s, t) = (m.x[0], m.x[1]);
    let (gamma, delta) = profile.shape_at(s, t);
    let xi = min - s.exp();
    let lambda = profile.range + s.exp() + t.exp();
    let params = SbParams::new(gamma, delta, lambda, xi).map_err(|_| FitError::OptimizerFailed)?;
    Ok((params, -m.value))
}

/// Maximum-likelihood Johnson SB fit.
///
/// Requires at least 20 points with nonzero spread. The returned
/// log-likelihood is attained at the returned parameters, and restarting
/// the optimizer there does not improve it by more than 1e-6.
pub fn mle_fit_sb(sample: &Sample) -> Result<(SbParams, f64), FitError> {
    fit_sb_values(sample.values())
}

/// Lognormal fit over raw values; see [`fit_sb_values`] for why this
/// bypasses [`Sample`].
pub(crate) fn fit_lognormal_values(
    values: &[f64],
    three_param: bool,
) -> Result<(LogNormalParams, f64), FitError> {
    let (min, max) = check_fit_input(values)?;
    if !three_param {
        if min <= 0.0 {
            return Err(FitError::BadValue {
                index: values.iter().position(|&v| v <= 0.0).unwrap(),
                value: min,
            });
        }
        let (params, loglik) = lognormal_closed_form(values, 0.0);
        return Ok((params, loglik));
    }

    // Profile over theta with xi = min - exp(theta). The likelihood is
    // unbounded as the margin collapses, so the scan has a floor at
    // 1e-6 of the data range: below it the fit is margin-degenerate and
    // not a useful model.
    let range = max - min;
    let lo = (1e-6 * range).ln();
    let hi = (100.0 * range).ln();
    let profile = |theta: f64| lognormal_profile_loglik(values, min, theta);

    let grid_points = 80usize;
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..grid_points {
        let theta = lo + (hi - lo) * i as f64 / (grid_points - 1) as f64;
        let v = profile(theta);
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    if !best_val.is_finite() {
        return Err(FitError::OptimizerFailed);
    }
    // Golden-section refinement inside the bracketing grid cells.
    let cell = (hi - lo) / (grid_points - 1) as f64;
    let mut a = lo + cell * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + cell * (best_idx + 1) as f64).min(hi);
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (profile(c), profile(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(d);
        }
    }
    let theta = if fc > fd { c } else { d };
    let xi = min - theta.exp();
    let shifted: Vec<f64> = values.iter().map(|&v| v - xi).collect();
    let (inner, loglik) = lognormal_closed_form(&shifted, xi);
    Ok((inner, loglik))
}

/// Closed-form lognormal fit of already-shifted positive data; `xi` is
/// recorded in the returned parameters and the log-likelihood is reported
/// for the *original* data (the shift's Jacobian is 1).
fn lognormal_closed_form(shifted: &[f64], xi: f64) -> (LogNormalParams, f64) {
    let (mu, var, n) = mean_and_mle_var(shifted.iter().map(|&v| v.ln()));
    let sigma = var.sqrt();
    let sum_ln: f64 = shifted.iter().map(|&v| v.ln()).sum();
    let nf = n as f64;
    let loglik = -nf * (sigma.ln() + LN_SQRT_2PI) - sum_ln - 0.5 * nf;
    (
        LogNormalParams { mu, sigma, xi },
        loglik,
    )
}

fn lognormal_profile_loglik(values: &[f64], min: f64, theta: f64) -> f64 {
    let margin = theta.exp();
    if !(margin > 0.0) || !margin.is_finite() {
        return f64::NEG_INFINITY;
    }
    let mut sum_ln = 0.0;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let shifted = (v - min) + margin;
        if shifted <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let y = shifted.ln();
        sum_ln += y;
        let d = y - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (y - mean);
    }
    let n = values.len() as f64;
    let var = m2 / n;
    if !(var > 0.0) {
        return f64::NEG_INFINITY;
    }
    -n * (0.5 * var.ln() + LN_SQRT_2PI) - sum_ln - 0.5 * n
}

/// Maximum-likelihood lognormal fit: closed form for the two-parameter
/// family, profile likelihood over the support shift for the
/// three-parameter one.
pub fn mle_fit_lognormal(
    sample: &Sample,
    three_param: bool,
) -> Result<(LogNormalParams, f64), FitError> {
    fit_lognormal_values(sample.values(), three_param)
}

/// Log-likelihood of values under an SB parameter set; used by tests and
/// the equivariance checks.
pub(crate) fn sb_loglik(params: &SbParams, values: &[f64]) -> f64 {
    use crate::dist::ContinuousDist;
    values.iter().map(|&v| params.pdf(v).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ContinuousDist;
    use crate::rng::Rng;

    fn draw_sb(params: &SbParams, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        (0..n).map(|_| params.sample(&mut rng)).collect()
    }

    fn sample_of(values: Vec<f64>) -> Sample {
        Sample::new(values, 1, false).unwrap()
    }

    #[test]
    fn sb_recovers_known_parameters() {
        let truth = SbParams::new(0.5, 0.7, 1.0, 0.0).unwrap();
        let values = draw_sb(&truth, 10_000, 41);
        let (fit, loglik) = fit_sb_values(&values).unwrap();
        assert!((fit.gamma - 0.5).abs() < 0.1, "gamma {}", fit.gamma);
        assert!((fit.delta - 0.7).abs() < 0.1, "delta {}", fit.delta);
        assert!((fit.xi - 0.0).abs() < 0.05, "xi {}", fit.xi);
        assert!((fit.lambda - 1.0).abs() < 0.05, "lambda {}", fit.lambda);
        // Reported log-likelihood is attained.
        let direct = sb_loglik(&fit, &values);
        assert!((direct - loglik).abs() < 1e-6 * loglik.abs().max(1.0));
    }

    #[test]
    fn sb_fit_is_stationary() {
        let truth = SbParams::new(-0.3, 1.1, 2.0, 1.0).unwrap();
        let values = draw_sb(&truth, 2_000, 42);
        let (fit, loglik) = fit_sb_values(&values).unwrap();
        // Refit seeded exactly at the returned margins.
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let profile = SbProfile::new(&values, min, max);
        let m = simplex::minimize(
            |x| -profile.loglik(x[0], x[1]),
            &[(min - fit.xi).ln(), (fit.xi + fit.lambda - max).ln()],
            &[0.05, 0.05],
            Options::default(),
        );
        assert!(
            -m.value <= loglik + 1e-6,
            "refit improved: {} vs {loglik}",
            -m.value
        );
    }

    #[test]
    fn sb_fit_beats_every_start_seed() {
        let truth = SbParams::new(0.2, 0.9, 3.0, -1.0).unwrap();
        let values = draw_sb(&truth, 1_000, 43);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let profile = SbProfile::new(&values, min, max);
        let (_, loglik) = fit_sb_values(&values).unwrap();
        for &(alo, ahi) in &SB_STARTS {
            let at_seed =
                profile.loglik((alo * profile.range).ln(), (ahi * profile.range).ln());
            assert!(loglik >= at_seed - 1e-9, "seed {alo}/{ahi}: {at_seed} vs {loglik}");
        }
    }

    #[test]
    fn sb_fit_is_scale_equivariant() {
        let truth = SbParams::new(0.5, 0.7, 1.0, 0.25).unwrap();
        let values = draw_sb(&truth, 2_000, 44);
        let (fit, _) = fit_sb_values(&values).unwrap();
        for g in [0.25, 12.0] {
            let scaled_values: Vec<f64> = values.iter().map(|&v| g * v).collect();
            let (fit_scaled, ll_scaled) = fit_sb_values(&scaled_values).unwrap();
            let transported = fit.scaled(g).unwrap();
            // Argmax-level equivalence: the transported original fit must
            // achieve the same likelihood on the scaled data (both are
            // local optima of the same surface).
            let transported_ll = sb_loglik(&transported, &scaled_values);
            assert!(
                (transported_ll - ll_scaled).abs() < 1e-3 * ll_scaled.abs().max(1.0),
                "g = {g}: transported {transported_ll} vs refit {ll_scaled}"
            );
            assert!((fit_scaled.gamma - transported.gamma).abs() < 0.15);
            assert!((fit_scaled.delta - transported.delta).abs() < 0.15);
        }
    }

    #[test]
    fn fit_input_validation() {
        assert_eq!(
            fit_sb_values(&[1.0; 10]).unwrap_err(),
            FitError::TooFewPoints { needed: 20, got: 10 }
        );
        assert_eq!(
            fit_sb_values(&[3.5; 25]).unwrap_err(),
            FitError::ConstantSample { value: 3.5 }
        );
        assert_eq!(
            fit_lognormal_values(&[2.0; 30], true).unwrap_err(),
            FitError::ConstantSample { value: 2.0 }
        );
    }

    #[test]
    fn lognormal_two_param_closed_form_recovers() {
        let mut rng = Rng::new(7);
        let n = 20_000;
        let values: Vec<f64> =
            (0..n).map(|_| (1.0 + 1.25 * rng.standard_normal()).exp()).collect();
        let s = sample_of(values);
        let (fit, loglik) = mle_fit_lognormal(&s, false).unwrap();
        // Within 3 standard errors of the truth.
        let se_mu = 1.25 / (n as f64).sqrt();
        let se_sigma = 1.25 / (2.0 * n as f64).sqrt();
        assert!((fit.mu - 1.0).abs() < 3.0 * se_mu, "mu {}", fit.mu);
        assert!((fit.sigma - 1.25).abs() < 3.0 * se_sigma, "sigma {}", fit.sigma);
        assert_eq!(fit.xi, 0.0);
        assert!(loglik.is_finite());
    }

    #[test]
    fn lognormal_three_param_profile_is_the_closed_form_at_its_shift() {
        let mut rng = Rng::new(8);
        let values: Vec<f64> =
            (0..500).map(|_| 5.0 + (0.5 + 0.9 * rng.standard_normal()).exp()).collect();
        let s = sample_of(values.clone());
        let (fit3, ll3) = mle_fit_lognormal(&s, true).unwrap();
        // The inner (mu, sigma) must equal the two-parameter closed form on
        // the shifted data, and the log-likelihoods agree exactly.
        let shifted: Vec<f64> = values.iter().map(|&v| v - fit3.xi).collect();
        let (fit2, ll2) = lognormal_closed_form(&shifted, fit3.xi);
        assert_eq!(fit3.mu, fit2.mu);
        assert_eq!(fit3.sigma, fit2.sigma);
        assert_eq!(ll3, ll2);
        // And the shift estimate lands near the true 5.0.
        assert!((fit3.xi - 5.0).abs() < 0.5, "xi {}", fit3.xi);
    }

    #[test]
    fn lognormal_three_param_recovers_a_tight_shift() {
        // min(x) sits barely above the true shift: the profile must chase
        // it into the small-margin corner without collapsing.
        let mut rng = Rng::new(9);
        let values: Vec<f64> =
            (0..5_000).map(|_| 2.0 + (1.0 + 0.3 * rng.standard_normal()).exp()).collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let s = sample_of(values);
        let (fit, _) = mle_fit_lognormal(&s, true).unwrap();
        // Tolerance dominated by the gap between min(x) and the shift.
        let gap = min - 2.0;
        assert!(
            (fit.xi - 2.0).abs() < 10.0 * gap.max(0.05),
            "xi {} (gap {gap})",
            fit.xi
        );
    }

    #[test]
    fn fitted_loglik_dominates_nearby_parameters() {
        use crate::dist::ContinuousDist;
        let truth = SbParams::new(0.5, 0.7, 1.0, 0.0).unwrap();
        let values = draw_sb(&truth, 3_000, 45);
        let (fit, loglik) = fit_sb_values(&values).unwrap();
        // Perturb each parameter slightly; likelihood must not rise.
        for (dg, dd, dl, dx) in [
            (0.05, 0.0, 0.0, 0.0),
            (-0.05, 0.0, 0.0, 0.0),
            (0.0, 0.05, 0.0, 0.0),
            (0.0, 0.0, 0.05, -0.025),
        ] {
            let p = SbParams::new(fit.gamma + dg, fit.delta + dd, fit.lambda + dl, fit.xi + dx);
            let Ok(p) = p else { continue };
            if values.iter().any(|&v| p.pdf(v) <= 0.0) {
                continue;
            }
            let ll = sb_loglik(&p, &values);
            assert!(ll <= loglik + 1e-9, "perturbed loglik {ll} beats fit {loglik}");
        }
    }
}
