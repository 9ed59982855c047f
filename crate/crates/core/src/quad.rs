//! Adaptive Simpson quadrature on finite intervals.
//!
//! Used wherever an expectation or truncated mean has no closed form:
//! restart-rate curves for parametric runtime models, and cross-checks of
//! distribution means. Accuracy is controlled by a per-call tolerance and
//! the classic Richardson error estimate `|S_left + S_right - S_whole|/15`.

use thiserror::Error;

/// Hard recursion ceiling; with interval halving this allows subintervals
/// down to `(b - a) / 2^60`, far below any sensible tolerance.
const MAX_DEPTH: u32 = 60;

/// Quadrature failure.
#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    /// The integrand produced a NaN or infinity inside the interval.
    #[error("integrand not finite at x = {x}")]
    NonFiniteIntegrand {
        /// Offending abscissa.
        x: f64,
    },
    /// Interval endpoints were not finite and ordered.
    #[error("bad interval [{lo}, {hi}]")]
    BadInterval {
        /// Lower endpoint.
        lo: f64,
        /// Upper endpoint.
        hi: f64,
    },
    /// The error estimate failed to shrink before the depth ceiling.
    #[error("adaptive refinement exceeded depth {max_depth} near x = {x}")]
    DepthExceeded {
        /// Recursion ceiling that was hit.
        max_depth: u32,
        /// Midpoint of the offending subinterval.
        x: f64,
    },
}

struct Adaptive<'f> {
    f: &'f dyn Fn(f64) -> f64,
}

impl Adaptive<'_> {
    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFiniteIntegrand { x })
        }
    }

    /// One Simpson panel over [a, b] given the endpoint and midpoint values.
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = Self::simpson(a, m, fa, flm, fm);
        let right = Self::simpson(m, b, fm, frm, fb);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            // Richardson extrapolation buys an extra order for free.
            return Ok(left + right + err / 15.0);
        }
        if depth >= MAX_DEPTH {
            return Err(QuadError::DepthExceeded { max_depth: MAX_DEPTH, x: m });
        }
        let half_tol = 0.5 * tol;
        Ok(self.refine(a, m, fa, flm, fm, left, half_tol, depth + 1)?
            + self.refine(m, b, fm, frm, fb, right, half_tol, depth + 1)?)
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
///
/// The integrand must be finite everywhere it is sampled. `lo > hi` flips
/// the sign, matching the usual orientation convention.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    if !lo.is_finite() || !hi.is_finite() || !(tol > 0.0) {
        return Err(QuadError::BadInterval { lo, hi });
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return Ok(-integrate(f, hi, lo, tol)?);
    }
    let q = Adaptive { f: &f };
    // Seed with 16 fixed panels before going adaptive, so localized
    // features between two coarse sample points cannot fake convergence
    // on the first error estimate.
    const PANELS: usize = 16;
    let width = (hi - lo) / PANELS as f64;
    let panel_tol = tol / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let a = lo + i as f64 * width;
        let b = if i + 1 == PANELS { hi } else { a + width };
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (q.eval(a)?, q.eval(m)?, q.eval(b)?);
        let whole = Adaptive::simpson(a, b, fa, fm, fb);
        total += q.refine(a, b, fa, fm, fb, whole, panel_tol, 0)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // Simpson is exact through cubics.
        let got = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        let want = (81.0 / 4.0 - 1.0 / 4.0) - 2.0 * (9.0 / 2.0 - 1.0 / 2.0) + 4.0;
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn smooth_transcendentals_meet_the_tolerance() {
        let got = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert!((got - 2.0).abs() < 1e-9, "sin integral {got}");
        let got = integrate(|x| (-x).exp(), 0.0, 30.0, 1e-11).unwrap();
        let want = 1.0 - (-30.0f64).exp();
        assert!((got - want).abs() < 1e-10, "exp integral {got}");
    }

    #[test]
    fn needle_in_a_long_interval() {
        // Narrow Gaussian bump (sigma = 0.05) far from most sample points;
        // the mass beyond [0, 100] is ~e^{-1.9e6}, utterly negligible.
        let got = integrate(
            |x| (-(x - 3.1) * (x - 3.1) / 5e-3).exp(),
            0.0,
            100.0,
            1e-12,
        )
        .unwrap();
        let want = (std::f64::consts::PI * 5e-3).sqrt();
        assert!(
            ((got - want) / want).abs() < 1e-8,
            "needle integral {got} vs {want}"
        );
    }

    #[test]
    fn orientation_and_degenerate_interval() {
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-9).unwrap(), 0.0);
        let fwd = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        let rev = integrate(|x| x * x, 1.0, 0.0, 1e-12).unwrap();
        assert!((fwd + rev).abs() < 1e-14);
    }

    #[test]
    fn error_paths() {
        assert_eq!(
            integrate(|_| 1.0, f64::NEG_INFINITY, 0.0, 1e-9).unwrap_err(),
            QuadError::BadInterval { lo: f64::NEG_INFINITY, hi: 0.0 }
        );
        let err = integrate(|x| 1.0 / x, -1.0, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, QuadError::NonFiniteIntegrand { .. }));
    }
}
