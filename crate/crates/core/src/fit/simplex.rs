//! Derivative-free Nelder–Mead minimization.
//!
//! Small, deterministic, and tolerant of objectives that return NaN or
//! infinity off their domain (such points are treated as infinitely bad,
//! which steers the simplex back inside). Only the handful of dimensions
//! the MLE reparametrizations need (1–3) are exercised here, where
//! Nelder–Mead is reliable.

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective value there.
    pub value: f64,
    /// Objective evaluations spent.
    pub evals: usize,
}

/// Tuning knobs; the defaults suit likelihood surfaces scaled to O(n).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    /// Stop when the simplex's objective spread falls below this.
    pub ftol: f64,
    /// Stop when the simplex's coordinate spread falls below this.
    pub xtol: f64,
    /// Iteration ceiling.
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { ftol: 1e-9, xtol: 1e-9, max_iter: 500 }
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` starting from `start` with initial coordinate steps
/// `step`. Standard coefficients: reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2.
pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: &[f64],
    opts: Options,
) -> Minimum {
    assert_eq!(start.len(), step.len());
    let d = start.len();
    assert!(d >= 1, "need at least one dimension");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };

    // Initial simplex: start plus one step along each axis.
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    pts.push(start.to_vec());
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += if step[i] != 0.0 { step[i] } else { 1e-3 };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    for _ in 0..opts.max_iter {
        // Order ascending by objective.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];

        let f_spread = vals[worst] - vals[best];
        let x_spread = (0..d)
            .map(|i| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for p in &pts {
                    lo = lo.min(p[i]);
                    hi = hi.max(p[i]);
                }
                hi - lo
            })
            .fold(0.0f64, f64::max);
        // Require *both* spreads to collapse: equal objective values on a
        // simplex still straddling the minimum (possible by symmetry) must
        // not count as convergence.
        if f_spread <= opts.ftol && f_spread.is_finite() && x_spread <= opts.xtol {
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![0.0; d];
        for (idx, p) in pts.iter().enumerate() {
            if idx != worst {
                for i in 0..d {
                    centroid[i] += p[i];
                }
            }
        }
        for c in &mut centroid {
            *c /= d as f64;
        }

        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect()
        };

        // Reflect the worst point through the centroid.
        let reflected = blend(&centroid, &pts[worst], -1.0);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < vals[best] {
            // Try expanding further in the same direction.
            let expanded = blend(&centroid, &pts[worst], -2.0);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < vals[second_worst] {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }

        // Contract toward the centroid, outside or inside.
        let (contracted, f_contracted) = if f_reflected < vals[worst] {
            let c = blend(&centroid, &reflected, 0.5);
            let fc = eval(&c, &mut evals);
            (c, fc)
        } else {
            let c = blend(&centroid, &pts[worst], 0.5);
            let fc = eval(&c, &mut evals);
            (c, fc)
        };
        if f_contracted < vals[worst].min(f_reflected) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }

        // Shrink everything toward the best point.
        let best_pt = pts[best].clone();
        for idx in 0..=d {
            if idx == best {
                continue;
            }
            pts[idx] = blend(&best_pt, &pts[idx], 0.5);
            vals[idx] = eval(&pts[idx], &mut evals);
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    Minimum { x: pts[best].clone(), value: vals[best], evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = minimize(
            |x| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[1.0, 1.0],
            Options::default(),
        );
        assert!((m.x[0] - 3.0).abs() < 1e-5, "{:?}", m.x);
        assert!((m.x[1] + 1.0).abs() < 1e-5, "{:?}", m.x);
        assert!(m.value < 1e-9);
    }

    #[test]
    fn rosenbrock_valley() {
        let m = minimize(
            |x| {
                let (a, b) = (x[0], x[1]);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            &[-1.2, 1.0],
            &[0.5, 0.5],
            Options { max_iter: 2000, ..Options::default() },
        );
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m.x);
        assert!((m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn one_dimensional_and_infinite_regions() {
        // Objective undefined (infinite) left of zero; minimum at 2.
        let m = minimize(
            |x| {
                if x[0] <= 0.0 {
                    f64::INFINITY
                } else {
                    (x[0].ln() - 2.0f64.ln()).powi(2)
                }
            },
            &[5.0],
            &[1.0],
            Options::default(),
        );
        assert!((m.x[0] - 2.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn nan_is_treated_as_infinitely_bad() {
        let m = minimize(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 1.0).powi(2)
                }
            },
            &[0.5],
            &[2.0],
            Options::default(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn determinism() {
        let run = || {
            minimize(
                |x| x[0].powi(4) + x[1].powi(2) + 0.3 * (x[0] * 3.0).sin(),
                &[2.0, -3.0],
                &[0.7, 0.7],
                Options::default(),
            )
        };
        let (a, b) = (run(), run());
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
        assert_eq!(a.evals, b.evals);
    }
}
