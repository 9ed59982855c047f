//! Width-restricted resolution: one-step resolvents, the width-`w` closure,
//! and random extension sampling from the closure's new clauses.
//!
//! The closure treats clauses as a *set* in canonical form (unlike formulas,
//! which are sequences). Iteration uses the semi-naive frontier scheme: each
//! round only resolves clauses added in the previous round against everything
//! seen so far, which reaches the same fixpoint as all-pairs iteration while
//! doing a fraction of the work.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::dimacs::emit_dimacs;
use crate::rng::Rng;

/// Errors from resolution and extension sampling.
#[derive(Debug, Error, PartialEq)]
pub enum ResolutionError {
    /// `resolve` was asked to use a pivot the clauses do not share with
    /// opposite signs.
    #[error("variable {pivot} does not occur with opposite signs in the two clauses")]
    BadPivot {
        /// The requested pivot variable.
        pivot: u32,
    },
    /// Closure ran into its resource limits before reaching a fixpoint.
    #[error(
        "resolution closure exceeded {what} limit after {} rounds ({} clauses kept)",
        stats.rounds, stats.kept
    )]
    LimitExceeded {
        /// Which limit tripped ("clause" or "round").
        what: &'static str,
        /// Progress made before the limit hit.
        stats: ClosureStats,
    },
    /// Inclusion probabilities must lie in (0, 1].
    #[error("inclusion probability {p} outside (0, 1]")]
    BadInclusionProb {
        /// The offending probability.
        p: f64,
    },
    /// Calibration target must be a positive finite expectation.
    #[error("calibration target {target} is not a positive finite number")]
    BadCalibrationTarget {
        /// The offending target.
        target: f64,
    },
    /// Fixed-length sampling requires a width-uniform pool.
    #[error("pool mixes clause widths {first} and {other}")]
    MixedWidthPool {
        /// Width of the first clause.
        first: usize,
        /// A differing width found later.
        other: usize,
    },
}

/// Resource caps for the closure computation.
#[derive(Debug, Clone, Copy)]
pub struct ClosureLimits {
    /// Maximum number of distinct clauses the closure may hold.
    pub max_clauses: usize,
    /// Maximum number of frontier rounds.
    pub max_rounds: usize,
}

impl Default for ClosureLimits {
    fn default() -> Self {
        ClosureLimits { max_clauses: 1_000_000, max_rounds: 64 }
    }
}

/// Progress counters from a closure run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClosureStats {
    /// Frontier rounds executed.
    pub rounds: usize,
    /// Resolvents within the width bound, counting repeat derivations of
    /// the same clause.
    pub generated: u64,
    /// Distinct clauses in the closure (input clauses included).
    pub kept: usize,
}

/// The width-`w` resolution closure of a formula.
#[derive(Debug, Clone)]
pub struct Closure {
    /// Every clause of the closure, canonical and duplicate-free.
    pub clauses: BTreeSet<Clause>,
    /// Closure clauses that are *not* clauses of the source formula, sorted
    /// canonically — the sampling pool for extensions.
    pub pool: Vec<Clause>,
    /// Work counters.
    pub stats: ClosureStats,
}

/// A sampled extension: a subset of the closure pool, with enough metadata
/// to reproduce and audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSet {
    /// Hex SHA-256 of the source formula's DIMACS text.
    pub source_hash: String,
    /// Width bound used for the closure.
    pub width_bound: usize,
    /// Per-clause inclusion probability.
    pub inclusion_prob: f64,
    /// Seed that drove the Bernoulli draws.
    pub seed: u64,
    /// The sampled clauses, in canonical order.
    pub resolvents: Vec<Clause>,
}

/// Hex SHA-256 digest of a formula's DIMACS serialization.
pub fn formula_digest(f: &CnfFormula) -> String {
    let bytes = Sha256::digest(emit_dimacs(f).as_bytes());
    let mut hex = String::with_capacity(64);
    for b in bytes {
        use std::fmt::Write;
        write!(hex, "{b:02x}").unwrap();
    }
    hex
}

/// Resolves two clauses on `pivot`, which must occur positively in one and
/// negatively in the other. Returns `None` when the resolvent is
/// tautological (some other variable appears with both signs).
pub fn resolve(c1: &Clause, c2: &Clause, pivot: u32) -> Result<Option<Clause>, ResolutionError> {
    let pos = Literal::new(pivot, true).map_err(|_| ResolutionError::BadPivot { pivot })?;
    let neg = pos.negated();
    let (with_pos, with_neg) = if c1.literals().contains(&pos) && c2.literals().contains(&neg) {
        (c1, c2)
    } else if c2.literals().contains(&pos) && c1.literals().contains(&neg) {
        (c2, c1)
    } else {
        return Err(ResolutionError::BadPivot { pivot });
    };
    let lits: Vec<Literal> = with_pos
        .literals()
        .iter()
        .filter(|l| **l != pos)
        .chain(with_neg.literals().iter().filter(|l| **l != neg))
        .copied()
        .collect();
    Ok(Clause::new(lits).ok())
}

/// All variables occurring with opposite signs in the two clauses. With two
/// or more such variables every resolvent is tautological; with exactly one,
/// the unique resolvent is tautology-free.
fn complementary_vars(c1: &Clause, c2: &Clause) -> Vec<u32> {
    // Canonical clauses hold at most one literal per variable, sorted, so a
    // single merge scan finds every sign clash.
    let (mut i, mut j) = (0, 0);
    let (a, b) = (c1.literals(), c2.literals());
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].var().cmp(&b[j].var()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i].positive() != b[j].positive() {
                    out.push(a[i].var());
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// One resolution round: the input set plus every non-tautological resolvent
/// of a clause pair from the set whose width stays within `width_bound`.
pub fn resolution_step(set: &BTreeSet<Clause>, width_bound: usize) -> BTreeSet<Clause> {
    let clauses: Vec<&Clause> = set.iter().collect();
    let mut out = set.clone();
    for (i, c1) in clauses.iter().enumerate() {
        for c2 in clauses.iter().skip(i + 1) {
            let pivots = complementary_vars(c1, c2);
            // Two or more complementary variables: every resolvent contains a
            // complementary pair itself, so nothing survives.
            if pivots.len() != 1 {
                continue;
            }
            if let Some(r) = resolve(c1, c2, pivots[0]).expect("pivot was verified") {
                if r.width() <= width_bound {
                    out.insert(r);
                }
            }
        }
    }
    out
}

/// The width-`w` resolution closure: iterates [`resolution_step`] to a
/// fixpoint and splits off the sampling pool of clauses not present in the
/// source formula.
///
/// Internally this runs the semi-naive frontier scheme over a
/// literal-occurrence index: a pair of clauses can only resolve on a
/// variable one of them holds positively and the other negatively, so each
/// frontier clause looks up the occurrence lists of its literals'
/// negations instead of scanning the whole set. Pairs both of whose
/// members predate the current frontier were already tried in an earlier
/// round and are skipped by an index comparison. Formulas over at most 64
/// variables additionally run on a bitmask clause representation, which
/// turns the pair test and the resolvent construction into a few word
/// operations. Both routes reach exactly the [`resolution_step`] fixpoint.
pub fn resolution_closure(
    f: &CnfFormula,
    width_bound: usize,
    limits: ClosureLimits,
) -> Result<Closure, ResolutionError> {
    if f.num_vars() <= 64 {
        crate::resolution_masked::closure_masked(f, width_bound, limits)
    } else {
        closure_generic(f, width_bound, limits)
    }
}

/// Closure over canonical [`Clause`] values; works for any variable count.
fn closure_generic(
    f: &CnfFormula,
    width_bound: usize,
    limits: ClosureLimits,
) -> Result<Closure, ResolutionError> {
    let mut stats = ClosureStats::default();
    let source: BTreeSet<Clause> = f.clauses().iter().cloned().collect();
    let mut seen = source.clone();
    let mut all: Vec<Clause> = seen.iter().cloned().collect();
    // occ[literal index] = indices into `all` of clauses containing it.
    let lit_slot =
        |l: Literal| -> usize { (l.var() as usize - 1) * 2 + usize::from(l.positive()) };
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); f.num_vars() as usize * 2];
    for (i, c) in all.iter().enumerate() {
        for &l in c.literals() {
            occ[lit_slot(l)].push(i);
        }
    }
    // Indices >= round_start are this round's frontier.
    let mut round_start = 0;

    while round_start < all.len() {
        if stats.rounds >= limits.max_rounds {
            stats.kept = seen.len();
            return Err(ResolutionError::LimitExceeded { what: "round", stats });
        }
        stats.rounds += 1;
        let round_end = all.len();
        let mut fresh: Vec<Clause> = Vec::new();
        for fi in round_start..round_end {
            for li in 0..all[fi].width() {
                let lit = all[fi].literals()[li];
                // Candidates hold the complementary literal; taking only
                // indices below `fi` attempts each new pair exactly once
                // (old-old pairs ran in earlier rounds, and of a
                // frontier-frontier pair the larger index does the work).
                for ci in 0..occ[lit_slot(lit.negated())].len() {
                    let oi = occ[lit_slot(lit.negated())][ci];
                    if oi >= fi {
                        break;
                    }
                    let pivots = complementary_vars(&all[fi], &all[oi]);
                    // Two or more complementary variables make every
                    // resolvent tautological; one pivot, counted once even
                    // though this pair is visible from either side's lists.
                    if pivots.len() != 1 || pivots[0] != lit.var() {
                        continue;
                    }
                    let resolvent =
                        resolve(&all[fi], &all[oi], pivots[0]).expect("verified pivot");
                    if let Some(r) = resolvent {
                        if r.width() <= width_bound {
                            stats.generated += 1;
                            if !seen.contains(&r) {
                                seen.insert(r.clone());
                                fresh.push(r);
                                if seen.len() > limits.max_clauses {
                                    stats.kept = seen.len();
                                    return Err(ResolutionError::LimitExceeded {
                                        what: "clause",
                                        stats,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        for (i, c) in fresh.iter().enumerate() {
            for &l in c.literals() {
                occ[lit_slot(l)].push(round_end + i);
            }
        }
        all.extend(fresh);
        round_start = round_end;
    }

    stats.kept = seen.len();
    let pool: Vec<Clause> = seen.difference(&source).cloned().collect();
    Ok(Closure { clauses: seen, pool, stats })
}

/// Samples an extension: every pool clause of the width-`w` closure of `f`
/// is included independently with probability `p`, driven by `seed`.
pub fn sample_extension(
    f: &CnfFormula,
    width_bound: usize,
    p: f64,
    seed: u64,
    limits: ClosureLimits,
) -> Result<ExtensionSet, ResolutionError> {
    let closure = resolution_closure(f, width_bound, limits)?;
    sample_extension_from_pool(f, &closure.pool, width_bound, p, seed)
}

/// Samples an extension from an already-computed pool. The pool must be the
/// closure pool of `f` for the recorded metadata to be meaningful; the
/// clause-level sampling itself works for any pool.
pub fn sample_extension_from_pool(
    f: &CnfFormula,
    pool: &[Clause],
    width_bound: usize,
    p: f64,
    seed: u64,
) -> Result<ExtensionSet, ResolutionError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(ResolutionError::BadInclusionProb { p });
    }
    let mut rng = Rng::new(seed);
    let resolvents = pool.iter().filter(|_| rng.bernoulli(p)).cloned().collect();
    Ok(ExtensionSet {
        source_hash: formula_digest(f),
        width_bound,
        inclusion_prob: p,
        seed,
        resolvents,
    })
}

/// Chooses the inclusion probability that makes the expected extension size
/// equal `target_expected` for a pool of `pool_size` clauses, capped at 1.
pub fn calibrate_inclusion_prob(
    pool_size: usize,
    target_expected: f64,
) -> Result<f64, ResolutionError> {
    if !(target_expected > 0.0 && target_expected.is_finite()) {
        return Err(ResolutionError::BadCalibrationTarget { target: target_expected });
    }
    if pool_size == 0 {
        return Ok(1.0);
    }
    Ok((target_expected / pool_size as f64).min(1.0))
}

/// Bernoulli-samples a subset of a width-uniform pool of implied clauses
/// (the caller promises implication; it is not checked). This is the
/// idealized fixed-clause-length scheme used by the share simulations.
pub fn sample_fixed_length_extension(
    pool: &[Clause],
    p: f64,
    seed: u64,
) -> Result<Vec<Clause>, ResolutionError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(ResolutionError::BadInclusionProb { p });
    }
    if let Some(first) = pool.first() {
        for c in pool {
            if c.width() != first.width() {
                return Err(ResolutionError::MixedWidthPool {
                    first: first.width(),
                    other: c.width(),
                });
            }
        }
    }
    let mut rng = Rng::new(seed);
    Ok(pool.iter().filter(|_| rng.bernoulli(p)).cloned().collect())
}
