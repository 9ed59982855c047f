//! Random k-CNF instance generation: the uniform model and a planted
//! (guaranteed-satisfiable) variant, plus a satisfiability screen for
//! filtering experiment inputs.

use thiserror::Error;

use crate::cnf::{
    brute_force_satisfiable, Assignment, Clause, CnfFormula, Literal, BRUTE_FORCE_MAX_VARS,
};
use crate::rng::Rng;
use crate::solvers::{solve, Algorithm, SolveStatus, SolverConfig};

/// Parameters of a random k-CNF draw.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    /// Number of variables.
    pub num_vars: u32,
    /// Literals per clause (`k`).
    pub clause_width: usize,
    /// Clause-to-variable ratio; the instance gets `floor(ratio * num_vars)`
    /// clauses.
    pub ratio: f64,
    /// Seed for the draw.
    pub seed: u64,
}

/// Errors from nonsensical generation parameters.
#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    /// Zero variables cannot host any clause.
    #[error("cannot generate over zero variables")]
    NoVariables,
    /// Clause width must fit the variable count (distinct variables).
    #[error("clause width {width} exceeds variable count {num_vars}")]
    WidthTooLarge {
        /// Requested clause width.
        width: usize,
        /// Available variables.
        num_vars: u32,
    },
    /// Clause width zero would generate empty clauses.
    #[error("clause width must be at least 1")]
    WidthZero,
    /// The clause ratio must be a positive finite number.
    #[error("clause ratio {ratio} is not positive and finite")]
    BadRatio {
        /// The offending ratio.
        ratio: f64,
    },
}

fn validate(spec: &GenSpec) -> Result<(), GenError> {
    if spec.num_vars == 0 {
        return Err(GenError::NoVariables);
    }
    if spec.clause_width == 0 {
        return Err(GenError::WidthZero);
    }
    if spec.clause_width > spec.num_vars as usize {
        return Err(GenError::WidthTooLarge {
            width: spec.clause_width,
            num_vars: spec.num_vars,
        });
    }
    if !(spec.ratio > 0.0 && spec.ratio.is_finite()) {
        return Err(GenError::BadRatio { ratio: spec.ratio });
    }
    Ok(())
}

/// Draws one clause: `k` distinct variables uniformly without replacement,
/// each polarity a fair coin. Distinct variables make tautologies
/// impossible.
fn random_clause(num_vars: u32, width: usize, rng: &mut Rng) -> Clause {
    let mut vars: Vec<u32> = Vec::with_capacity(width);
    while vars.len() < width {
        let v = rng.below(num_vars as u64) as u32 + 1;
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let lits = vars
        .into_iter()
        .map(|v| Literal::new(v, rng.next_u64() & 1 == 1).expect("v >= 1"))
        .collect();
    Clause::new(lits).expect("distinct variables cannot clash")
}

/// Uniform random k-CNF: `floor(ratio * n)` independent clauses. Duplicate
/// clauses may occur, as in the standard uniform model.
pub fn gen_uniform(spec: &GenSpec) -> Result<CnfFormula, GenError> {
    validate(spec)?;
    let mut rng = Rng::new(spec.seed);
    let m = (spec.ratio * spec.num_vars as f64).floor() as usize;
    let clauses = (0..m)
        .map(|_| random_clause(spec.num_vars, spec.clause_width, &mut rng))
        .collect();
    Ok(CnfFormula::new(spec.num_vars, clauses).expect("vars in range by construction"))
}

/// Planted random k-CNF: draws a hidden assignment first, then
/// rejection-samples each clause until the hidden assignment satisfies it.
/// Returns the instance together with the planted witness.
pub fn gen_planted(spec: &GenSpec) -> Result<(CnfFormula, Assignment), GenError> {
    validate(spec)?;
    let mut rng = Rng::new(spec.seed);
    let hidden = Assignment::random(spec.num_vars, &mut rng);
    let m = (spec.ratio * spec.num_vars as f64).floor() as usize;
    let clauses = (0..m)
        .map(|_| loop {
            let c = random_clause(spec.num_vars, spec.clause_width, &mut rng);
            if c.satisfied_by(&hidden) {
                return c;
            }
        })
        .collect();
    let f = CnfFormula::new(spec.num_vars, clauses).expect("vars in range by construction");
    debug_assert!(f.evaluate(&hidden));
    Ok((f, hidden))
}

/// Verdict of [`screen_satisfiable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Screen {
    /// A satisfying assignment is in hand.
    Satisfiable(Assignment),
    /// Exhaustive search proved there is none (only possible for small
    /// formulas).
    Unsatisfiable,
    /// The screen's budget ran out without a verdict.
    Unknown,
}

/// Screens a formula for satisfiability: exhaustively for at most
/// [`BRUTE_FORCE_MAX_VARS`] variables (definitive), otherwise by a seeded
/// random-walk search with the given flip budget (a found witness is
/// definitive; exhausting the budget is not).
pub fn screen_satisfiable(f: &CnfFormula, flip_budget: u64, seed: u64) -> Screen {
    if f.num_vars() <= BRUTE_FORCE_MAX_VARS {
        return match brute_force_satisfiable(f).expect("size checked") {
            Some(w) => Screen::Satisfiable(w),
            None => Screen::Unsatisfiable,
        };
    }
    if f.has_empty_clause() {
        return Screen::Unsatisfiable;
    }
    // probSAT is by far the strongest certifier here; a found witness is a
    // witness no matter which solver found it.
    let cfg = SolverConfig {
        algorithm: Algorithm::ProbSatExp,
        seed,
        max_flips: flip_budget,
        restart_interval: None,
        cb: 2.3,
        initial: None,
    };
    match solve(f, &cfg) {
        Ok(out) if out.status == SolveStatus::Satisfied => {
            Screen::Satisfiable(out.witness.expect("satisfied runs carry a witness"))
        }
        _ => Screen::Unknown,
    }
}
