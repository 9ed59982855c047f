//! Stochastic local search solvers instrumented for runtime distributions.
//!
//! Two algorithm families share one flip engine:
//!
//! * **Schöning-style random walk** — pick an unsatisfied clause uniformly
//!   (over occurrences), pick one of its literals uniformly, flip that
//!   variable so the literal becomes true.
//! * **probSAT** — pick an unsatisfied clause uniformly, then pick the
//!   variable to flip with probability proportional to a function of its
//!   *break* value (the number of currently-satisfied clauses the flip would
//!   falsify): `cb^-break` for the exponential variant,
//!   `(1 + break)^-cb` for the polynomial one.
//!
//! The cost measure is the number of flips executed, which is exact,
//! hardware-independent, and counted across restarts. The satisfiability
//! check happens *before* each flip, so a solved initial assignment costs
//! zero flips.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};
use crate::rng::{derive_seed, Rng, Role};

/// Which flip-selection rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Schöning's random walk: uniform literal from a uniform unsatisfied
    /// clause.
    Schoening,
    /// probSAT with exponential break weighting `cb^-break`.
    ProbSatExp,
    /// probSAT with polynomial break weighting `(1 + break)^-cb`.
    ProbSatPoly,
}

/// Solver parameters. `Default` gives Schöning's walk with a 10^8-flip
/// budget, no restarts, and the customary probSAT break exponent 2.3.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Flip-selection rule.
    pub algorithm: Algorithm,
    /// Seed for all of the run's randomness.
    pub seed: u64,
    /// Total flip budget, counted across restarts.
    pub max_flips: u64,
    /// Re-randomize the assignment after this many flips without a solution;
    /// `None` lets the walk run uninterrupted.
    pub restart_interval: Option<u64>,
    /// probSAT break exponent (`cb`); ignored by the random walk.
    pub cb: f64,
    /// Test hook: force the first epoch's initial assignment instead of a
    /// random one. Restart epochs always draw random assignments.
    pub initial: Option<Assignment>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Schoening,
            seed: 0,
            max_flips: 100_000_000,
            restart_interval: None,
            cb: 2.3,
            initial: None,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// A satisfying assignment was found.
    Satisfied,
    /// The flip budget ran out first.
    BudgetExhausted,
}

/// Result of a single solver run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Terminal status.
    pub status: SolveStatus,
    /// Flips executed (across restarts) up to termination.
    pub flips: u64,
    /// Number of restarts performed (fresh random assignments after the
    /// first).
    pub restarts: u64,
    /// The satisfying assignment, when one was found.
    pub witness: Option<Assignment>,
}

/// Aggregate of a batch of independent runs on one formula.
#[derive(Debug, Clone)]
pub struct BatchResult {
    /// Per-run outcomes, in run-index order.
    pub outcomes: Vec<SolveOutcome>,
    /// Mean flips over the *solved* runs; `None` if nothing solved.
    pub mean_flips: Option<f64>,
    /// Unbiased sample variance of flips over solved runs (`None` until two
    /// solved runs exist).
    pub flips_var: Option<f64>,
    /// Number of runs that exhausted their budget.
    pub censored: usize,
}

/// Errors a solver run can hit before doing any work.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    /// The formula contains the empty clause and can never be satisfied;
    /// running a local search on it would loop until the budget burns out.
    #[error("formula contains the empty clause; it is trivially unsatisfiable")]
    EmptyClause,
    /// The forced initial assignment covers fewer variables than the formula.
    #[error("initial assignment covers {got} variables, formula needs {need}")]
    InitialTooSmall {
        /// Variables covered by the hook assignment.
        got: u32,
        /// Variables the formula declares.
        need: u32,
    },
}

/// Reference definition of the probSAT break value: the number of clause
/// occurrences that are currently satisfied *only* by `var`'s literal, i.e.
/// that flipping `var` would falsify. Quadratic and allocation-free; the
/// solver keeps an indexed equivalent, and tests pin the two together.
pub fn break_count(f: &CnfFormula, a: &Assignment, var: u32) -> usize {
    f.clauses()
        .iter()
        .filter(|c| {
            let true_lits = c
                .literals()
                .iter()
                .filter(|l| l.satisfied_by(a.value(l.var())))
                .take(2)
                .collect::<Vec<_>>();
            true_lits.len() == 1 && true_lits[0].var() == var
        })
        .count()
}

/// Literal code: variable index (0-based) doubled, low bit set for the
/// positive polarity.
#[inline]
fn code(var0: usize, positive: bool) -> usize {
    var0 << 1 | positive as usize
}

/// Flip engine: occurrence lists, per-clause satisfied-literal counts, and
/// an unsatisfied-clause stack with O(1) removal.
struct WalkState {
    num_vars: usize,
    /// Clause -> literal codes.
    clauses: Vec<Vec<u32>>,
    /// Literal code -> indices of clauses containing it.
    occ: Vec<Vec<u32>>,
    /// Clause -> number of its literals currently true.
    sat_count: Vec<u32>,
    /// Indices of currently unsatisfied clauses, unordered.
    unsat: Vec<u32>,
    /// Clause -> position in `unsat`, or `u32::MAX` when satisfied.
    unsat_pos: Vec<u32>,
    /// Current values, index = 0-based variable.
    values: Vec<bool>,
    /// Scratch for probSAT weights.
    weights: Vec<f64>,
}

impl WalkState {
    fn compile(f: &CnfFormula) -> WalkState {
        let num_vars = f.num_vars() as usize;
        let clauses: Vec<Vec<u32>> = f
            .clauses()
            .iter()
            .map(|c| {
                c.literals()
                    .iter()
                    .map(|l| code(l.var() as usize - 1, l.positive()) as u32)
                    .collect()
            })
            .collect();
        let mut occ = vec![Vec::new(); num_vars * 2];
        for (ci, lits) in clauses.iter().enumerate() {
            for &lc in lits {
                occ[lc as usize].push(ci as u32);
            }
        }
        let m = clauses.len();
        WalkState {
            num_vars,
            clauses,
            occ,
            sat_count: vec![0; m],
            unsat: Vec::with_capacity(m),
            unsat_pos: vec![u32::MAX; m],
            values: vec![false; num_vars],
            weights: Vec::new(),
        }
    }

    /// Installs an assignment and rebuilds all satisfaction bookkeeping.
    fn reset(&mut self, values: &[bool]) {
        self.values.copy_from_slice(&values[..self.num_vars]);
        self.unsat.clear();
        for (ci, lits) in self.clauses.iter().enumerate() {
            let sat = lits
                .iter()
                .filter(|&&lc| self.values[(lc >> 1) as usize] == (lc & 1 == 1))
                .count() as u32;
            self.sat_count[ci] = sat;
            if sat == 0 {
                self.unsat_pos[ci] = self.unsat.len() as u32;
                self.unsat.push(ci as u32);
            } else {
                self.unsat_pos[ci] = u32::MAX;
            }
        }
    }

    #[inline]
    fn solved(&self) -> bool {
        self.unsat.is_empty()
    }

    /// Break value of flipping `var0` (0-based): clauses whose only true
    /// literal is `var0`'s current one.
    #[inline]
    fn break_value(&self, var0: usize) -> u32 {
        let true_code = code(var0, self.values[var0]);
        self.occ[true_code]
            .iter()
            .filter(|&&ci| self.sat_count[ci as usize] == 1)
            .count() as u32
    }

    /// Flips one variable, updating counts and the unsat stack.
    fn flip(&mut self, var0: usize) {
        let old = self.values[var0];
        self.values[var0] = !old;
        let became_false = code(var0, old);
        let became_true = code(var0, !old);
        for &ci in &self.occ[became_true] {
            let ci_us = ci as usize;
            self.sat_count[ci_us] += 1;
            if self.sat_count[ci_us] == 1 {
                // Newly satisfied: swap-remove from the unsat stack.
                let pos = self.unsat_pos[ci_us] as usize;
                let last = *self.unsat.last().expect("stack has the clause");
                self.unsat.swap_remove(pos);
                if pos < self.unsat.len() {
                    self.unsat_pos[last as usize] = pos as u32;
                }
                self.unsat_pos[ci_us] = u32::MAX;
            }
        }
        for &ci in &self.occ[became_false] {
            let ci_us = ci as usize;
            self.sat_count[ci_us] -= 1;
            if self.sat_count[ci_us] == 0 {
                self.unsat_pos[ci_us] = self.unsat.len() as u32;
                self.unsat.push(ci);
            }
        }
    }

    /// Picks the variable to flip according to the algorithm and flips it.
    fn step(&mut self, algorithm: Algorithm, cb: f64, rng: &mut Rng) {
        let clause_idx = self.unsat[rng.below(self.unsat.len() as u64) as usize] as usize;
        let width = self.clauses[clause_idx].len();
        let var0 = match algorithm {
            Algorithm::Schoening => {
                (self.clauses[clause_idx][rng.below(width as u64) as usize] >> 1) as usize
            }
            Algorithm::ProbSatExp | Algorithm::ProbSatPoly => {
                // The scratch vector is taken out of `self` so we can push
                // into it while `break_value` borrows the rest of the state.
                let mut weights = std::mem::take(&mut self.weights);
                weights.clear();
                let mut total = 0.0f64;
                for k in 0..width {
                    let v0 = (self.clauses[clause_idx][k] >> 1) as usize;
                    let brk = self.break_value(v0) as f64;
                    let w = match algorithm {
                        Algorithm::ProbSatExp => cb.powf(-brk),
                        _ => (1.0 + brk).powf(-cb),
                    };
                    total += w;
                    weights.push(w);
                }
                let mut u = rng.next_f64() * total;
                let mut chosen = width - 1;
                for (i, &w) in weights.iter().enumerate() {
                    if u < w {
                        chosen = i;
                        break;
                    }
                    u -= w;
                }
                let picked = (self.clauses[clause_idx][chosen] >> 1) as usize;
                self.weights = weights;
                picked
            }
        };
        self.flip(var0);
    }
}

/// Runs one solver instance to completion or budget exhaustion.
pub fn solve(f: &CnfFormula, cfg: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    if f.has_empty_clause() {
        return Err(SolverError::EmptyClause);
    }
    if let Some(init) = &cfg.initial {
        if init.num_vars() < f.num_vars() {
            return Err(SolverError::InitialTooSmall {
                got: init.num_vars(),
                need: f.num_vars(),
            });
        }
    }
    let mut rng = Rng::new(cfg.seed);
    let mut state = WalkState::compile(f);
    let mut flips = 0u64;
    let mut restarts = 0u64;
    let mut first_epoch = true;

    loop {
        match (&cfg.initial, first_epoch) {
            (Some(init), true) => state.reset(init.values()),
            _ => {
                let a = Assignment::random(f.num_vars(), &mut rng);
                state.reset(a.values());
            }
        }
        first_epoch = false;
        let mut epoch_flips = 0u64;
        loop {
            if state.solved() {
                let witness = Assignment::from_values(state.values.clone());
                debug_assert!(f.evaluate(&witness));
                return Ok(SolveOutcome {
                    status: SolveStatus::Satisfied,
                    flips,
                    restarts,
                    witness: Some(witness),
                });
            }
            if flips >= cfg.max_flips {
                return Ok(SolveOutcome {
                    status: SolveStatus::BudgetExhausted,
                    flips,
                    restarts,
                    witness: None,
                });
            }
            if let Some(t) = cfg.restart_interval {
                if epoch_flips >= t {
                    restarts += 1;
                    break;
                }
            }
            state.step(cfg.algorithm, cfg.cb, &mut rng);
            flips += 1;
            epoch_flips += 1;
        }
    }
}

/// Runs `runs` independent solver instances in parallel. Run `i` uses the
/// seed `derive_seed(cfg.seed, Role::SolverRun, i)`, and outcomes are
/// reported in run-index order, so results do not depend on scheduling.
pub fn run_batch(
    f: &CnfFormula,
    cfg: &SolverConfig,
    runs: u32,
) -> Result<BatchResult, SolverError> {
    let outcomes: Result<Vec<SolveOutcome>, SolverError> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut run_cfg = cfg.clone();
            run_cfg.seed = derive_seed(cfg.seed, Role::SolverRun, i as u64);
            if i > 0 {
                // The initial-assignment hook applies to run 0 only; other
                // runs are independent random starts.
                run_cfg.initial = None;
            }
            solve(f, &run_cfg)
        })
        .collect();
    let outcomes = outcomes?;
    Ok(summarize_batch(outcomes))
}

/// Builds the batch aggregate from per-run outcomes.
pub fn summarize_batch(outcomes: Vec<SolveOutcome>) -> BatchResult {
    let solved: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.status == SolveStatus::Satisfied)
        .map(|o| o.flips as f64)
        .collect();
    let censored = outcomes.len() - solved.len();
    let mean_flips = if solved.is_empty() {
        None
    } else {
        Some(solved.iter().sum::<f64>() / solved.len() as f64)
    };
    let flips_var = if solved.len() >= 2 {
        let m = mean_flips.unwrap();
        Some(solved.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (solved.len() - 1) as f64)
    } else {
        None
    };
    BatchResult { outcomes, mean_flips, flips_var, censored }
}
