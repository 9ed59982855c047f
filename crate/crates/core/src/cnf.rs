//! CNF formulas, assignments, and the handful of exact queries the rest of
//! the crate is built on.
//!
//! Clauses are canonical at construction: literals are sorted by
//! `(variable, sign)` and duplicates are merged, and a clause containing both
//! `x` and `!x` is rejected outright. Formulas are plain clause *sequences* —
//! repeated clauses are kept, because solvers pick uniformly over clause
//! occurrences and the base/extension bookkeeping depends on positions.

use std::fmt;

use thiserror::Error;

/// Errors from constructing or querying CNF values.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    /// A clause contained a variable and its negation.
    #[error("clause contains both polarities of variable {var}")]
    Tautology {
        /// The offending variable index.
        var: u32,
    },
    /// Variable index 0 is reserved by the DIMACS encoding.
    #[error("variable index 0 is not allowed")]
    VarZero,
    /// A clause referenced a variable above the formula's declared count.
    #[error("variable {var} exceeds the declared count {num_vars}")]
    VarOutOfRange {
        /// The offending variable index.
        var: u32,
        /// Declared variable count of the formula.
        num_vars: u32,
    },
    /// Exhaustive enumeration is capped to keep memory and time sane.
    #[error("exhaustive search supports at most {max} variables, formula has {num_vars}")]
    TooManyVars {
        /// The enumeration cap.
        max: u32,
        /// Declared variable count of the formula.
        num_vars: u32,
    },
}

/// A literal: a 1-based variable index plus a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    /// `true` for the positive literal `x`, `false` for `!x`. Field order
    /// makes the derived `Ord` sort by variable first, negative before
    /// positive — the canonical clause order used everywhere.
    positive: bool,
}

impl Literal {
    /// Creates a literal. Fails only for the reserved index 0.
    pub fn new(var: u32, positive: bool) -> Result<Self, CnfError> {
        if var == 0 {
            return Err(CnfError::VarZero);
        }
        Ok(Literal { var, positive })
    }

    /// The literal's variable index (1-based).
    #[inline]
    pub fn var(self) -> u32 {
        self.var
    }

    /// Whether this is the positive polarity.
    #[inline]
    pub fn positive(self) -> bool {
        self.positive
    }

    /// The same variable with the opposite sign.
    #[inline]
    pub fn negated(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }

    /// DIMACS integer encoding: `x` as `var`, `!x` as `-var`.
    #[inline]
    pub fn to_dimacs(self) -> i64 {
        if self.positive { self.var as i64 } else { -(self.var as i64) }
    }

    /// Parses the DIMACS integer encoding. Zero and out-of-range magnitudes
    /// are rejected.
    pub fn from_dimacs(code: i64) -> Result<Self, CnfError> {
        let var = code.unsigned_abs();
        if var == 0 || var > u32::MAX as u64 {
            return Err(CnfError::VarZero);
        }
        Ok(Literal { var: var as u32, positive: code > 0 })
    }

    /// Whether the literal is true under `value` of its variable.
    #[inline]
    pub fn satisfied_by(self, value: bool) -> bool {
        self.positive == value
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals in canonical form: sorted by
/// `(variable, sign)`, duplicate-free, never tautological.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause from arbitrary literals. Duplicates are merged;
    /// a complementary pair (`x` and `!x`) is an error.
    pub fn new(mut literals: Vec<Literal>) -> Result<Self, CnfError> {
        literals.sort_unstable();
        literals.dedup();
        for pair in literals.windows(2) {
            if pair[0].var() == pair[1].var() {
                return Err(CnfError::Tautology { var: pair[0].var() });
            }
        }
        Ok(Clause { literals })
    }

    /// Convenience constructor from DIMACS integer codes.
    pub fn from_dimacs(codes: &[i64]) -> Result<Self, CnfError> {
        let lits = codes.iter().map(|&c| Literal::from_dimacs(c)).collect::<Result<_, _>>()?;
        Clause::new(lits)
    }

    /// The literals in canonical order.
    #[inline]
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// Number of literals; the clause's *width*.
    #[inline]
    pub fn width(&self) -> usize {
        self.literals.len()
    }

    /// The empty clause is unsatisfiable under every assignment.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Whether some variable occurs in the clause (either sign).
    #[inline]
    pub fn mentions(&self, var: u32) -> bool {
        self.literals.binary_search_by_key(&var, |l| l.var()).is_ok()
    }

    /// Largest variable index occurring in the clause (0 for the empty one).
    pub fn max_var(&self) -> u32 {
        self.literals.last().map_or(0, |l| l.var())
    }

    /// Whether the assignment satisfies the clause.
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(a.value(l.var())))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "{}0", if self.literals.is_empty() { "" } else { " " })
    }
}

/// A complete truth assignment for variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    /// All-false assignment over `num_vars` variables.
    pub fn all_false(num_vars: u32) -> Self {
        Assignment { values: vec![false; num_vars as usize] }
    }

    /// Assignment from explicit values; index `i` holds variable `i + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// Assignment from the low `num_vars` bits of a mask (bit `i` is
    /// variable `i + 1`). Only meaningful for `num_vars <= 64`.
    pub fn from_bits(mask: u64, num_vars: u32) -> Self {
        let values = (0..num_vars).map(|i| mask >> i & 1 == 1).collect();
        Assignment { values }
    }

    /// Uniformly random assignment.
    pub fn random(num_vars: u32, rng: &mut crate::rng::Rng) -> Self {
        let values = (0..num_vars).map(|_| rng.next_u64() & 1 == 1).collect();
        Assignment { values }
    }

    /// Number of variables covered.
    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of variable `var` (1-based). Panics if out of range.
    #[inline]
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    /// Flips variable `var` in place. Panics if out of range.
    #[inline]
    pub fn flip(&mut self, var: u32) {
        let v = &mut self.values[var as usize - 1];
        *v = !*v;
    }

    /// Raw values, index `i` holding variable `i + 1`.
    #[inline]
    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// Which unsatisfied clauses [`CnfFormula::count_unsat`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnsatFilter {
    /// Every unsatisfied clause.
    All,
    /// Only unsatisfied clauses that mention the variable (either sign).
    Containing(u32),
    /// Only unsatisfied clauses that do not mention the variable.
    NotContaining(u32),
}

/// A CNF formula: a declared variable count and a clause sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Builds a formula, checking every clause against the declared
    /// variable count.
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            let mv = c.max_var();
            if mv > num_vars {
                return Err(CnfError::VarOutOfRange { var: mv, num_vars });
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Declared variable count (variables may be unused by clauses).
    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// The clause sequence, in storage order.
    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clause occurrences.
    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Whether any clause is the empty clause.
    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// A new formula with `extra` clauses appended after the existing ones.
    /// The variable count grows if the extras need it.
    pub fn extended(&self, extra: &[Clause]) -> CnfFormula {
        let extra_max = extra.iter().map(Clause::max_var).max().unwrap_or(0);
        let mut clauses = self.clauses.clone();
        clauses.extend_from_slice(extra);
        CnfFormula { num_vars: self.num_vars.max(extra_max), clauses }
    }

    /// Whether the assignment satisfies every clause. The empty formula is
    /// satisfied by anything; a formula with an empty clause by nothing.
    ///
    /// Panics if the assignment covers fewer variables than the formula
    /// declares.
    pub fn evaluate(&self, a: &Assignment) -> bool {
        assert!(
            a.num_vars() >= self.num_vars,
            "assignment covers {} variables, formula declares {}",
            a.num_vars(),
            self.num_vars
        );
        self.clauses.iter().all(|c| c.satisfied_by(a))
    }

    /// Number of unsatisfied clause occurrences under `a`, restricted by the
    /// filter. Counts occurrences: a clause appearing twice counts twice.
    ///
    /// Panics on an undersized assignment or a filter variable above the
    /// declared count.
    pub fn count_unsat(&self, a: &Assignment, filter: UnsatFilter) -> usize {
        assert!(a.num_vars() >= self.num_vars, "assignment too small for formula");
        if let UnsatFilter::Containing(v) | UnsatFilter::NotContaining(v) = filter {
            assert!(v >= 1 && v <= self.num_vars, "filter variable {v} out of range");
        }
        self.clauses
            .iter()
            .filter(|c| !c.satisfied_by(a))
            .filter(|c| match filter {
                UnsatFilter::All => true,
                UnsatFilter::Containing(v) => c.mentions(v),
                UnsatFilter::NotContaining(v) => !c.mentions(v),
            })
            .count()
    }
}

/// Per-clause bitmasks for assignments packed into a `u64`, used by the
/// exhaustive queries below.
fn clause_masks(f: &CnfFormula) -> Vec<(u64, u64)> {
    f.clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for l in c.literals() {
                let bit = 1u64 << (l.var() - 1);
                if l.positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect()
}

/// Largest variable count the exhaustive queries accept.
pub const BRUTE_FORCE_MAX_VARS: u32 = 24;

/// Decides satisfiability by trying every assignment, returning a witness
/// for satisfiable formulas. Only for formulas with at most
/// [`BRUTE_FORCE_MAX_VARS`] variables.
pub fn brute_force_satisfiable(f: &CnfFormula) -> Result<Option<Assignment>, CnfError> {
    if f.num_vars() > BRUTE_FORCE_MAX_VARS {
        return Err(CnfError::TooManyVars { max: BRUTE_FORCE_MAX_VARS, num_vars: f.num_vars() });
    }
    let masks = clause_masks(f);
    for a in 0..1u64 << f.num_vars() {
        if masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0) {
            return Ok(Some(Assignment::from_bits(a, f.num_vars())));
        }
    }
    Ok(None)
}

/// Enumerates every satisfying assignment as a bitmask (bit `i` holds
/// variable `i + 1`), in increasing mask order. Same size cap as
/// [`brute_force_satisfiable`].
pub fn enumerate_models(f: &CnfFormula) -> Result<Vec<u64>, CnfError> {
    if f.num_vars() > BRUTE_FORCE_MAX_VARS {
        return Err(CnfError::TooManyVars { max: BRUTE_FORCE_MAX_VARS, num_vars: f.num_vars() });
    }
    let masks = clause_masks(f);
    let mut models = Vec::new();
    for a in 0..1u64 << f.num_vars() {
        if masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0) {
            models.push(a);
        }
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn clause(codes: &[i64]) -> Clause {
        Clause::from_dimacs(codes).unwrap()
    }

    #[test]
    fn clause_canonicalizes_and_dedups() {
        let c = clause(&[3, -1, 3, 2]);
        let lits: Vec<i64> = c.literals().iter().map(|l| l.to_dimacs()).collect();
        assert_eq!(lits, vec![-1, 2, 3]);
        assert_eq!(c.width(), 3);
    }

    #[test]
    fn tautological_clause_rejected() {
        assert_eq!(Clause::from_dimacs(&[1, -1]), Err(CnfError::Tautology { var: 1 }));
        assert_eq!(Clause::from_dimacs(&[2, 3, -3]), Err(CnfError::Tautology { var: 3 }));
    }

    #[test]
    fn variable_zero_rejected() {
        assert_eq!(Literal::from_dimacs(0), Err(CnfError::VarZero));
        assert_eq!(Literal::new(0, true), Err(CnfError::VarZero));
    }

    #[test]
    fn out_of_range_variable_rejected() {
        let err = CnfFormula::new(2, vec![clause(&[1, 3])]).unwrap_err();
        assert_eq!(err, CnfError::VarOutOfRange { var: 3, num_vars: 2 });
    }

    #[test]
    fn empty_formula_is_satisfied_even_by_empty_assignment() {
        let f = CnfFormula::new(0, vec![]).unwrap();
        assert!(f.evaluate(&Assignment::from_values(vec![])));
    }

    #[test]
    fn empty_clause_defeats_every_assignment() {
        let f = CnfFormula::new(1, vec![Clause::new(vec![]).unwrap()]).unwrap();
        assert!(!f.evaluate(&Assignment::from_bits(0, 1)));
        assert!(!f.evaluate(&Assignment::from_bits(1, 1)));
        assert_eq!(brute_force_satisfiable(&f).unwrap(), None);
    }

    #[test]
    fn unit_clause_fixes_its_variable() {
        let f = CnfFormula::new(1, vec![clause(&[-1])]).unwrap();
        assert!(f.evaluate(&Assignment::from_bits(0, 1)));
        assert!(!f.evaluate(&Assignment::from_bits(1, 1)));
    }

    #[test]
    #[should_panic(expected = "assignment covers")]
    fn undersized_assignment_panics() {
        let f = CnfFormula::new(3, vec![clause(&[1])]).unwrap();
        f.evaluate(&Assignment::from_bits(0, 2));
    }

    #[test]
    fn count_unsat_respects_filters() {
        // Under all-false: (1 2) unsat, (-1 3) sat, (2) unsat, (-3) sat.
        let f = CnfFormula::new(
            3,
            vec![clause(&[1, 2]), clause(&[-1, 3]), clause(&[2]), clause(&[-3])],
        )
        .unwrap();
        let a = Assignment::all_false(3);
        assert_eq!(f.count_unsat(&a, UnsatFilter::All), 2);
        assert_eq!(f.count_unsat(&a, UnsatFilter::Containing(2)), 2);
        assert_eq!(f.count_unsat(&a, UnsatFilter::NotContaining(2)), 0);
        assert_eq!(f.count_unsat(&a, UnsatFilter::Containing(1)), 1);
        assert_eq!(f.count_unsat(&a, UnsatFilter::NotContaining(1)), 1);
    }

    #[test]
    fn count_unsat_counts_duplicate_occurrences() {
        let f = CnfFormula::new(2, vec![clause(&[1, 2]), clause(&[1, 2])]).unwrap();
        let a = Assignment::all_false(2);
        assert_eq!(f.count_unsat(&a, UnsatFilter::All), 2);
    }

    #[test]
    fn flip_is_an_involution() {
        let mut rng = Rng::new(11);
        let mut a = Assignment::random(8, &mut rng);
        let before = a.clone();
        a.flip(5);
        assert_ne!(a, before);
        a.flip(5);
        assert_eq!(a, before);
    }

    #[test]
    fn brute_force_finds_the_planted_model() {
        // (1) & (-1 2) & (-2 3) forces 1, 2, 3 all true.
        let f =
            CnfFormula::new(3, vec![clause(&[1]), clause(&[-1, 2]), clause(&[-2, 3])]).unwrap();
        let witness = brute_force_satisfiable(&f).unwrap().unwrap();
        assert!(f.evaluate(&witness));
        assert_eq!(enumerate_models(&f).unwrap(), vec![0b111]);
    }

    #[test]
    fn brute_force_refuses_large_formulas() {
        let f = CnfFormula::new(25, vec![]).unwrap();
        assert!(matches!(brute_force_satisfiable(&f), Err(CnfError::TooManyVars { .. })));
    }

    /// Arbitrary small formulas for the property tests below.
    fn formula_strategy(max_vars: u32) -> impl Strategy<Value = CnfFormula> {
        let clause_strat = proptest::collection::vec(
            (1..=max_vars, proptest::bool::ANY),
            1..=3usize,
        )
        .prop_filter_map("tautology-free clause", |pairs| {
            let lits = pairs
                .into_iter()
                .map(|(v, s)| Literal::new(v, s).unwrap())
                .collect::<Vec<_>>();
            Clause::new(lits).ok()
        });
        proptest::collection::vec(clause_strat, 0..20)
            .prop_map(move |clauses| CnfFormula::new(max_vars, clauses).unwrap())
    }

    proptest! {
        /// The filtered counts partition the unfiltered one, for every
        /// variable and assignment.
        #[test]
        fn unsat_counts_partition(
            f in formula_strategy(6),
            mask in 0u64..64,
            var in 1u32..=6,
        ) {
            let a = Assignment::from_bits(mask, 6);
            let all = f.count_unsat(&a, UnsatFilter::All);
            let with = f.count_unsat(&a, UnsatFilter::Containing(var));
            let without = f.count_unsat(&a, UnsatFilter::NotContaining(var));
            prop_assert_eq!(all, with + without);
        }

        /// A formula evaluates true exactly when no clause is unsatisfied.
        #[test]
        fn evaluate_agrees_with_count(f in formula_strategy(6), mask in 0u64..64) {
            let a = Assignment::from_bits(mask, 6);
            prop_assert_eq!(f.evaluate(&a), f.count_unsat(&a, UnsatFilter::All) == 0);
        }
    }
}
