//! DIMACS CNF reading and writing.
//!
//! The reader is strict about structure (header present, clauses
//! zero-terminated, variables within the declared range, no tautological
//! clauses) but treats a clause-count mismatch between the header and the
//! body as a warning: mislabeled headers are endemic in benchmark archives
//! and the body is the ground truth.

use std::fmt;

use thiserror::Error;

use crate::cnf::{Clause, CnfError, CnfFormula, Literal};

/// Parse failures that make a DIMACS stream unusable.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    /// No `p cnf <vars> <clauses>` line before the clauses.
    #[error("missing 'p cnf' header")]
    MissingHeader,
    /// A malformed problem line.
    #[error("malformed header on line {line}: {text:?}")]
    BadHeader {
        /// 1-based line number.
        line: usize,
        /// The offending line.
        text: String,
    },
    /// A second problem line.
    #[error("duplicate header on line {line}")]
    DuplicateHeader {
        /// 1-based line number.
        line: usize,
    },
    /// A token that is neither a literal nor a clause terminator.
    #[error("unexpected token {token:?} on line {line}")]
    BadToken {
        /// 1-based line number.
        line: usize,
        /// The offending token.
        token: String,
    },
    /// The stream ended inside a clause (no closing `0`).
    #[error("stream ends inside a clause: missing terminating 0")]
    UnterminatedClause,
    /// A structurally invalid clause or formula (tautology, variable out of
    /// declared range, ...).
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// Non-fatal observations made while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Header declared one clause count, the body held another.
    ClauseCountMismatch {
        /// Count promised by the `p cnf` line.
        declared: usize,
        /// Count actually parsed.
        actual: usize,
    },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::ClauseCountMismatch { declared, actual } => write!(
                f,
                "header declares {declared} clauses but the body contains {actual}"
            ),
        }
    }
}

/// A parsed formula plus any warnings the reader accumulated.
#[derive(Debug, Clone)]
pub struct ParsedCnf {
    /// The formula, with exactly the header's variable count.
    pub formula: CnfFormula,
    /// Non-fatal irregularities of the input.
    pub warnings: Vec<ParseWarning>,
}

/// Parses DIMACS CNF text. Accepts `\n` and `\r\n` line endings, comment
/// lines starting with `c` anywhere, and clauses split across or sharing
/// lines.
pub fn parse_dimacs(input: &str) -> Result<ParsedCnf, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();

    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, cls] => {
                    vars.parse::<u32>().ok().zip(cls.parse::<usize>().ok())
                }
                _ => None,
            };
            header = Some(parsed.ok_or(DimacsError::BadHeader {
                line: line_no,
                text: line.to_string(),
            })?);
            continue;
        }
        if header.is_none() {
            return Err(DimacsError::MissingHeader);
        }
        for token in line.split_ascii_whitespace() {
            let code: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if code == 0 {
                clauses.push(Clause::new(std::mem::take(&mut pending))?);
            } else {
                pending.push(Literal::from_dimacs(code)?);
            }
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !pending.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    let actual = clauses.len();
    let formula = CnfFormula::new(num_vars, clauses)?;
    let mut warnings = Vec::new();
    if declared != actual {
        warnings.push(ParseWarning::ClauseCountMismatch { declared, actual });
    }
    Ok(ParsedCnf { formula, warnings })
}

/// Writes a formula as DIMACS CNF with `\n` line endings, one clause per
/// line, literals in canonical order.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    emit_dimacs_with_comments(f, &[])
}

/// Like [`emit_dimacs`] but with comment lines (sans the leading `c `)
/// placed before the header.
pub fn emit_dimacs_with_comments(f: &CnfFormula, comments: &[String]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for comment in comments {
        if comment.is_empty() {
            out.push_str("c\n");
        } else {
            writeln!(out, "c {comment}").unwrap();
        }
    }
    writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses()).unwrap();
    for clause in f.clauses() {
        writeln!(out, "{clause}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_a_plain_file() {
        let text = "c a comment\np cnf 3 2\n1 -2 0\n2 3 0\n";
        let parsed = parse_dimacs(text).unwrap();
        assert_eq!(parsed.formula.num_vars(), 3);
        assert_eq!(parsed.formula.num_clauses(), 2);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn accepts_crlf_and_split_clauses() {
        let text = "p cnf 4 2\r\n1 2\r\n-3 0 4 0\r\n";
        let parsed = parse_dimacs(text).unwrap();
        assert_eq!(parsed.formula.num_clauses(), 2);
        assert_eq!(parsed.formula.clauses()[0].width(), 3);
        assert_eq!(parsed.formula.clauses()[1].width(), 1);
    }

    #[test]
    fn clause_count_mismatch_is_a_warning() {
        let text = "p cnf 2 5\n1 0\n";
        let parsed = parse_dimacs(text).unwrap();
        assert_eq!(
            parsed.warnings,
            vec![ParseWarning::ClauseCountMismatch { declared: 5, actual: 1 }]
        );
    }

    #[test]
    fn missing_header_is_an_error() {
        let err = parse_dimacs("1 2 0\n").unwrap_err();
        assert_eq!(err, DimacsError::MissingHeader);
    }

    #[test]
    fn unterminated_clause_is_an_error() {
        let err = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert_eq!(err, DimacsError::UnterminatedClause);
    }

    #[test]
    fn out_of_range_literal_is_an_error() {
        let err = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert_eq!(err, DimacsError::Cnf(CnfError::VarOutOfRange { var: 3, num_vars: 2 }));
    }

    #[test]
    fn tautological_clause_is_an_error() {
        let err = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap_err();
        assert_eq!(err, DimacsError::Cnf(CnfError::Tautology { var: 1 }));
    }

    #[test]
    fn bad_token_is_an_error() {
        let err = parse_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert!(matches!(err, DimacsError::BadToken { token, .. } if token == "x"));
    }

    #[test]
    fn comments_between_clauses_are_fine() {
        let parsed = parse_dimacs("p cnf 2 2\n1 0\nc interlude\n2 0\n").unwrap();
        assert_eq!(parsed.formula.num_clauses(), 2);
    }

    fn formula_strategy() -> impl Strategy<Value = CnfFormula> {
        let clause = proptest::collection::vec((1u32..=8, proptest::bool::ANY), 1..=4)
            .prop_filter_map("no tautologies", |pairs| {
                let lits = pairs
                    .into_iter()
                    .map(|(v, s)| Literal::new(v, s).unwrap())
                    .collect();
                Clause::new(lits).ok()
            });
        proptest::collection::vec(clause, 0..12)
            .prop_map(|cls| CnfFormula::new(8, cls).unwrap())
    }

    proptest! {
        /// emit -> parse is the identity on formula values, with no warnings.
        #[test]
        fn round_trip(f in formula_strategy()) {
            let text = emit_dimacs(&f);
            let parsed = parse_dimacs(&text).unwrap();
            prop_assert_eq!(parsed.formula, f);
            prop_assert!(parsed.warnings.is_empty());
        }
    }
}
