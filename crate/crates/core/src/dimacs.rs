//! DIMACS CNF reading and writing, restricted to clauses of width at most 3.
//!
//! Variable names travel as comment lines of the form `c name <index> <name>`
//! and are restored on parse. Other comment lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Clause, Formula, Literal, NameTable, MAX_CLAUSE_WIDTH};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed name comment `{text}`")]
    MalformedName { line: usize, text: String },
    #[error("line {line}: `{token}` is not an integer")]
    BadToken { line: usize, token: String },
    #[error(
        "line {line}: clause has more than {MAX_CLAUSE_WIDTH} literals; instance is not 3-CNF"
    )]
    ClauseTooWide { line: usize },
    #[error("line {line}: variable {var} exceeds header count {num_variables}")]
    VariableOutOfRange {
        line: usize,
        var: u64,
        num_variables: u32,
    },
    #[error("last clause is missing its 0 terminator")]
    MissingTerminator,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
}

/// Parses DIMACS CNF text. Clause order and intra-clause literal order are
/// preserved exactly.
pub fn parse_dimacs(text: &str) -> Result<Formula, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut names = NameTable::new();
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut open = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "c" || trimmed.starts_with("c ") || trimmed.starts_with("c\t") {
            let mut words = trimmed.split_whitespace().skip(1);
            if words.next() == Some("name") {
                let (Some(var), Some(name), None) = (words.next(), words.next(), words.next())
                else {
                    return Err(DimacsError::MalformedName {
                        line,
                        text: trimmed.to_string(),
                    });
                };
                let var: u32 = match var.parse() {
                    Ok(v) if v >= 1 => v,
                    _ => {
                        return Err(DimacsError::MalformedName {
                            line,
                            text: trimmed.to_string(),
                        })
                    }
                };
                names.insert(var, name.to_string());
            }
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            header = Some(
                parse_header(trimmed).ok_or_else(|| DimacsError::MalformedHeader {
                    line,
                    text: trimmed.to_string(),
                })?,
            );
            continue;
        }
        let Some((num_variables, _)) = header else {
            return Err(DimacsError::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(Clause::new(std::mem::take(&mut current)).expect("width checked"));
                open = false;
                continue;
            }
            if value.unsigned_abs() > num_variables as u64 {
                return Err(DimacsError::VariableOutOfRange {
                    line,
                    var: value.unsigned_abs(),
                    num_variables,
                });
            }
            if current.len() == MAX_CLAUSE_WIDTH {
                return Err(DimacsError::ClauseTooWide { line });
            }
            current.push(Literal::from_dimacs(value).expect("nonzero"));
            open = true;
        }
    }

    let Some((num_variables, declared)) = header else {
        return Err(DimacsError::MissingHeader);
    };
    if open {
        return Err(DimacsError::MissingTerminator);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    let formula = Formula::new(num_variables, clauses).expect("variables checked while parsing");
    Ok(formula.with_names(names))
}

fn parse_header(line: &str) -> Option<(u32, usize)> {
    let mut words = line.split_whitespace();
    if words.next()? != "p" || words.next()? != "cnf" {
        return None;
    }
    let vars = words.next()?.parse().ok()?;
    let count = words.next()?.parse().ok()?;
    if words.next().is_some() {
        return None;
    }
    Some((vars, count))
}

/// Writes a formula as DIMACS. Name comments come first, then the header,
/// then one clause per line.
pub fn serialize_dimacs(formula: &Formula) -> String {
    serialize_dimacs_with_comments(formula, &[])
}

/// Like [`serialize_dimacs`], with free-form comment lines placed before the
/// name table. Comments are not part of the formula and do not survive parsing.
pub fn serialize_dimacs_with_comments(formula: &Formula, comments: &[String]) -> String {
    let mut out = String::new();
    for comment in comments {
        for line in comment.lines() {
            if line.is_empty() {
                out.push_str("c\n");
            } else {
                let _ = writeln!(out, "c {line}");
            }
        }
    }
    for (var, name) in formula.names() {
        let _ = writeln!(out, "c name {var} {name}");
    }
    let _ = writeln!(
        out,
        "p cnf {} {}",
        formula.num_variables(),
        formula.clauses().len()
    );
    for clause in formula.clauses() {
        for lit in clause.iter() {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}
