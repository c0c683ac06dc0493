//! Exact ground-truth deciders used to judge the checking-tree procedure.
//!
//! Everything here is exhaustive or textbook-polynomial and intended for
//! desk-scale instances only.

mod paths;
mod twosat;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, Formula, Literal};

pub use paths::{
    candidate_pairs, check_path_bound, enumerate_long_paths, has_long_path, indirect_pairs_oracle,
    LongPath, LongPaths, Pick, DEFAULT_PATH_BOUND,
};
pub use twosat::solve_2sat;

/// Default cap on the variable count accepted by [`brute_force_sat`].
pub const DEFAULT_VARIABLE_BOUND: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("formula has {found} variables; exhaustive search is capped at {bound}")]
    VariableBoundExceeded { found: u32, bound: u32 },
    #[error("layer-width product exceeds the long-path bound {bound}")]
    PathBoundExceeded { bound: u64 },
    #[error("2-SAT input contains a clause of width {0}")]
    ClauseTooWide(usize),
}

/// Limits for the exhaustive oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_variables: u32,
    pub max_path_product: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_variables: DEFAULT_VARIABLE_BOUND,
            max_path_product: DEFAULT_PATH_BOUND,
        }
    }
}

/// Exhaustive satisfiability search over all `2^n` assignments.
///
/// Returns the lexicographically first satisfying assignment, reading
/// variable 1 as the most significant position and `false < true`.
pub fn brute_force_sat(formula: &Formula, bound: u32) -> Result<Option<Assignment>, OracleError> {
    let n = formula.num_variables();
    if n > bound {
        return Err(OracleError::VariableBoundExceeded { found: n, bound });
    }
    brute_force_clauses(formula.clauses(), n)
}

/// [`brute_force_sat`] over a bare clause list with variables `1..=num_variables`.
pub fn brute_force_clauses(
    clauses: &[Clause],
    num_variables: u32,
) -> Result<Option<Assignment>, OracleError> {
    // A clause is checked once its highest variable is assigned.
    let mut closing: Vec<Vec<&Clause>> = vec![Vec::new(); num_variables as usize + 1];
    for clause in clauses {
        let last = clause.iter().map(Literal::var).max().unwrap_or(0);
        if last > num_variables {
            return Err(OracleError::VariableBoundExceeded {
                found: last,
                bound: num_variables,
            });
        }
        closing[last as usize].push(clause);
    }
    if closing[0].iter().any(|c| c.is_empty()) {
        return Ok(None);
    }

    let mut values = vec![false; num_variables as usize];
    let satisfied = |values: &[bool], clause: &Clause| {
        clause
            .iter()
            .any(|l| values[l.var() as usize - 1] == l.is_positive())
    };

    // Iterative DFS; `tried_true[i]` marks that variable i+1 is on its second branch.
    let mut tried_true = vec![false; num_variables as usize];
    let mut depth = 0usize;
    loop {
        if depth == num_variables as usize {
            return Ok(Some(Assignment::new(values)));
        }
        let var = depth + 1;
        let ok = closing[var].iter().all(|c| satisfied(&values, c));
        if ok {
            depth += 1;
            if depth < num_variables as usize {
                values[depth] = false;
                tried_true[depth] = false;
            }
            continue;
        }
        // Backtrack to the deepest variable still on its false branch.
        loop {
            if !tried_true[depth] {
                tried_true[depth] = true;
                values[depth] = true;
                break;
            }
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}

/// Unordered literal pairs, stored as `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSet {
    pairs: BTreeSet<(Literal, Literal)>,
}

impl PairSet {
    pub fn new() -> Self {
        PairSet::default()
    }

    fn key(a: Literal, b: Literal) -> (Literal, Literal) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Inserts `{a, b}`. Reflexive pairs are ignored; returns whether the set changed.
    pub fn insert(&mut self, a: Literal, b: Literal) -> bool {
        if a == b {
            return false;
        }
        self.pairs.insert(Self::key(a, b))
    }

    pub fn contains(&self, a: Literal, b: Literal) -> bool {
        a != b && self.pairs.contains(&Self::key(a, b))
    }

    pub fn extend(&mut self, other: &PairSet) {
        self.pairs.extend(other.pairs.iter().copied());
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn difference(&self, other: &PairSet) -> PairSet {
        self.pairs.difference(&other.pairs).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Literal, Literal)> + '_ {
        self.pairs.iter().copied()
    }
}

impl FromIterator<(Literal, Literal)> for PairSet {
    fn from_iter<I: IntoIterator<Item = (Literal, Literal)>>(iter: I) -> Self {
        let mut out = PairSet::new();
        for (a, b) in iter {
            out.insert(a, b);
        }
        out
    }
}
