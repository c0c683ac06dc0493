//! Variables, literals, clauses and 3-CNF formulas.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Maximum number of literals a clause (and therefore a layer) may hold.
pub const MAX_CLAUSE_WIDTH: usize = 3;

/// A literal: a variable index (starting at 1) together with a polarity.
///
/// Ordering is lexicographic by `(variable, polarity)`, so `-x` sorts
/// directly before `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    /// Panics if `var` is zero.
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, false)
    }

    /// Converts a signed DIMACS integer. Returns `None` for zero.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal::new(value.unsigned_abs() as u32, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Dense code `2 * (var - 1) + polarity`, used to index per-literal tables.
    pub fn code(self) -> usize {
        2 * (self.var as usize - 1) + self.positive as usize
    }

    pub fn from_code(code: usize) -> Self {
        Literal::new((code / 2) as u32 + 1, code % 2 == 1)
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause has {0} literals; at most 3 are allowed")]
    ClauseTooWide(usize),
    #[error("literal {literal} refers to a variable outside 1..={num_variables}")]
    VariableOutOfRange { literal: i64, num_variables: u32 },
    #[error("assignment has no value for variable {0}")]
    MissingVariable(u32),
}

/// An ordered disjunction of at most three literals. Duplicates are kept:
/// positions matter.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, CnfError> {
        if literals.len() > MAX_CLAUSE_WIDTH {
            return Err(CnfError::ClauseTooWide(literals.len()));
        }
        Ok(Clause(literals))
    }

    /// Builds a clause from signed DIMACS integers. Panics on zero or on
    /// more than three literals; intended for literals in code and tests.
    pub fn from_dimacs(values: &[i64]) -> Self {
        let lits = values
            .iter()
            .map(|&v| Literal::from_dimacs(v).expect("zero is not a literal"))
            .collect();
        Clause::new(lits).expect("clause too wide")
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Literal> + '_ {
        self.0.iter().copied()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> Result<bool, CnfError> {
        for lit in self.iter() {
            if assignment.value_of(lit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Optional human-readable names for variables, carried through DIMACS as
/// `c name <index> <string>` comment lines.
pub type NameTable = BTreeMap<u32, String>;

/// A 3-CNF formula: ordered clauses over variables `1..=num_variables`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula {
    num_variables: u32,
    clauses: Vec<Clause>,
    names: NameTable,
}

impl Formula {
    pub fn new(num_variables: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for clause in &clauses {
            for lit in clause.iter() {
                if lit.var() > num_variables {
                    return Err(CnfError::VariableOutOfRange {
                        literal: lit.to_dimacs(),
                        num_variables,
                    });
                }
            }
        }
        Ok(Formula {
            num_variables,
            clauses,
            names: NameTable::new(),
        })
    }

    /// Builds a formula whose variable count is the largest index mentioned.
    pub fn from_clauses(clauses: Vec<Clause>) -> Self {
        let num_variables = clauses
            .iter()
            .flat_map(|c| c.iter())
            .map(Literal::var)
            .max()
            .unwrap_or(0);
        Formula {
            num_variables,
            clauses,
            names: NameTable::new(),
        }
    }

    pub fn with_names(mut self, names: NameTable) -> Self {
        self.names = names;
        self
    }

    pub fn num_variables(&self) -> u32 {
        self.num_variables
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn names(&self) -> &NameTable {
        &self.names
    }

    pub fn variable_named(&self, name: &str) -> Option<u32> {
        self.names
            .iter()
            .find(|(_, n)| n.as_str() == name)
            .map(|(&v, _)| v)
    }

    /// Renders a literal with its variable name when one is known.
    pub fn display_literal(&self, lit: Literal) -> String {
        display_literal(&self.names, lit)
    }

    /// True iff every clause has a literal made true by `assignment`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, CnfError> {
        evaluate_clauses(&self.clauses, assignment)
    }
}

pub fn display_literal(names: &NameTable, lit: Literal) -> String {
    let sign = if lit.is_positive() { "" } else { "~" };
    match names.get(&lit.var()) {
        Some(name) => format!("{sign}{name}"),
        None => format!("{sign}x{}", lit.var()),
    }
}

/// Evaluates a clause list; an empty list is true, an empty clause is false.
pub fn evaluate_clauses(clauses: &[Clause], assignment: &Assignment) -> Result<bool, CnfError> {
    let mut all = true;
    // Check every clause so a non-total assignment is always reported.
    for clause in clauses {
        for lit in clause.iter() {
            assignment.value(lit.var())?;
        }
        if all && !clause.is_satisfied_by(assignment)? {
            all = false;
        }
    }
    Ok(all)
}

/// A total assignment over variables `1..=len`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_false(num_variables: u32) -> Self {
        Assignment {
            values: vec![false; num_variables as usize],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: u32) -> Result<bool, CnfError> {
        if var == 0 {
            return Err(CnfError::MissingVariable(var));
        }
        self.values
            .get(var as usize - 1)
            .copied()
            .ok_or(CnfError::MissingVariable(var))
    }

    pub fn value_of(&self, lit: Literal) -> Result<bool, CnfError> {
        Ok(self.value(lit.var())? == lit.is_positive())
    }

    pub fn set(&mut self, var: u32, value: bool) {
        let idx = var as usize - 1;
        if idx >= self.values.len() {
            self.values.resize(idx + 1, false);
        }
        self.values[idx] = value;
    }

    /// The assignment as signed DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Literal::new(i as u32 + 1, v).to_dimacs())
            .collect()
    }

    pub fn true_literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Literal::new(i as u32 + 1, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_flips_polarity() {
        assert_eq!(Literal::pos(3).negate(), Literal::neg(3));
        assert_eq!(Literal::neg(3).negate(), Literal::pos(3));
        assert_eq!(!!Literal::pos(7), Literal::pos(7));
    }

    #[test]
    fn literal_order_is_variable_then_polarity() {
        let mut lits = vec![
            Literal::pos(2),
            Literal::neg(1),
            Literal::pos(1),
            Literal::neg(2),
        ];
        lits.sort();
        assert_eq!(
            lits,
            vec![
                Literal::neg(1),
                Literal::pos(1),
                Literal::neg(2),
                Literal::pos(2)
            ]
        );
    }

    #[test]
    fn code_round_trips() {
        for code in 0..20 {
            assert_eq!(Literal::from_code(code).code(), code);
        }
    }

    #[test]
    fn evaluates_example_formula() {
        // (a | b | c) & (d | ~b) with a, b, c, d = 1..4
        let f = Formula::from_clauses(vec![
            Clause::from_dimacs(&[1, 2, 3]),
            Clause::from_dimacs(&[4, -2]),
        ]);
        let a = Assignment::new(vec![true, false, false, true]);
        assert_eq!(f.evaluate(&a), Ok(true));
        let a = Assignment::new(vec![false, true, false, false]);
        assert_eq!(f.evaluate(&a), Ok(false));
    }

    #[test]
    fn direct_contradiction_is_false() {
        let f = Formula::from_clauses(vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]);
        for v in [false, true] {
            assert_eq!(f.evaluate(&Assignment::new(vec![v])), Ok(false));
        }
    }

    #[test]
    fn empty_formula_is_true_and_empty_clause_is_false() {
        assert_eq!(
            Formula::default().evaluate(&Assignment::default()),
            Ok(true)
        );
        let f = Formula::from_clauses(vec![Clause::default()]);
        assert_eq!(f.evaluate(&Assignment::default()), Ok(false));
    }

    #[test]
    fn missing_variable_is_an_error() {
        let f = Formula::from_clauses(vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[2])]);
        let err = f.evaluate(&Assignment::new(vec![false])).unwrap_err();
        assert_eq!(err, CnfError::MissingVariable(2));
    }

    #[test]
    fn rejects_wide_clauses_and_out_of_range_variables() {
        let lits = (1..=4).map(Literal::pos).collect();
        assert_eq!(Clause::new(lits), Err(CnfError::ClauseTooWide(4)));
        let err = Formula::new(2, vec![Clause::from_dimacs(&[1, 2, 3])]).unwrap_err();
        assert!(matches!(
            err,
            CnfError::VariableOutOfRange { literal: 3, .. }
        ));
    }

    #[test]
    fn literal_display_uses_names() {
        let mut names = NameTable::new();
        names.insert(1, "alpha".to_string());
        assert_eq!(display_literal(&names, Literal::neg(1)), "~alpha");
        assert_eq!(display_literal(&names, Literal::pos(2)), "x2");
    }
}
