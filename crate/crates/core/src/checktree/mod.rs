//! Checking trees and the layer-by-layer contradiction-pair procedure.
//!
//! A checking tree is just a sequence of layers, one per clause, each holding
//! the clause's literals ("units") by position. A standard checking tree pairs
//! the layers with the set of literal pairs known to be contradictory. Two
//! engines can grow that set when a layer is added: the exact oracle, and the
//! reconstructed procedure built on [`algorithm1`].

mod algorithm1;
mod destroy;

use crate::cnf::{Clause, Formula, Literal};
use crate::oracle::{
    candidate_pairs, indirect_pairs_oracle, OracleError, PairSet, DEFAULT_PATH_BOUND,
};

pub use algorithm1::{
    algorithm1, new_pair_check, step3_intersect, useful_units, Algorithm1Outcome, Algorithm1Trace,
    Deletion, Round, Step3Mode, UnitRef, UsefulUnits, Verdict, VerdictReason,
};
pub use destroy::{destroy, DestroyedCheckingTree};

/// The image of one clause: its units in clause order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    units: Vec<Literal>,
    source: usize,
}

impl Layer {
    pub fn new(units: Vec<Literal>, source: usize) -> Self {
        Layer { units, source }
    }

    pub fn from_clause(clause: &Clause, source: usize) -> Self {
        Layer::new(clause.literals().to_vec(), source)
    }

    pub fn units(&self) -> &[Literal] {
        &self.units
    }

    pub fn width(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Index of the clause this layer was built from.
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.units.contains(&lit)
    }

    pub fn to_clause(&self) -> Clause {
        Clause::new(self.units.clone()).expect("layers never exceed three units")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CheckingTree {
    layers: Vec<Layer>,
}

impl CheckingTree {
    pub fn new(layers: Vec<Layer>) -> Self {
        CheckingTree { layers }
    }

    pub fn from_clauses<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> Self {
        let layers = clauses
            .into_iter()
            .enumerate()
            .map(|(i, c)| Layer::from_clause(c, i))
            .collect();
        CheckingTree { layers }
    }

    pub fn from_formula(formula: &Formula) -> Self {
        CheckingTree::from_clauses(formula.clauses())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn push(&mut self, layer: Layer) {
        self.layers.push(layer);
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.layers.iter().flat_map(|l| l.units().iter().copied())
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals().any(|l| l == lit)
    }

    pub fn to_clauses(&self) -> Vec<Clause> {
        self.layers.iter().map(Layer::to_clause).collect()
    }

    pub fn max_variable(&self) -> u32 {
        self.literals().map(Literal::var).max().unwrap_or(0)
    }
}

/// A checking tree together with its contradiction pairs, direct and indirect.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StandardCheckingTree {
    pub tree: CheckingTree,
    pub pairs: PairSet,
}

impl StandardCheckingTree {
    /// The tree with its exact pair set: direct pairs plus the oracle's
    /// indirect pairs, from a single enumeration.
    pub fn exact(tree: CheckingTree, path_bound: u64) -> Result<Self, OracleError> {
        let pairs = direct_pairs(&tree).union(&indirect_pairs_oracle(&tree, path_bound)?);
        Ok(StandardCheckingTree { tree, pairs })
    }
}

/// `{a, !a}` for every literal `a` whose negation also occurs in the tree.
pub fn direct_pairs(tree: &CheckingTree) -> PairSet {
    let mut out = PairSet::new();
    for lit in tree.literals() {
        if lit.is_positive() && tree.contains(!lit) {
            out.insert(lit, !lit);
        }
    }
    out
}

/// How newly added layers obtain their indirect contradiction pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairEngine {
    /// Exhaustive long-path enumeration.
    Oracle { path_bound: u64 },
    /// [`new_pair_check`] over every candidate pair.
    Reconstructed(Step3Mode),
}

impl PairEngine {
    pub fn oracle() -> Self {
        PairEngine::Oracle {
            path_bound: DEFAULT_PATH_BOUND,
        }
    }
}

/// Builds the standard checking tree of `formula` one clause at a time.
pub fn build_standard_tree(
    formula: &Formula,
    engine: PairEngine,
) -> Result<StandardCheckingTree, OracleError> {
    build_from_clauses(formula.clauses(), engine)
}

pub fn build_from_clauses(
    clauses: &[Clause],
    engine: PairEngine,
) -> Result<StandardCheckingTree, OracleError> {
    let mut tree = StandardCheckingTree::default();
    for clause in clauses {
        tree = add_layer(&tree, clause, engine)?;
    }
    Ok(tree)
}

/// Appends `clause` as a new layer and adds the pairs the engine derives.
/// Existing pairs are kept.
pub fn add_layer(
    base: &StandardCheckingTree,
    clause: &Clause,
    engine: PairEngine,
) -> Result<StandardCheckingTree, OracleError> {
    let mut tree = base.tree.clone();
    tree.push(Layer::from_clause(clause, tree.len()));
    let mut pairs = base.pairs.union(&direct_pairs(&tree));
    match engine {
        PairEngine::Oracle { path_bound } => {
            pairs.extend(&indirect_pairs_oracle(&tree, path_bound)?);
        }
        PairEngine::Reconstructed(mode) => {
            let found: Vec<_> = candidate_pairs(&tree)
                .iter()
                .filter(|&(x, y)| !pairs.contains(x, y))
                .filter(|&(x, y)| new_pair_check(base, x, y, clause, mode))
                .collect();
            for (x, y) in found {
                pairs.insert(x, y);
            }
        }
    }
    Ok(StandardCheckingTree { tree, pairs })
}

/// The shortcut unsatisfiability test: some layer is empty, or some two
/// layers have every cross pair of units in the pair set.
pub fn is_unsatisfiable_simplified(t: &StandardCheckingTree) -> bool {
    let layers = t.tree.layers();
    if layers.iter().any(Layer::is_empty) {
        return true;
    }
    layers.iter().enumerate().any(|(i, first)| {
        layers[i + 1..].iter().any(|second| {
            first
                .units()
                .iter()
                .all(|&x| second.units().iter().all(|&y| t.pairs.contains(x, y)))
        })
    })
}

/// Whole-formula verdict of the reconstructed procedure: build the tree with
/// the reconstructed engine, then apply [`is_unsatisfiable_simplified`].
pub fn reconstructed_verdict(formula: &Formula, mode: Step3Mode) -> Verdict {
    let tree = build_standard_tree(formula, PairEngine::Reconstructed(mode))
        .expect("the reconstructed engine never enumerates paths");
    if is_unsatisfiable_simplified(&tree) {
        Verdict::Unsatisfiable
    } else {
        Verdict::Satisfiable
    }
}
