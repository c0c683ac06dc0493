use std::collections::BTreeSet;

use crate::cnf::{Clause, Literal};
use crate::oracle::PairSet;

use super::{Layer, StandardCheckingTree};

/// A standard checking tree with every occurrence of `!s` removed for each
/// forced literal `s`.
///
/// Layer indices are those of the base tree; emptied layers stay in place
/// with width zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestroyedCheckingTree {
    pub base: StandardCheckingTree,
    pub forced: BTreeSet<Literal>,
    pub layers: Vec<Layer>,
    /// Layers of width 1 or 2 after removal.
    pub ell2: Vec<usize>,
    /// Layers of width 3 after removal.
    pub ell3: Vec<usize>,
    /// Layers left with no units.
    pub emptied: Vec<usize>,
}

/// Removes every occurrence of `!s` for each `s` in `forced`.
///
/// The contradiction pairs of `tree` are carried over unchanged.
pub fn destroy(tree: &StandardCheckingTree, forced: &BTreeSet<Literal>) -> DestroyedCheckingTree {
    let layers: Vec<Layer> = tree
        .tree
        .layers()
        .iter()
        .map(|layer| {
            let units = layer
                .units()
                .iter()
                .copied()
                .filter(|&u| !forced.contains(&!u))
                .collect();
            Layer::new(units, layer.source())
        })
        .collect();

    let mut ell2 = Vec::new();
    let mut ell3 = Vec::new();
    let mut emptied = Vec::new();
    for (i, layer) in layers.iter().enumerate() {
        match layer.width() {
            0 => emptied.push(i),
            1 | 2 => ell2.push(i),
            _ => ell3.push(i),
        }
    }

    DestroyedCheckingTree {
        base: tree.clone(),
        forced: forced.clone(),
        layers,
        ell2,
        ell3,
        emptied,
    }
}

impl DestroyedCheckingTree {
    pub fn pairs(&self) -> &PairSet {
        &self.base.pairs
    }

    pub fn ell2_clauses(&self) -> Vec<Clause> {
        self.ell2
            .iter()
            .map(|&i| self.layers[i].to_clause())
            .collect()
    }

    /// The surviving layers as clauses.
    pub fn clauses(&self) -> Vec<Clause> {
        self.layers.iter().map(Layer::to_clause).collect()
    }

    /// Surviving layers plus a unit clause per forced literal: satisfiable
    /// iff the base tree has a satisfying assignment making every forced
    /// literal true.
    pub fn residual_clauses(&self) -> Vec<Clause> {
        let mut out = self.clauses();
        out.extend(
            self.forced
                .iter()
                .map(|&s| Clause::new(vec![s]).expect("unit clause")),
        );
        out
    }

    pub fn max_variable(&self) -> u32 {
        let in_layers = self.base.tree.max_variable();
        let in_forced = self.forced.iter().map(|l| l.var()).max().unwrap_or(0);
        in_layers.max(in_forced)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checktree::CheckingTree;

    fn standard(cs: &[&[i64]]) -> StandardCheckingTree {
        let clauses: Vec<_> = cs.iter().map(|c| Clause::from_dimacs(c)).collect();
        StandardCheckingTree {
            tree: CheckingTree::from_clauses(&clauses),
            pairs: PairSet::new(),
        }
    }

    fn forced(lits: &[i64]) -> BTreeSet<Literal> {
        lits.iter()
            .map(|&v| Literal::from_dimacs(v).unwrap())
            .collect()
    }

    #[test]
    fn empty_forced_set_is_identity() {
        let t = standard(&[&[1, 2, 3], &[4, -2]]);
        let d = destroy(&t, &BTreeSet::new());
        assert_eq!(d.layers, t.tree.layers());
        assert_eq!(d.ell2, vec![1]);
        assert_eq!(d.ell3, vec![0]);
    }

    #[test]
    fn removes_negations_of_forced_literals() {
        // s | t | ~c, (alpha | p | q), ~s | ~t | r ; forcing c and alpha
        let (s, t, c, r, alpha, p, q) = (1, 2, 3, 4, 5, 6, 7);
        let tree = standard(&[&[s, t, -c], &[alpha, p, q], &[-s, -t, r]]);
        let d = destroy(&tree, &forced(&[c, alpha]));
        assert_eq!(d.layers[0].units(), &[Literal::pos(1), Literal::pos(2)]);
        assert_eq!(d.layers[2].units(), tree.tree.layers()[2].units());
        assert_eq!(d.ell2, vec![0]);
        assert_eq!(d.ell3, vec![1, 2]);
        assert_eq!(d.pairs(), &tree.pairs);
    }

    #[test]
    fn layer_can_be_emptied() {
        let d = destroy(&standard(&[&[1, 2, 3]]), &forced(&[-1, -2, -3]));
        assert_eq!(d.emptied, vec![0]);
        assert!(d.ell2.is_empty() && d.ell3.is_empty());
    }

    #[test]
    fn residual_adds_forced_units() {
        let d = destroy(&standard(&[&[1, 2]]), &forced(&[-2]));
        assert_eq!(
            d.residual_clauses(),
            vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-2])]
        );
    }
}
