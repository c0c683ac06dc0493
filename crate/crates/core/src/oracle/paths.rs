//! Long-path enumeration and the exhaustive contradiction-pair oracle.

use crate::checktree::CheckingTree;
use crate::cnf::Literal;

use super::{OracleError, PairSet};

/// Default cap on the product of layer widths accepted by the enumerator.
pub const DEFAULT_PATH_BOUND: u64 = 1 << 24;

/// One chosen unit: layer index, position within the layer (0-based) and
/// the literal found there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pick {
    pub layer: usize,
    pub position: usize,
    pub literal: Literal,
}

/// A choice of one unit per layer such that no two chosen literals are
/// negations of each other.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LongPath {
    picks: Vec<Pick>,
}

impl LongPath {
    pub fn picks(&self) -> &[Pick] {
        &self.picks
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.picks.iter().map(|p| p.literal)
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals().any(|l| l == lit)
    }
}

/// Rejects trees whose layer-width product exceeds `bound`.
pub fn check_path_bound(tree: &CheckingTree, bound: u64) -> Result<(), OracleError> {
    let mut product: u64 = 1;
    for layer in tree.layers() {
        let width = layer.width() as u64;
        if width == 0 {
            return Ok(());
        }
        product = product.saturating_mul(width);
        if product > bound {
            return Err(OracleError::PathBoundExceeded { bound });
        }
    }
    Ok(())
}

/// Streams every long path of `tree` in lexicographic pick order.
pub fn enumerate_long_paths(tree: &CheckingTree, bound: u64) -> Result<LongPaths<'_>, OracleError> {
    check_path_bound(tree, bound)?;
    let codes = tree
        .layers()
        .iter()
        .flat_map(|l| l.units())
        .map(|l| l.code() + 1)
        .max()
        .unwrap_or(0);
    Ok(LongPaths {
        tree,
        chosen: Vec::with_capacity(tree.len()),
        counts: vec![0; codes + 1],
        started: false,
        done: false,
    })
}

/// Iterator over the long paths of a checking tree. Single consumer.
pub struct LongPaths<'a> {
    tree: &'a CheckingTree,
    chosen: Vec<usize>,
    counts: Vec<u32>,
    started: bool,
    done: bool,
}

impl LongPaths<'_> {
    fn literal_at(&self, layer: usize, position: usize) -> Literal {
        self.tree.layers()[layer].units()[position]
    }

    fn pop(&mut self) -> Option<usize> {
        let position = self.chosen.pop()?;
        let lit = self.literal_at(self.chosen.len(), position);
        self.counts[lit.code()] -= 1;
        Some(position)
    }

    /// Depth-first extension starting at position `from` of the next layer.
    fn search(&mut self, mut from: usize) -> bool {
        loop {
            let depth = self.chosen.len();
            if depth == self.tree.len() {
                return true;
            }
            let units = self.tree.layers()[depth].units();
            let next = (from..units.len()).find(|&p| self.counts[(!units[p]).code()] == 0);
            match next {
                Some(position) => {
                    self.counts[units[position].code()] += 1;
                    self.chosen.push(position);
                    from = 0;
                }
                None => match self.pop() {
                    Some(prev) => from = prev + 1,
                    None => return false,
                },
            }
        }
    }

    fn current(&self) -> LongPath {
        let picks = self
            .chosen
            .iter()
            .enumerate()
            .map(|(layer, &position)| Pick {
                layer,
                position,
                literal: self.literal_at(layer, position),
            })
            .collect();
        LongPath { picks }
    }
}

impl Iterator for LongPaths<'_> {
    type Item = LongPath;

    fn next(&mut self) -> Option<LongPath> {
        if self.done {
            return None;
        }
        let found = if !self.started {
            self.started = true;
            self.search(0)
        } else {
            match self.pop() {
                Some(prev) => self.search(prev + 1),
                None => false,
            }
        };
        if found {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// Unordered literal pairs `{x, y}` with `x` and `y` occurring in distinct
/// layers, `x != y` and `x != !y`. These are the pairs whose contradiction
/// status the checking-tree procedure tracks.
pub fn candidate_pairs(tree: &CheckingTree) -> PairSet {
    let mut out = PairSet::new();
    let layers = tree.layers();
    for (i, first) in layers.iter().enumerate() {
        for second in &layers[i + 1..] {
            for &x in first.units() {
                for &y in second.units() {
                    if x != y && x != !y {
                        out.insert(x, y);
                    }
                }
            }
        }
    }
    out
}

/// The indirect contradiction pairs of `tree`: candidate pairs that no long
/// path contains together. With no long path every candidate qualifies.
pub fn indirect_pairs_oracle(tree: &CheckingTree, bound: u64) -> Result<PairSet, OracleError> {
    let candidates = candidate_pairs(tree);
    if candidates.is_empty() {
        return Ok(candidates);
    }
    let width = tree
        .layers()
        .iter()
        .flat_map(|l| l.units())
        .map(|l| l.code() + 1)
        .max()
        .unwrap_or(0);
    let mut together = vec![false; width * width];
    let mut lits = Vec::new();
    for path in enumerate_long_paths(tree, bound)? {
        lits.clear();
        lits.extend(path.literals().map(Literal::code));
        lits.sort_unstable();
        lits.dedup();
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                together[a * width + b] = true;
            }
        }
    }
    Ok(candidates
        .iter()
        .filter(|&(a, b)| !together[a.code() * width + b.code()])
        .collect())
}

/// True iff the tree has at least one long path.
pub fn has_long_path(tree: &CheckingTree, bound: u64) -> Result<bool, OracleError> {
    Ok(enumerate_long_paths(tree, bound)?.next().is_some())
}
