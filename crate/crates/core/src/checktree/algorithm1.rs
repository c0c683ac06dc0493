//! The repair-and-decide procedure applied to destroyed checking trees.
//!
//! Pipeline:
//!
//! 1. an emptied layer means unsatisfiable;
//! 2. the short layers (`ell2`, width 1 or 2) must be satisfiable as 2-CNF;
//! 3. every unit of a width-3 layer (`ell3`) gets its useful units: the
//!    `ell2` literals that can be true together with it in a model of `ell2`;
//! 4. step 3: units in distinct `ell3` layers that are not a contradiction
//!    pair (nor negations of each other) replace both useful sets by their
//!    intersection;
//! 5. a unit dies when some `ell2` layer contributes nothing to its useful
//!    set; steps 4 and 5 repeat until nothing dies;
//! 6. an `ell3` layer with no surviving unit means unsatisfiable.
//!
//! Step 4 is unsound: it can empty useful sets on satisfiable inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cnf::{Clause, Literal};
use crate::oracle::{solve_2sat, PairSet};

use super::{destroy, DestroyedCheckingTree, StandardCheckingTree};

/// How the step-3 intersection is applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Step3Mode {
    /// Repeat full passes until no set changes.
    #[default]
    Fixpoint,
    /// One pass in canonical unit order.
    SinglePass,
    /// Skip the intersection entirely.
    Disabled,
}

impl fmt::Display for Step3Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step3Mode::Fixpoint => "fixpoint",
            Step3Mode::SinglePass => "single",
            Step3Mode::Disabled => "off",
        })
    }
}

impl std::str::FromStr for Step3Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixpoint" => Ok(Step3Mode::Fixpoint),
            "single" | "single-pass" => Ok(Step3Mode::SinglePass),
            "off" | "disabled" => Ok(Step3Mode::Disabled),
            other => Err(format!("unknown step-3 mode `{other}`")),
        }
    }
}

/// Position of a unit: layer index and 0-based position in the layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRef {
    pub layer: usize,
    pub position: usize,
}

/// Useful-unit sets of the surviving `ell3` units.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UsefulUnits {
    pub sets: BTreeMap<UnitRef, BTreeSet<Literal>>,
}

impl UsefulUnits {
    pub fn get(&self, unit: UnitRef) -> Option<&BTreeSet<Literal>> {
        self.sets.get(&unit)
    }

    /// Total number of useful-unit memberships.
    pub fn size(&self) -> usize {
        self.sets.values().map(BTreeSet::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfiable => "SAT",
            Verdict::Unsatisfiable => "UNSAT",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictReason {
    EmptiedLayer(usize),
    ShortLayersUnsatisfiable,
    LayerExhausted(usize),
    Consistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub unit: UnitRef,
    pub literal: Literal,
    /// The `ell2` layer that contributed no useful unit.
    pub starved_by: usize,
}

/// One round of step 3 followed by deletion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Round {
    /// Useful sets after each step-3 pass.
    pub step3_passes: Vec<UsefulUnits>,
    pub deleted: Vec<Deletion>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Algorithm1Trace {
    pub emptied_layers: Vec<usize>,
    pub ell2_satisfiable: Option<bool>,
    /// Useful sets before step 3.
    pub initial: UsefulUnits,
    pub rounds: Vec<Round>,
    /// Useful sets of the units alive at the end.
    pub survivors: UsefulUnits,
}

impl Algorithm1Trace {
    pub fn deleted(&self) -> impl Iterator<Item = &Deletion> + '_ {
        self.rounds.iter().flat_map(|r| r.deleted.iter())
    }

    /// Useful sets right after the first round's step 3.
    pub fn after_first_step3(&self) -> Option<&UsefulUnits> {
        self.rounds
            .first()
            .map(|r| r.step3_passes.last().unwrap_or(&self.initial))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm1Outcome {
    pub verdict: Verdict,
    pub reason: VerdictReason,
    /// Base pairs plus every pair involving a literal whose units all died.
    pub pairs: PairSet,
    pub trace: Algorithm1Trace,
}

/// Useful units of the `ell3` unit at `unit`: `ell2` literals `u` such that
/// `ell2 & x & u` is satisfiable, where `x` is the unit's literal.
pub fn useful_units(d: &DestroyedCheckingTree, unit: UnitRef) -> BTreeSet<Literal> {
    let x = d.layers[unit.layer].units()[unit.position];
    let base = d.ell2_clauses();
    useful_units_with(&base, &ell2_literals(d), x)
}

fn ell2_literals(d: &DestroyedCheckingTree) -> BTreeSet<Literal> {
    d.ell2
        .iter()
        .flat_map(|&i| d.layers[i].units().iter().copied())
        .collect()
}

fn useful_units_with(
    ell2: &[Clause],
    candidates: &BTreeSet<Literal>,
    x: Literal,
) -> BTreeSet<Literal> {
    let mut query = ell2.to_vec();
    query.push(unit_clause(x));
    candidates
        .iter()
        .copied()
        .filter(|&u| {
            query.push(unit_clause(u));
            let sat = solve_2sat(&query)
                .expect("ell2 clauses have width at most two")
                .is_some();
            query.pop();
            sat
        })
        .collect()
}

fn unit_clause(lit: Literal) -> Clause {
    Clause::new(vec![lit]).expect("unit clause")
}

fn all_useful_units(d: &DestroyedCheckingTree) -> UsefulUnits {
    let ell2 = d.ell2_clauses();
    let candidates = ell2_literals(d);
    let mut sets = BTreeMap::new();
    for &layer in &d.ell3 {
        for (position, &x) in d.layers[layer].units().iter().enumerate() {
            sets.insert(
                UnitRef { layer, position },
                useful_units_with(&ell2, &candidates, x),
            );
        }
    }
    UsefulUnits { sets }
}

fn literal_at(d: &DestroyedCheckingTree, unit: UnitRef) -> Literal {
    d.layers[unit.layer].units()[unit.position]
}

/// Applies the step-3 intersection rule; returns the sets after each pass.
///
/// Only units present in `units` take part. The final entry is the result;
/// an empty vector means `mode` is [`Step3Mode::Disabled`].
pub fn step3_intersect(
    d: &DestroyedCheckingTree,
    units: &UsefulUnits,
    pairs: &PairSet,
    mode: Step3Mode,
) -> Vec<UsefulUnits> {
    if mode == Step3Mode::Disabled {
        return Vec::new();
    }
    let keys: Vec<UnitRef> = units.sets.keys().copied().collect();
    let mut eligible = Vec::new();
    for (i, &x) in keys.iter().enumerate() {
        for &y in &keys[i + 1..] {
            let (lx, ly) = (literal_at(d, x), literal_at(d, y));
            if x.layer != y.layer && !pairs.contains(lx, ly) && lx != !ly {
                eligible.push((x, y));
            }
        }
    }

    let mut current = units.clone();
    let mut passes = Vec::new();
    loop {
        let mut changed = false;
        for &(x, y) in &eligible {
            let ux = &current.sets[&x];
            let uy = &current.sets[&y];
            if ux == uy {
                continue;
            }
            let both: BTreeSet<Literal> = ux.intersection(uy).copied().collect();
            changed |= both.len() != ux.len() || both.len() != uy.len();
            current.sets.insert(x, both.clone());
            current.sets.insert(y, both);
        }
        passes.push(current.clone());
        if !changed || mode == Step3Mode::SinglePass {
            break;
        }
    }
    passes
}

/// Runs the procedure on a destroyed checking tree.
pub fn algorithm1(d: &DestroyedCheckingTree, mode: Step3Mode) -> Algorithm1Outcome {
    let mut trace = Algorithm1Trace {
        emptied_layers: d.emptied.clone(),
        ..Algorithm1Trace::default()
    };
    let mut pairs = d.pairs().clone();

    if let Some(&layer) = d.emptied.first() {
        return Algorithm1Outcome {
            verdict: Verdict::Unsatisfiable,
            reason: VerdictReason::EmptiedLayer(layer),
            pairs,
            trace,
        };
    }

    let ell2_sat = solve_2sat(&d.ell2_clauses())
        .expect("ell2 clauses have width at most two")
        .is_some();
    trace.ell2_satisfiable = Some(ell2_sat);
    if !ell2_sat {
        return Algorithm1Outcome {
            verdict: Verdict::Unsatisfiable,
            reason: VerdictReason::ShortLayersUnsatisfiable,
            pairs,
            trace,
        };
    }

    let mut current = all_useful_units(d);
    trace.initial = current.clone();
    let mut dead: BTreeSet<UnitRef> = BTreeSet::new();

    loop {
        let step3_passes = step3_intersect(d, &current, &pairs, mode);
        if let Some(last) = step3_passes.last() {
            current = last.clone();
        }

        let mut deleted = Vec::new();
        if !d.ell2.is_empty() {
            for (&unit, set) in &current.sets {
                let starved = d
                    .ell2
                    .iter()
                    .copied()
                    .find(|&l| !d.layers[l].units().iter().any(|u| set.contains(u)));
                if let Some(starved_by) = starved {
                    deleted.push(Deletion {
                        unit,
                        literal: literal_at(d, unit),
                        starved_by,
                    });
                }
            }
        }
        for del in &deleted {
            current.sets.remove(&del.unit);
            dead.insert(del.unit);
        }
        let done = deleted.is_empty();
        trace.rounds.push(Round {
            step3_passes,
            deleted,
        });
        if done {
            break;
        }
        add_dead_literal_pairs(d, &dead, &mut pairs);
    }
    trace.survivors = current.clone();

    let exhausted = d.ell3.iter().copied().find(|&layer| {
        (0..d.layers[layer].width()).all(|position| dead.contains(&UnitRef { layer, position }))
    });
    let (verdict, reason) = match exhausted {
        Some(layer) => (Verdict::Unsatisfiable, VerdictReason::LayerExhausted(layer)),
        None => (Verdict::Satisfiable, VerdictReason::Consistent),
    };
    Algorithm1Outcome {
        verdict,
        reason,
        pairs,
        trace,
    }
}

/// A literal all of whose occurrences died cannot lie on any path, so it is
/// paired with every literal of the tree.
fn add_dead_literal_pairs(
    d: &DestroyedCheckingTree,
    dead: &BTreeSet<UnitRef>,
    pairs: &mut PairSet,
) {
    let mut alive: BTreeSet<Literal> = BTreeSet::new();
    let mut all: BTreeSet<Literal> = BTreeSet::new();
    for (layer, l) in d.layers.iter().enumerate() {
        for (position, &u) in l.units().iter().enumerate() {
            all.insert(u);
            if !dead.contains(&UnitRef { layer, position }) {
                alive.insert(u);
            }
        }
    }
    for &gone in all.difference(&alive) {
        for &other in &all {
            pairs.insert(gone, other);
        }
    }
}

/// Decides whether `{x, y}` becomes a contradiction pair once `next_clause`
/// is added: true iff for every unit `v` of `next_clause` the procedure
/// calls `destroy(t, {x, y, v})` unsatisfiable.
pub fn new_pair_check(
    t: &StandardCheckingTree,
    x: Literal,
    y: Literal,
    next_clause: &Clause,
    mode: Step3Mode,
) -> bool {
    next_clause.iter().all(|v| {
        let forced: BTreeSet<Literal> = [x, y, v].into_iter().collect();
        algorithm1(&destroy(t, &forced), mode).verdict == Verdict::Unsatisfiable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checktree::{build_from_clauses, CheckingTree, PairEngine};

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    fn set(vs: &[i64]) -> BTreeSet<Literal> {
        vs.iter().map(|&v| lit(v)).collect()
    }

    fn standard(cs: &[&[i64]], pairs: PairSet) -> StandardCheckingTree {
        let clauses: Vec<_> = cs.iter().map(|c| Clause::from_dimacs(c)).collect();
        StandardCheckingTree {
            tree: CheckingTree::from_clauses(&clauses),
            pairs,
        }
    }

    const S: i64 = 1;
    const T: i64 = 2;
    const R: i64 = 3;
    const ALPHA: i64 = 4;
    const P: i64 = 5;
    const Q: i64 = 6;

    /// ell2 = {(s | t)}; ell3 = (alpha | p | q), (~s | ~t | r).
    fn small_scene() -> DestroyedCheckingTree {
        let t = standard(&[&[S, T], &[ALPHA, P, Q], &[-S, -T, R]], PairSet::new());
        destroy(&t, &BTreeSet::new())
    }

    fn unit(layer: usize, position: usize) -> UnitRef {
        UnitRef { layer, position }
    }

    #[test]
    fn useful_units_of_unrelated_and_blocking_units() {
        let d = small_scene();
        assert_eq!(useful_units(&d, unit(1, 0)), set(&[S, T]));
        assert_eq!(useful_units(&d, unit(2, 0)), set(&[T]));
        assert_eq!(useful_units(&d, unit(2, 1)), set(&[S]));
    }

    #[test]
    fn useful_units_empty_without_short_layers() {
        let t = standard(&[&[1, 2, 3], &[4, 5, 6]], PairSet::new());
        let d = destroy(&t, &BTreeSet::new());
        assert!(useful_units(&d, unit(0, 0)).is_empty());
        let out = algorithm1(&d, Step3Mode::Fixpoint);
        assert_eq!(out.verdict, Verdict::Satisfiable);
        assert!(out.trace.deleted().next().is_none());
    }

    #[test]
    fn step3_empties_alpha() {
        let d = small_scene();
        let initial = all_useful_units(&d);
        let passes = step3_intersect(&d, &initial, &PairSet::new(), Step3Mode::Fixpoint);
        let last = passes.last().unwrap();
        assert!(last.get(unit(1, 0)).unwrap().is_empty());
        assert!(step3_intersect(&d, &initial, &PairSet::new(), Step3Mode::Disabled).is_empty());
    }

    #[test]
    fn step3_leaves_identical_sets_alone() {
        let t = standard(&[&[S, T], &[P, Q, R], &[ALPHA, 7, 8]], PairSet::new());
        let d = destroy(&t, &BTreeSet::new());
        let initial = all_useful_units(&d);
        let passes = step3_intersect(&d, &initial, &PairSet::new(), Step3Mode::Fixpoint);
        assert_eq!(passes, vec![initial]);
    }

    #[test]
    fn step3_skips_contradiction_pairs() {
        let d = small_scene();
        let initial = all_useful_units(&d);
        let mut pairs = PairSet::new();
        for x in [ALPHA, P, Q] {
            for y in [-S, -T, R] {
                pairs.insert(lit(x), lit(y));
            }
        }
        let passes = step3_intersect(&d, &initial, &pairs, Step3Mode::Fixpoint);
        assert_eq!(passes.last().unwrap(), &initial);
    }

    #[test]
    fn step3_is_monotone() {
        let d = small_scene();
        let initial = all_useful_units(&d);
        let passes = step3_intersect(&d, &initial, &PairSet::new(), Step3Mode::Fixpoint);
        let mut prev = &initial;
        for pass in &passes {
            for (k, v) in &pass.sets {
                assert!(v.is_subset(&prev.sets[k]));
            }
            prev = pass;
        }
        let single = step3_intersect(&d, &initial, &PairSet::new(), Step3Mode::SinglePass);
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn algorithm1_rejects_satisfiable_scene_only_with_step3() {
        let d = small_scene();
        let out = algorithm1(&d, Step3Mode::Fixpoint);
        assert_eq!(out.verdict, Verdict::Unsatisfiable);
        assert!(out.trace.deleted().any(|del| del.literal == lit(ALPHA)));
        let out = algorithm1(&d, Step3Mode::Disabled);
        assert_eq!(out.verdict, Verdict::Satisfiable);
    }

    #[test]
    fn emptied_layer_is_unsatisfiable() {
        let t = standard(&[&[1, 2, 3]], PairSet::new());
        let d = destroy(&t, &set(&[-1, -2, -3]));
        let out = algorithm1(&d, Step3Mode::Fixpoint);
        assert_eq!(out.reason, VerdictReason::EmptiedLayer(0));
    }

    #[test]
    fn contradictory_short_layers_are_unsatisfiable() {
        let t = standard(&[&[1], &[-1], &[2, 3, 4]], PairSet::new());
        let d = destroy(&t, &BTreeSet::new());
        let out = algorithm1(&d, Step3Mode::Fixpoint);
        assert_eq!(out.verdict, Verdict::Unsatisfiable);
        assert_eq!(out.reason, VerdictReason::ShortLayersUnsatisfiable);
    }

    #[test]
    fn dead_literals_gain_pairs() {
        // (x1) forces x1; unit ~x1 of the wide layer has no useful unit.
        let t = standard(&[&[1], &[-1, 2, 3]], PairSet::new());
        let d = destroy(&t, &BTreeSet::new());
        let out = algorithm1(&d, Step3Mode::Fixpoint);
        assert_eq!(out.verdict, Verdict::Satisfiable);
        let dead: Vec<_> = out.trace.deleted().map(|del| del.literal).collect();
        assert_eq!(dead, vec![lit(-1)]);
        assert!(out.pairs.contains(lit(-1), lit(2)));
    }

    #[test]
    fn new_pair_check_false_on_shared_path() {
        // (1 | 2), (3 | 4); adding (1 | 3): 1 and 3 lie on a common path.
        let t = build_from_clauses(
            &[Clause::from_dimacs(&[1, 2]), Clause::from_dimacs(&[3, 4])],
            PairEngine::oracle(),
        )
        .unwrap();
        let next = Clause::from_dimacs(&[1, 3]);
        assert!(!new_pair_check(
            &t,
            lit(1),
            lit(3),
            &next,
            Step3Mode::Fixpoint
        ));
    }

    #[test]
    fn new_pair_check_false_when_next_clause_holds_x() {
        let t = build_from_clauses(
            &[
                Clause::from_dimacs(&[1, 2, 3]),
                Clause::from_dimacs(&[-1, 4, 5]),
                Clause::from_dimacs(&[4, -5, 6]),
            ],
            PairEngine::oracle(),
        )
        .unwrap();
        let next = Clause::from_dimacs(&[1, 6, -2]);
        assert!(!new_pair_check(
            &t,
            lit(1),
            lit(4),
            &next,
            Step3Mode::Fixpoint
        ));
    }

    #[test]
    fn new_pair_check_true_on_genuine_contradiction() {
        // (1 | 2), (-1 | -2) forbids 1 together with 2 whatever comes next.
        let t = build_from_clauses(
            &[Clause::from_dimacs(&[1, 3]), Clause::from_dimacs(&[-1, -2])],
            PairEngine::oracle(),
        )
        .unwrap();
        let next = Clause::from_dimacs(&[2, 4]);
        assert!(new_pair_check(
            &t,
            lit(1),
            lit(2),
            &next,
            Step3Mode::Fixpoint
        ));
    }

    #[test]
    fn step3_mode_parses() {
        assert_eq!("fixpoint".parse(), Ok(Step3Mode::Fixpoint));
        assert_eq!("single".parse(), Ok(Step3Mode::SinglePass));
        assert_eq!("off".parse(), Ok(Step3Mode::Disabled));
        assert!("sometimes".parse::<Step3Mode>().is_err());
        assert_eq!(Step3Mode::SinglePass.to_string(), "single");
    }
}
