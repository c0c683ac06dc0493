use std::collections::BTreeSet;

use ctree_core::checktree::{
    build_from_clauses, destroy, direct_pairs, step3_intersect, useful_units, CheckingTree,
    PairEngine, StandardCheckingTree, Step3Mode, UnitRef, UsefulUnits,
};
use ctree_core::cnf::evaluate_clauses;
use ctree_core::oracle::{
    brute_force_clauses, candidate_pairs, enumerate_long_paths, has_long_path,
    indirect_pairs_oracle, solve_2sat, DEFAULT_PATH_BOUND,
};
use ctree_core::{parse_dimacs, serialize_dimacs, Assignment, Clause, Formula, Literal};
use proptest::prelude::*;

fn literal(max_var: u32) -> impl Strategy<Value = Literal> {
    (1..=max_var, any::<bool>()).prop_map(|(v, p)| Literal::new(v, p))
}

fn clause(max_var: u32, width: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Clause> {
    prop::collection::vec(literal(max_var), width).prop_map(|l| Clause::new(l).unwrap())
}

fn clauses(max_var: u32, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Clause>> {
    prop::collection::vec(clause(max_var, 1..=3), count)
}

fn assignment(n: u32) -> impl Strategy<Value = Assignment> {
    prop::collection::vec(any::<bool>(), n as usize).prop_map(Assignment::new)
}

proptest! {
    #[test]
    fn negation_is_an_involution(lit in literal(1000)) {
        prop_assert_eq!(!!lit, lit);
        prop_assert_ne!(!lit, lit);
        prop_assert_eq!(Literal::from_code(lit.code()), lit);
        prop_assert_eq!(Literal::from_dimacs(lit.to_dimacs()), Some(lit));
    }

    #[test]
    fn dimacs_round_trip(cs in clauses(9, 0..8), extra in 0u32..3) {
        let n = cs.iter().flat_map(|c| c.iter()).map(|l| l.var()).max().unwrap_or(0) + extra;
        let f = Formula::new(n, cs).unwrap();
        prop_assert_eq!(parse_dimacs(&serialize_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn dropping_clauses_never_falsifies(cs in clauses(5, 0..7), a in assignment(5), keep in any::<u8>()) {
        if evaluate_clauses(&cs, &a).unwrap() {
            let kept: Vec<_> = cs.iter().enumerate()
                .filter(|(i, _)| keep >> (i % 8) & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            prop_assert!(evaluate_clauses(&kept, &a).unwrap());
        }
    }

    #[test]
    fn brute_force_witness_satisfies(cs in clauses(6, 0..10)) {
        if let Some(w) = brute_force_clauses(&cs, 6).unwrap() {
            prop_assert!(evaluate_clauses(&cs, &w).unwrap());
        }
    }

    #[test]
    fn two_sat_agrees_with_brute_force(cs in prop::collection::vec(clause(7, 1..=2), 0..14)) {
        let fast = solve_2sat(&cs).unwrap();
        let slow = brute_force_clauses(&cs, 7).unwrap();
        prop_assert_eq!(fast.is_some(), slow.is_some());
        if let Some(w) = fast {
            let mut w = w;
            for v in 1..=7 { if w.len() < v as usize { w.set(v, false); } }
            prop_assert!(evaluate_clauses(&cs, &w).unwrap());
        }
    }

    #[test]
    fn long_path_exists_iff_satisfiable(cs in clauses(5, 1..6)) {
        let tree = CheckingTree::from_clauses(&cs);
        let sat = brute_force_clauses(&cs, 5).unwrap().is_some();
        prop_assert_eq!(has_long_path(&tree, DEFAULT_PATH_BOUND).unwrap(), sat);
    }

    #[test]
    fn every_path_is_consistent(cs in clauses(5, 1..6)) {
        let tree = CheckingTree::from_clauses(&cs);
        for path in enumerate_long_paths(&tree, DEFAULT_PATH_BOUND).unwrap() {
            let lits: Vec<_> = path.literals().collect();
            prop_assert_eq!(lits.len(), tree.len());
            prop_assert!(lits.iter().all(|&l| !lits.contains(&!l)));
        }
    }

    #[test]
    fn oracle_pairs_are_candidates_and_never_direct(cs in clauses(5, 1..6)) {
        let tree = CheckingTree::from_clauses(&cs);
        let indirect = indirect_pairs_oracle(&tree, DEFAULT_PATH_BOUND).unwrap();
        prop_assert!(indirect.is_subset(&candidate_pairs(&tree)));
        for (x, y) in indirect.iter() {
            prop_assert!(indirect.contains(y, x));
            prop_assert_ne!(x, !y);
        }
        prop_assert!(direct_pairs(&tree).iter().all(|(x, y)| !indirect.contains(x, y)));
    }

    #[test]
    fn incremental_oracle_build_is_exact(cs in clauses(6, 1..5)) {
        let built = build_from_clauses(&cs, PairEngine::oracle()).unwrap();
        let exact = StandardCheckingTree::exact(CheckingTree::from_clauses(&cs), DEFAULT_PATH_BOUND).unwrap();
        prop_assert_eq!(built, exact);
    }

    #[test]
    fn destruction_removes_every_negated_forced_literal(
        cs in clauses(6, 1..8),
        forced in prop::collection::btree_set(literal(6), 0..4),
    ) {
        let t = StandardCheckingTree { tree: CheckingTree::from_clauses(&cs), ..Default::default() };
        let d = destroy(&t, &forced);
        for layer in &d.layers {
            prop_assert!(layer.units().iter().all(|u| !forced.contains(&!*u)));
        }
        prop_assert_eq!(d.layers.len(), t.tree.len());
        prop_assert_eq!(d.ell2.len() + d.ell3.len() + d.emptied.len(), t.tree.len());
        let d0 = destroy(&t, &BTreeSet::new());
        prop_assert_eq!(d0.layers.as_slice(), t.tree.layers());
    }

    #[test]
    fn step3_passes_only_shrink(cs in clauses(6, 2..6), forced in prop::collection::btree_set(literal(6), 0..3)) {
        let t = build_from_clauses(&cs, PairEngine::oracle()).unwrap();
        let d = destroy(&t, &forced);
        let mut initial = UsefulUnits::default();
        for &layer in &d.ell3 {
            for position in 0..d.layers[layer].width() {
                let unit = UnitRef { layer, position };
                initial.sets.insert(unit, useful_units(&d, unit));
            }
        }
        let passes = step3_intersect(&d, &initial, d.pairs(), Step3Mode::Fixpoint);
        let mut prev = &initial;
        for pass in &passes {
            for (unit, set) in &pass.sets {
                prop_assert!(set.is_subset(&prev.sets[unit]));
            }
            prev = pass;
        }
        if passes.len() >= 2 {
            let n = passes.len();
            prop_assert_eq!(&passes[n - 1], &passes[n - 2]);
        }
    }
}
