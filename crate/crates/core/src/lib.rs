//! A laboratory for the checking-tree 3-SAT procedure.
//!
//! * [`cnf`] and [`dimacs`]: formulas and their file format.
//! * [`oracle`]: exhaustive SAT, 2-SAT, long-path enumeration and the exact
//!   contradiction-pair oracle.
//! * [`checktree`]: standard and destroyed checking trees, the repair
//!   procedure ([`checktree::algorithm1`]) and the pair-derivation engines.
//! * [`counterexample`]: a generator for satisfiable instances that the
//!   procedure rejects, with assumption checks and divergence reports.

pub mod checktree;
pub mod cnf;
pub mod counterexample;
pub mod dimacs;
pub mod oracle;

pub use checktree::{
    algorithm1, build_standard_tree, destroy, is_unsatisfiable_simplified, CheckingTree,
    DestroyedCheckingTree, Layer, PairEngine, StandardCheckingTree, Step3Mode, Verdict,
};
pub use cnf::{Assignment, Clause, Formula, Literal};
pub use dimacs::{parse_dimacs, serialize_dimacs};
pub use oracle::{brute_force_sat, solve_2sat, Bounds, PairSet};
