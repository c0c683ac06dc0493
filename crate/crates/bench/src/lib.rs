//! Seeded random inputs for the benchmarks.

use ctree_core::{Clause, Formula, Literal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `clauses` random clauses of exactly `width` literals over `vars` variables.
pub fn random_cnf(vars: u32, clauses: usize, width: usize, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..clauses)
        .map(|_| {
            let lits = (0..width)
                .map(|_| Literal::new(rng.gen_range(1..=vars), rng.gen()))
                .collect();
            Clause::new(lits).expect("width at most three")
        })
        .collect();
    Formula::new(vars, clauses).expect("variables in range")
}
