//! Satisfiable instances on which the checking-tree procedure fails.
//!
//! A family member is a checking tree
//!
//! ```text
//! s | t | ~c,  C_1, ..., C_m,  ~s | ~t | r
//! ```
//!
//! followed by an incoming clause `a | b | c`, where the fillers `C_i` make
//! every long path contain `c` and `alpha`, rule out `a` and `b` entirely, and
//! leave `s, ~t` and `t, ~s` path-compatible. Forcing `c` and `alpha` then
//! shrinks the first layer to `s | t`; `~s` can only use `t`, `~t` only `s`,
//! and the step-3 intersection drains `alpha`'s useful units although the
//! forced tree is satisfiable.
//!
//! Fillers are found by seeded search and every candidate is checked with the
//! exact oracles before it is accepted.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::checktree::{
    algorithm1, destroy, new_pair_check, Algorithm1Outcome, CheckingTree, StandardCheckingTree,
    Step3Mode, Verdict, VerdictReason,
};
use crate::cnf::{Assignment, Clause, Formula, Literal, NameTable};
use crate::dimacs::serialize_dimacs_with_comments;
use crate::oracle::{brute_force_clauses, enumerate_long_paths, Bounds, OracleError};

/// Role names, as written to `c name` lines.
pub const ROLE_NAMES: [&str; 7] = ["s", "t", "c", "r", "a", "b", "alpha"];

/// Number of fillers in the core gadget, before padding.
pub const CORE_FILLERS: usize = 8;

const CORE_ATTEMPTS: usize = 10_000;
const PADDING_TRIES: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("no `{0}` variable in the name table")]
    MissingRole(&'static str),
    #[error("instance needs at least three clauses (first layer, last layer, incoming clause)")]
    TooShort,
    #[error("search exhausted after {attempts} candidates: {last_failure}")]
    SearchExhausted {
        attempts: usize,
        last_failure: String,
    },
    #[error("family assumptions do not hold: {0}")]
    AssumptionsFailed(String),
    #[error("no divergence: procedure says {algorithm}, oracle says {oracle}")]
    NoDivergence { algorithm: Verdict, oracle: Verdict },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Variable indices of the named roles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub s: u32,
    pub t: u32,
    pub c: u32,
    pub r: u32,
    pub a: u32,
    pub b: u32,
    pub alpha: u32,
}

impl Roles {
    pub fn from_names(names: &NameTable) -> Result<Self, FamilyError> {
        let find = |role: &'static str| {
            names
                .iter()
                .find(|(_, n)| n.as_str() == role)
                .map(|(&v, _)| v)
                .ok_or(FamilyError::MissingRole(role))
        };
        Ok(Roles {
            s: find("s")?,
            t: find("t")?,
            c: find("c")?,
            r: find("r")?,
            a: find("a")?,
            b: find("b")?,
            alpha: find("alpha")?,
        })
    }

    /// The literals forced true when testing `{c, alpha}`.
    pub fn forced(&self) -> BTreeSet<Literal> {
        [Literal::pos(self.c), Literal::pos(self.alpha)]
            .into_iter()
            .collect()
    }

    pub fn first_layer(&self) -> Clause {
        clause(&[
            Literal::pos(self.s),
            Literal::pos(self.t),
            Literal::neg(self.c),
        ])
    }

    pub fn last_layer(&self) -> Clause {
        clause(&[
            Literal::neg(self.s),
            Literal::neg(self.t),
            Literal::pos(self.r),
        ])
    }

    pub fn incoming(&self) -> Clause {
        clause(&[
            Literal::pos(self.a),
            Literal::pos(self.b),
            Literal::pos(self.c),
        ])
    }
}

fn clause(lits: &[Literal]) -> Clause {
    Clause::new(lits.to_vec()).expect("at most three literals")
}

/// A family member: the tree clauses followed by the incoming clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInstance {
    pub formula: Formula,
    pub roles: Roles,
}

impl FamilyInstance {
    /// Reads roles from the formula's name table. The last clause is taken
    /// to be the incoming clause.
    pub fn from_formula(formula: Formula) -> Result<Self, FamilyError> {
        let roles = Roles::from_names(formula.names())?;
        if formula.clauses().len() < 3 {
            return Err(FamilyError::TooShort);
        }
        Ok(FamilyInstance { formula, roles })
    }

    /// Clauses of the checking tree, without the incoming clause.
    pub fn tree_clauses(&self) -> &[Clause] {
        let clauses = self.formula.clauses();
        &clauses[..clauses.len() - 1]
    }

    pub fn incoming(&self) -> &Clause {
        self.formula
            .clauses()
            .last()
            .expect("at least three clauses")
    }

    /// The clauses strictly between the first and last tree layers.
    pub fn fillers(&self) -> &[Clause] {
        let tree = self.tree_clauses();
        &tree[1..tree.len() - 1]
    }

    /// DIMACS text with descriptive comments and the role name table.
    pub fn to_fixture(&self, n: usize, seed: u64) -> String {
        let mut comments = vec![format!(
            "checking-tree counterexample family member n={n} seed={seed}"
        )];
        comments.extend(self.describe());
        serialize_dimacs_with_comments(&self.formula, &comments)
    }

    /// Free-form comment lines describing the instance.
    pub fn describe(&self) -> Vec<String> {
        vec![
            "layout: (s | t | ~c), fillers, (~s | ~t | r), then the incoming clause (a | b | c)"
                .to_string(),
            format!("fillers: {}", self.fillers().len()),
            "fillers avoid ~c and ~alpha, so forcing {c, alpha} leaves (s | t) as the only short layer"
                .to_string(),
            "oracle-verified: (a, alpha), (b, alpha) are contradiction pairs; every long path holds c and alpha;"
                .to_string(),
            "(s, ~t) and (t, ~s) lie on long paths; at least one long path exists".to_string(),
        ]
    }
}

/// Outcome of each family assumption, computed with the exact oracles on
/// the tree before the incoming clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssumptionReport {
    /// `None` when the first, last and incoming clauses have the expected shape.
    pub schema_problem: Option<String>,
    pub a_alpha_pair: bool,
    pub b_alpha_pair: bool,
    pub every_path_has_c_and_alpha: bool,
    pub s_t_crossings_compatible: bool,
    pub path_exists: bool,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.schema_problem.is_none()
            && self.a_alpha_pair
            && self.b_alpha_pair
            && self.every_path_has_c_and_alpha
            && self.s_t_crossings_compatible
            && self.path_exists
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.schema_problem.is_some() {
            out.push("schema");
        }
        for (ok, name) in [
            (self.a_alpha_pair, "(a, alpha) pair"),
            (self.b_alpha_pair, "(b, alpha) pair"),
            (self.every_path_has_c_and_alpha, "c and alpha on every path"),
            (
                self.s_t_crossings_compatible,
                "(s, ~t) and (t, ~s) compatible",
            ),
            (self.path_exists, "a long path exists"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// Checks the family assumptions exactly.
pub fn verify_assumptions(
    inst: &FamilyInstance,
    bounds: Bounds,
) -> Result<AssumptionReport, FamilyError> {
    let roles = inst.roles;
    let tree = inst.tree_clauses();
    let schema_problem = if tree.first() != Some(&roles.first_layer()) {
        Some("first tree clause is not (s | t | ~c)".to_string())
    } else if tree.len() < 2 || tree.last() != Some(&roles.last_layer()) {
        Some("last tree clause is not (~s | ~t | r)".to_string())
    } else if inst.incoming() != &roles.incoming() {
        Some("incoming clause is not (a | b | c)".to_string())
    } else {
        None
    };
    if schema_problem.is_some() {
        return Ok(AssumptionReport {
            schema_problem,
            ..AssumptionReport::default()
        });
    }

    let standard =
        StandardCheckingTree::exact(CheckingTree::from_clauses(tree), bounds.max_path_product)?;
    let pairs = &standard.pairs;
    let pos = Literal::pos;
    let (c, alpha) = (pos(roles.c), pos(roles.alpha));

    let mut path_exists = false;
    let mut every_path = true;
    for path in enumerate_long_paths(&standard.tree, bounds.max_path_product)? {
        path_exists = true;
        if !(path.contains(c) && path.contains(alpha)) {
            every_path = false;
            break;
        }
    }

    Ok(AssumptionReport {
        schema_problem: None,
        a_alpha_pair: pairs.contains(pos(roles.a), alpha),
        b_alpha_pair: pairs.contains(pos(roles.b), alpha),
        every_path_has_c_and_alpha: path_exists && every_path,
        s_t_crossings_compatible: !pairs.contains(pos(roles.s), Literal::neg(roles.t))
            && !pairs.contains(pos(roles.t), Literal::neg(roles.s)),
        path_exists,
    })
}

/// True when forcing `{c, alpha}` shortens only the first layer, to `s | t`.
fn only_first_layer_shrinks(inst: &FamilyInstance) -> bool {
    let forced = inst.roles.forced();
    inst.tree_clauses()[1..]
        .iter()
        .all(|c| c.len() == 3 && c.iter().all(|l| !forced.contains(&!l)))
}

/// Builds family member `n` for `seed`: the core gadget plus `n` padding
/// fillers. Equal arguments give identical instances.
pub fn construct_family(
    n: usize,
    seed: u64,
    bounds: Bounds,
) -> Result<FamilyInstance, FamilyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_failure = String::from("no candidate generated");
    let mut attempts = 0;

    'core: for _ in 0..CORE_ATTEMPTS {
        attempts += 1;
        let mut draft = Draft::core(&mut rng);
        match draft.check(bounds)? {
            Ok(()) => {}
            Err(why) => {
                last_failure = why;
                continue;
            }
        }
        for _ in 0..n {
            let mut placed = false;
            for _ in 0..PADDING_TRIES {
                attempts += 1;
                let mut next = draft.clone();
                next.pad(&mut rng);
                match next.check(bounds)? {
                    Ok(()) => {
                        draft = next;
                        placed = true;
                        break;
                    }
                    Err(why) => last_failure = why,
                }
            }
            if !placed {
                continue 'core;
            }
        }
        return Ok(draft.finish());
    }
    Err(FamilyError::SearchExhausted {
        attempts,
        last_failure,
    })
}

/// A candidate under construction.
#[derive(Clone)]
struct Draft {
    roles: Roles,
    aux: [u32; 2],
    names: NameTable,
    fillers: Vec<Clause>,
    num_vars: u32,
}

impl Draft {
    /// The core gadget with seeded variable numbering, clause order and
    /// auxiliary signs. Sign choices are drawn independently, so some
    /// candidates fail to force what they should and are rejected by `check`.
    fn core(rng: &mut ChaCha8Rng) -> Self {
        let mut order: Vec<u32> = (1..=9).collect();
        order.shuffle(rng);
        let roles = Roles {
            s: order[0],
            t: order[1],
            c: order[2],
            r: order[3],
            a: order[4],
            b: order[5],
            alpha: order[6],
        };
        let aux = [order[7], order[8]];
        let mut names = NameTable::new();
        for (var, name) in order.iter().zip(ROLE_NAMES.iter().chain(["p", "q"].iter())) {
            names.insert(*var, name.to_string());
        }

        let pos = Literal::pos;
        let neg = Literal::neg;
        let aux_lit = |rng: &mut ChaCha8Rng, which: usize| Literal::new(aux[which], rng.gen());

        let mut fillers = vec![
            clause(&[pos(roles.c), pos(roles.a), pos(roles.b)]),
            clause(&[pos(roles.alpha), pos(roles.a), pos(roles.b)]),
        ];
        // ~a | +-p | +-q, four sign patterns drawn with replacement
        for _ in 0..4 {
            let (p, q) = (aux_lit(rng, 0), aux_lit(rng, 1));
            fillers.push(clause(&[neg(roles.a), p, q]));
        }
        // ~b | a | x and ~b | a | y
        for _ in 0..2 {
            let which = rng.gen_range(0..2);
            let x = aux_lit(rng, which);
            fillers.push(clause(&[neg(roles.b), pos(roles.a), x]));
        }
        for f in &mut fillers {
            let mut lits = f.literals().to_vec();
            lits.shuffle(rng);
            *f = clause(&lits);
        }
        fillers.shuffle(rng);

        Draft {
            roles,
            aux,
            names,
            fillers,
            num_vars: 9,
        }
    }

    /// Appends one padding filler: a copy of an existing filler, a
    /// tautology over two fresh variables, or a random clause over the
    /// gadget's variables that avoids `~c` and `~alpha`.
    fn pad(&mut self, rng: &mut ChaCha8Rng) {
        let extra = match rng.gen_range(0..3) {
            0 => self.fillers[rng.gen_range(0..self.fillers.len())].clone(),
            1 => {
                let x = self.fresh_var();
                let y = self.fresh_var();
                let mut lits = vec![Literal::pos(x), Literal::neg(x), Literal::new(y, rng.gen())];
                lits.shuffle(rng);
                clause(&lits)
            }
            _ => {
                let r = self.roles;
                let mut vars = vec![
                    r.s,
                    r.t,
                    r.c,
                    r.r,
                    r.a,
                    r.b,
                    r.alpha,
                    self.aux[0],
                    self.aux[1],
                ];
                vars.shuffle(rng);
                let lits: Vec<Literal> = vars[..3]
                    .iter()
                    .map(|&v| {
                        let positive = v == r.c || v == r.alpha || rng.gen();
                        Literal::new(v, positive)
                    })
                    .collect();
                clause(&lits)
            }
        };
        let at = rng.gen_range(0..=self.fillers.len());
        self.fillers.insert(at, extra);
    }

    fn fresh_var(&mut self) -> u32 {
        self.num_vars += 1;
        let k = self.num_vars - 9;
        self.names.insert(self.num_vars, format!("f{k}"));
        self.num_vars
    }

    fn instance(&self) -> FamilyInstance {
        let mut clauses = Vec::with_capacity(self.fillers.len() + 3);
        clauses.push(self.roles.first_layer());
        clauses.extend(self.fillers.iter().cloned());
        clauses.push(self.roles.last_layer());
        clauses.push(self.roles.incoming());
        let formula = Formula::new(self.num_vars, clauses)
            .expect("all variables allocated")
            .with_names(self.names.clone());
        FamilyInstance {
            formula,
            roles: self.roles,
        }
    }

    /// Inner `Err` carries the reason a candidate was rejected.
    fn check(&self, bounds: Bounds) -> Result<Result<(), String>, FamilyError> {
        let inst = self.instance();
        if !only_first_layer_shrinks(&inst) {
            return Ok(Err(
                "a filler loses units when c and alpha are forced".to_string()
            ));
        }
        let report = verify_assumptions(&inst, bounds)?;
        if report.passed() {
            Ok(Ok(()))
        } else {
            Ok(Err(format!("failed: {}", report.failures().join(", "))))
        }
    }

    fn finish(&self) -> FamilyInstance {
        self.instance()
    }
}

/// Procedure verdict versus oracle verdict on a tree with forced literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedComparison {
    pub forced: BTreeSet<Literal>,
    pub outcome: Algorithm1Outcome,
    /// Satisfying assignment of the forced tree, when one exists.
    pub witness: Option<Assignment>,
}

impl ForcedComparison {
    pub fn oracle_verdict(&self) -> Verdict {
        if self.witness.is_some() {
            Verdict::Satisfiable
        } else {
            Verdict::Unsatisfiable
        }
    }

    pub fn diverges(&self) -> bool {
        self.oracle_verdict() != self.outcome.verdict
    }
}

/// Builds the oracle-exact standard tree of `tree`, destroys it with
/// `forced`, and runs both the procedure and the brute-force oracle on it.
pub fn compare_forced(
    tree: &[Clause],
    num_variables: u32,
    forced: &BTreeSet<Literal>,
    mode: Step3Mode,
    bounds: Bounds,
) -> Result<ForcedComparison, FamilyError> {
    let standard =
        StandardCheckingTree::exact(CheckingTree::from_clauses(tree), bounds.max_path_product)?;
    let destroyed = destroy(&standard, forced);
    let outcome = algorithm1(&destroyed, mode);
    let n = num_variables.max(destroyed.max_variable());
    if n > bounds.max_variables {
        return Err(OracleError::VariableBoundExceeded {
            found: n,
            bound: bounds.max_variables,
        }
        .into());
    }
    let witness = brute_force_clauses(&destroyed.residual_clauses(), n)?;
    Ok(ForcedComparison {
        forced: forced.clone(),
        outcome,
        witness,
    })
}

/// A confirmed wrong verdict on a family member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceReport {
    pub comparison: ForcedComparison,
    /// `{c, alpha}` when the pair check wrongly derives it for the incoming clause.
    pub derived_pair: Option<(Literal, Literal)>,
    /// Whether `{c, alpha}` is really a contradiction pair once the incoming
    /// clause is added (it never is for a valid family member).
    pub pair_is_genuine: bool,
}

impl DivergenceReport {
    pub fn witness(&self) -> &Assignment {
        self.comparison
            .witness
            .as_ref()
            .expect("divergence implies a witness")
    }
}

/// Forces `c` and `alpha`, runs the procedure and the oracle, and returns the
/// divergence; an error if they agree.
pub fn reproduce_divergence(
    inst: &FamilyInstance,
    mode: Step3Mode,
    bounds: Bounds,
) -> Result<DivergenceReport, FamilyError> {
    let report = verify_assumptions(inst, bounds)?;
    if !report.passed() {
        return Err(FamilyError::AssumptionsFailed(report.failures().join(", ")));
    }
    let tree = inst.tree_clauses();
    let forced = inst.roles.forced();
    let comparison = compare_forced(tree, inst.formula.num_variables(), &forced, mode, bounds)?;
    if !comparison.diverges() {
        return Err(FamilyError::NoDivergence {
            algorithm: comparison.outcome.verdict,
            oracle: comparison.oracle_verdict(),
        });
    }
    debug_assert_eq!(comparison.outcome.verdict, Verdict::Unsatisfiable);

    let (c, alpha) = (Literal::pos(inst.roles.c), Literal::pos(inst.roles.alpha));
    let standard =
        StandardCheckingTree::exact(CheckingTree::from_clauses(tree), bounds.max_path_product)?;
    let derived = new_pair_check(&standard, c, alpha, inst.incoming(), mode);
    let shared = shared_path_after(&standard.tree, inst.incoming(), c, alpha, bounds)?;
    Ok(DivergenceReport {
        comparison,
        derived_pair: derived.then_some((c, alpha)),
        pair_is_genuine: !shared,
    })
}

/// Whether some long path of `tree` extended by one unit of `next` contains
/// both `x` and `y`. Enumerates only `tree`, so the bound applies to it alone.
pub fn shared_path_after(
    tree: &CheckingTree,
    next: &Clause,
    x: Literal,
    y: Literal,
    bounds: Bounds,
) -> Result<bool, OracleError> {
    for path in enumerate_long_paths(tree, bounds.max_path_product)? {
        for v in next.iter() {
            if path.contains(!v) {
                continue;
            }
            let has = |lit: Literal| v == lit || path.contains(lit);
            if has(x) && has(y) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Short human explanation of why the procedure stopped.
pub fn describe_reason(reason: VerdictReason) -> String {
    match reason {
        VerdictReason::EmptiedLayer(i) => format!("layer {i} emptied by destruction"),
        VerdictReason::ShortLayersUnsatisfiable => "short layers unsatisfiable as 2-CNF".into(),
        VerdictReason::LayerExhausted(i) => format!("every unit of layer {i} deleted"),
        VerdictReason::Consistent => "every wide layer keeps a unit".into(),
    }
}
