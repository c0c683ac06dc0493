//! Command implementations behind the `ctree` binary.
//!
//! Each command writes its report to a caller-supplied sink and returns the
//! process exit code, so the binary and the tests share one code path.
//!
//! Exit codes: 10 satisfiable, 20 unsatisfiable, 0 no divergence, 30 at
//! least one divergence, 1 error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ctree_core::checktree::{
    algorithm1, destroy, reconstructed_verdict, Algorithm1Trace, StandardCheckingTree, UnitRef,
    UsefulUnits,
};
use ctree_core::cnf::{display_literal, NameTable};
use ctree_core::counterexample::{
    construct_family, describe_reason, reproduce_divergence, DivergenceReport, FamilyError,
    FamilyInstance, Roles,
};
use ctree_core::dimacs::DimacsError;
use ctree_core::oracle::{brute_force_clauses, OracleError};
use ctree_core::{
    brute_force_sat, parse_dimacs, Assignment, Bounds, CheckingTree, Clause, Formula, Literal,
    Step3Mode, Verdict,
};
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_DIVERGENCE: i32 = 30;

/// Version of the structured compare report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: DimacsError,
    },
    #[error("{path}: {source}")]
    Family {
        path: PathBuf,
        #[source]
        source: FamilyError,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Generate(#[from] FamilyError),
    #[error("unknown literal `{0}`")]
    UnknownLiteral(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Oracle,
    Reconstructed,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub engine: Engine,
    pub bounds: Bounds,
    pub step3: Step3Mode,
    pub format: Format,
    /// Literals assumed true by `solve`, as names or DIMACS integers.
    pub force: Vec<String>,
    pub n: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.bounds.max_variables == 0 || self.bounds.max_path_product == 0 {
            return Err(HarnessError::InvalidConfig(
                "bounds must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn read_formula(path: &Path) -> Result<Formula, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_dimacs(&text).map_err(|source| HarnessError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves `name`, `~name`, `-name` or a signed DIMACS integer.
pub fn parse_literal(formula: &Formula, token: &str) -> Result<Literal, HarnessError> {
    let unknown = || HarnessError::UnknownLiteral(token.to_string());
    if let Ok(value) = token.parse::<i64>() {
        let lit = Literal::from_dimacs(value).ok_or_else(unknown)?;
        if lit.var() > formula.num_variables() {
            return Err(unknown());
        }
        return Ok(lit);
    }
    let (negated, name) = match token.strip_prefix(['~', '-']) {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let var = formula.variable_named(name).ok_or_else(unknown)?;
    Ok(Literal::new(var, !negated))
}

fn witness_line(a: &Assignment) -> String {
    let mut line = String::from("v");
    for lit in a.to_dimacs() {
        let _ = write!(line, " {lit}");
    }
    line.push_str(" 0");
    line
}

fn named_literals(names: &NameTable, lits: impl IntoIterator<Item = Literal>) -> Vec<String> {
    lits.into_iter()
        .map(|l| display_literal(names, l))
        .collect()
}

/// `solve`: decide one file with the selected engine.
pub fn cmd_solve(config: &RunConfig, out: &mut impl Write) -> Result<i32, HarnessError> {
    config.validate()?;
    let [path] = config.inputs.as_slice() else {
        return Err(HarnessError::InvalidConfig(
            "solve takes exactly one input".into(),
        ));
    };
    let formula = read_formula(path)?;
    let forced: BTreeSet<Literal> = config
        .force
        .iter()
        .map(|t| parse_literal(&formula, t))
        .collect::<Result<_, _>>()?;

    let verdict = match config.engine {
        Engine::Oracle => {
            let witness = if forced.is_empty() {
                brute_force_sat(&formula, config.bounds.max_variables)?
            } else {
                let n = formula.num_variables();
                if n > config.bounds.max_variables {
                    return Err(OracleError::VariableBoundExceeded {
                        found: n,
                        bound: config.bounds.max_variables,
                    }
                    .into());
                }
                let mut clauses = formula.clauses().to_vec();
                clauses.extend(forced.iter().map(|&l| Clause::new(vec![l]).expect("unit")));
                brute_force_clauses(&clauses, n)?
            };
            match witness {
                Some(w) => {
                    writeln!(out, "s SATISFIABLE")?;
                    writeln!(out, "{}", witness_line(&w))?;
                    Verdict::Satisfiable
                }
                None => {
                    writeln!(out, "s UNSATISFIABLE")?;
                    Verdict::Unsatisfiable
                }
            }
        }
        Engine::Reconstructed => {
            let verdict = if forced.is_empty() {
                reconstructed_verdict(&formula, config.step3)
            } else {
                let tree = StandardCheckingTree::exact(
                    CheckingTree::from_formula(&formula),
                    config.bounds.max_path_product,
                )?;
                let outcome = algorithm1(&destroy(&tree, &forced), config.step3);
                writeln!(out, "c {}", describe_reason(outcome.reason))?;
                outcome.verdict
            };
            match verdict {
                Verdict::Satisfiable => writeln!(out, "s SATISFIABLE")?,
                Verdict::Unsatisfiable => writeln!(out, "s UNSATISFIABLE")?,
            }
            verdict
        }
        Engine::Both => {
            return Err(HarnessError::InvalidConfig(
                "solve needs a single engine".into(),
            ))
        }
    };
    Ok(match verdict {
        Verdict::Satisfiable => EXIT_SAT,
        Verdict::Unsatisfiable => EXIT_UNSAT,
    })
}

#[derive(Debug, Serialize)]
pub struct CompareDocument {
    pub schema_version: u32,
    pub step3: String,
    pub results: Vec<InputResult>,
    pub reports: Vec<Report>,
}

/// Verdicts of both engines on one input.
#[derive(Debug, Serialize)]
pub struct InputResult {
    pub instance: String,
    /// `family` when `{c, alpha}` is forced on the tree, `formula` otherwise.
    pub mode: &'static str,
    pub oracle_verdict: String,
    pub algorithm_verdict: String,
    pub divergent: bool,
}

/// A disagreement between the procedure and the oracle.
#[derive(Debug, Serialize)]
pub struct Report {
    pub instance: String,
    pub forced: Vec<String>,
    pub oracle_verdict: String,
    pub witness: Vec<String>,
    pub algorithm_verdict: String,
    pub reason: Option<String>,
    pub derived_pair: Option<[String; 2]>,
    pub pair_is_genuine: Option<bool>,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A useful-unit set before step 3 (`pass` absent), or one that a
    /// step-3 pass changed.
    Useful {
        round: Option<usize>,
        pass: Option<usize>,
        layer: usize,
        position: usize,
        unit: String,
        useful: Vec<String>,
    },
    Deleted {
        round: usize,
        layer: usize,
        position: usize,
        unit: String,
        starved_by: usize,
    },
}

fn push_useful(
    events: &mut Vec<TraceEvent>,
    names: &NameTable,
    tree: &[Clause],
    sets: &UsefulUnits,
    previous: Option<&UsefulUnits>,
    phase: Option<(usize, usize)>,
) {
    for (&unit, set) in &sets.sets {
        if previous.is_some_and(|p| p.get(unit) == Some(set)) {
            continue;
        }
        let UnitRef { layer, position } = unit;
        events.push(TraceEvent::Useful {
            round: phase.map(|p| p.0),
            pass: phase.map(|p| p.1),
            layer,
            position,
            unit: display_literal(names, tree[layer].literals()[position]),
            useful: named_literals(names, set.iter().copied()),
        });
    }
}

fn trace_events(names: &NameTable, tree: &[Clause], trace: &Algorithm1Trace) -> Vec<TraceEvent> {
    let mut events = Vec::new();
    push_useful(&mut events, names, tree, &trace.initial, None, None);
    let mut previous = &trace.initial;
    for (r, round) in trace.rounds.iter().enumerate() {
        for (p, pass) in round.step3_passes.iter().enumerate() {
            push_useful(&mut events, names, tree, pass, Some(previous), Some((r, p)));
            previous = pass;
        }
        for d in &round.deleted {
            events.push(TraceEvent::Deleted {
                round: r,
                layer: d.unit.layer,
                position: d.unit.position,
                unit: display_literal(names, d.literal),
                starved_by: d.starved_by,
            });
        }
    }
    events
}

fn family_report(path: &str, inst: &FamilyInstance, d: &DivergenceReport) -> Report {
    let names = inst.formula.names();
    let cmp = &d.comparison;
    Report {
        instance: path.to_string(),
        forced: named_literals(names, cmp.forced.iter().copied()),
        oracle_verdict: cmp.oracle_verdict().to_string(),
        witness: named_literals(names, d.witness().true_literals()),
        algorithm_verdict: cmp.outcome.verdict.to_string(),
        reason: Some(describe_reason(cmp.outcome.reason)),
        derived_pair: d
            .derived_pair
            .map(|(x, y)| [display_literal(names, x), display_literal(names, y)]),
        pair_is_genuine: Some(d.pair_is_genuine),
        trace: trace_events(names, inst.tree_clauses(), &cmp.outcome.trace),
    }
}

/// Compares both engines on one input.
fn compare_one(
    path: &Path,
    config: &RunConfig,
) -> Result<(InputResult, Option<Report>), HarnessError> {
    let formula = read_formula(path)?;
    let instance = path.display().to_string();
    let family_error = |source| HarnessError::Family {
        path: path.to_path_buf(),
        source,
    };

    if Roles::from_names(formula.names()).is_ok() {
        let inst = FamilyInstance::from_formula(formula).map_err(family_error)?;
        return match reproduce_divergence(&inst, config.step3, config.bounds) {
            Ok(d) => {
                let report = family_report(&instance, &inst, &d);
                let result = InputResult {
                    instance,
                    mode: "family",
                    oracle_verdict: report.oracle_verdict.clone(),
                    algorithm_verdict: report.algorithm_verdict.clone(),
                    divergent: true,
                };
                Ok((result, Some(report)))
            }
            Err(FamilyError::NoDivergence { algorithm, oracle }) => Ok((
                InputResult {
                    instance,
                    mode: "family",
                    oracle_verdict: oracle.to_string(),
                    algorithm_verdict: algorithm.to_string(),
                    divergent: false,
                },
                None,
            )),
            Err(e) => Err(family_error(e)),
        };
    }

    let witness = brute_force_sat(&formula, config.bounds.max_variables)?;
    let oracle = if witness.is_some() {
        Verdict::Satisfiable
    } else {
        Verdict::Unsatisfiable
    };
    let algorithm = reconstructed_verdict(&formula, config.step3);
    let divergent = oracle != algorithm;
    let report = divergent.then(|| Report {
        instance: instance.clone(),
        forced: Vec::new(),
        oracle_verdict: oracle.to_string(),
        witness: witness
            .as_ref()
            .map(|w| named_literals(formula.names(), w.true_literals()))
            .unwrap_or_default(),
        algorithm_verdict: algorithm.to_string(),
        reason: None,
        derived_pair: None,
        pair_is_genuine: None,
        trace: Vec::new(),
    });
    let result = InputResult {
        instance,
        mode: "formula",
        oracle_verdict: oracle.to_string(),
        algorithm_verdict: algorithm.to_string(),
        divergent,
    };
    Ok((result, report))
}

/// `compare`: run the oracle and the procedure on every input and report
/// disagreements.
///
/// Files naming all of `s t c r a b alpha` are treated as family members:
/// the last clause is the incoming clause, the rest form the tree, and
/// `{c, alpha}` is forced. Other files are decided whole by both engines.
pub fn cmd_compare(config: &RunConfig, out: &mut impl Write) -> Result<i32, HarnessError> {
    config.validate()?;
    if config.engine != Engine::Both {
        return Err(HarnessError::InvalidConfig(
            "compare runs both engines".into(),
        ));
    }
    let mut doc = CompareDocument {
        schema_version: SCHEMA_VERSION,
        step3: config.step3.to_string(),
        results: Vec::new(),
        reports: Vec::new(),
    };
    for path in &config.inputs {
        let (result, report) = compare_one(path, config)?;
        doc.results.push(result);
        doc.reports.extend(report);
    }

    match config.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Text => write_text(&doc, out)?,
    }
    Ok(if doc.reports.is_empty() {
        EXIT_OK
    } else {
        EXIT_DIVERGENCE
    })
}

fn write_text(doc: &CompareDocument, out: &mut impl Write) -> io::Result<()> {
    for r in &doc.results {
        writeln!(
            out,
            "{}: {} oracle={} algorithm={}{}",
            r.instance,
            r.mode,
            r.oracle_verdict,
            r.algorithm_verdict,
            if r.divergent { " DIVERGENT" } else { "" }
        )?;
    }
    for rep in &doc.reports {
        writeln!(out)?;
        writeln!(out, "divergence in {}", rep.instance)?;
        if !rep.forced.is_empty() {
            writeln!(out, "  forced: {}", rep.forced.join(" "))?;
        }
        writeln!(
            out,
            "  oracle: {} witness: {}",
            rep.oracle_verdict,
            rep.witness.join(" ")
        )?;
        writeln!(out, "  algorithm: {}", rep.algorithm_verdict)?;
        if let Some(reason) = &rep.reason {
            writeln!(out, "  reason: {reason}")?;
        }
        if let Some([x, y]) = &rep.derived_pair {
            let genuine = if rep.pair_is_genuine == Some(true) {
                "genuine"
            } else {
                "not a contradiction pair"
            };
            writeln!(out, "  derived pair: {{{x}, {y}}} ({genuine})")?;
        }
        if !rep.trace.is_empty() {
            writeln!(out, "  trace:")?;
        }
        for event in &rep.trace {
            match event {
                TraceEvent::Useful {
                    round,
                    pass,
                    layer,
                    position,
                    unit,
                    useful,
                } => {
                    let phase = match (round, pass) {
                        (Some(r), Some(p)) => format!("round {r} pass {p}"),
                        _ => "initial".to_string(),
                    };
                    writeln!(
                        out,
                        "    {phase}: U({unit} @ {layer}.{position}) = {{{}}}",
                        useful.join(", ")
                    )?;
                }
                TraceEvent::Deleted {
                    round,
                    layer,
                    position,
                    unit,
                    starved_by,
                } => writeln!(
                    out,
                    "    round {round}: delete {unit} @ {layer}.{position} (layer {starved_by} contributes nothing)"
                )?,
            }
        }
    }
    let divergent = doc.reports.len();
    writeln!(
        out,
        "{} input(s), {divergent} divergence(s), step3={}",
        doc.results.len(),
        doc.step3
    )
}

/// File name used by `generate` for member `n` of `seed`.
pub fn family_file_name(n: usize, seed: u64) -> String {
    format!("family_n{n}_seed{seed}.cnf")
}

/// `generate`: write one family member as annotated DIMACS.
pub fn cmd_generate(config: &RunConfig, out: &mut impl Write) -> Result<i32, HarnessError> {
    config.validate()?;
    let inst = construct_family(config.n, config.seed, config.bounds)?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join(family_file_name(config.n, config.seed));
    std::fs::write(&path, inst.to_fixture(config.n, config.seed)).map_err(|source| {
        HarnessError::Io {
            path: path.clone(),
            source,
        }
    })?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}
