//! 2-SAT through the implication graph and its strongly connected components.

use crate::cnf::{Assignment, Clause, Literal};

use super::OracleError;

/// Decides a CNF whose clauses have at most two literals.
///
/// Returns an assignment over variables `1..=max mentioned` (unmentioned
/// variables are false), or `None` when unsatisfiable. An empty clause makes
/// the input unsatisfiable; a three-literal clause is a contract violation.
pub fn solve_2sat(clauses: &[Clause]) -> Result<Option<Assignment>, OracleError> {
    let mut num_vars = 0u32;
    for clause in clauses {
        if clause.len() > 2 {
            return Err(OracleError::ClauseTooWide(clause.len()));
        }
        if clause.is_empty() {
            return Ok(None);
        }
        for lit in clause.iter() {
            num_vars = num_vars.max(lit.var());
        }
    }

    let nodes = 2 * num_vars as usize;
    let mut graph = ImplicationGraph::new(nodes);
    for clause in clauses {
        let (a, b) = match clause.literals() {
            [a] => (*a, *a),
            [a, b] => (*a, *b),
            _ => unreachable!(),
        };
        // a | b  ==  ~a -> b  and  ~b -> a
        graph.add_edge((!a).code(), b.code());
        graph.add_edge((!b).code(), a.code());
    }

    let comp = graph.tarjan();
    let mut assignment = Assignment::all_false(num_vars);
    for var in 1..=num_vars {
        let pos = comp[Literal::pos(var).code()];
        let neg = comp[Literal::neg(var).code()];
        if pos == neg {
            return Ok(None);
        }
        // Tarjan numbers components in reverse topological order.
        assignment.set(var, pos < neg);
    }
    Ok(Some(assignment))
}

struct ImplicationGraph {
    adj: Vec<Vec<usize>>,
}

impl ImplicationGraph {
    fn new(nodes: usize) -> Self {
        ImplicationGraph {
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        self.adj[from].push(to);
    }

    /// Iterative Tarjan; returns the component index of every node.
    fn tarjan(&self) -> Vec<usize> {
        const UNSET: usize = usize::MAX;
        let n = self.adj.len();
        let mut index = vec![UNSET; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSET; n];
        let mut stack = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        let mut counter = 0;
        let mut n_comp = 0;

        for root in 0..n {
            if index[root] != UNSET {
                continue;
            }
            call.push((root, 0));
            while let Some(&(v, edge)) = call.last() {
                if edge == 0 && index[v] == UNSET {
                    index[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                if let Some(&w) = self.adj[v].get(edge) {
                    call.last_mut().expect("frame").1 += 1;
                    if index[w] == UNSET {
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("component root is on the stack");
                        on_stack[w] = false;
                        comp[w] = n_comp;
                        if w == v {
                            break;
                        }
                    }
                    n_comp += 1;
                }
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
        comp
    }
}
