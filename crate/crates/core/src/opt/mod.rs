//! View-based query rewriting.

mod cost;
mod rewrite;

use std::collections::HashSet;

pub use cost::{estimate_dbhit, sort_by_opt_eff, view_opt_eff, ViewStats};
pub use rewrite::{change_pg, match_view, MatchResult};

use crate::lang::{Clause, PatternGraph, Query, Statement, ViewDefinition};
use crate::store::PropertyGraph;
use crate::views::ViewCatalog;

#[derive(Debug, Clone, Copy, Default)]
pub struct OptimizerOptions {
    /// Leave out views whose estimated saving is negative.
    pub skip_negative_eff: bool,
}

/// Per-view outcome of one optimization run, in the order views were tried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewAttempt {
    pub view: String,
    pub eff: i64,
    pub rewrites: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub statement: Statement,
    /// One entry per view tried; for a union, counts are summed over parts.
    pub attempts: Vec<ViewAttempt>,
}

impl Optimized {
    pub fn total_rewrites(&self) -> usize {
        self.attempts.iter().map(|a| a.rewrites).sum()
    }

    pub fn rewrites_for(&self, view: &str) -> usize {
        self.attempts.iter().filter(|a| a.view == view).map(|a| a.rewrites).sum()
    }
}

/// The view's match path as a standalone pattern graph.
pub fn view_pattern(def: &ViewDefinition) -> PatternGraph {
    PatternGraph::build(Query {
        clauses: vec![Clause::Match {
            paths: vec![def.match_path.clone()],
            predicates: Vec::new(),
        }],
    })
}

/// Rewrites a query with every view in the catalog, highest estimated
/// saving first, each view applied until it no longer matches.
pub fn optimize_query(query: Query, catalog: &ViewCatalog, graph: &PropertyGraph, opts: OptimizerOptions) -> (Query, Vec<ViewAttempt>) {
    let names: HashSet<String> = catalog.names().map(str::to_string).collect();
    let mut q = PatternGraph::with_view_labels(query, names.clone());
    let order = sort_by_opt_eff(catalog.iter().map(|v| (v.name(), v.stats(graph))));
    let mut attempts = Vec::new();
    for (name, eff) in order {
        if opts.skip_negative_eff && eff < 0 {
            continue;
        }
        let entry = catalog.get(name).expect("sorted view exists");
        let def = &entry.definition;
        let vq = view_pattern(def);
        if vq.edges.iter().any(|e| e.rel_type.as_ref().and_then(|t| t.as_ident()).is_some_and(|t| names.contains(t))) {
            continue;
        }
        let src = if def.edge_reversed() { vq.nodes.len() - 1 } else { 0 };
        let mut rewrites = 0;
        while let Some(m) = match_view(&q, &vq) {
            if change_pg(&mut q, &vq, name, src, &m).is_err() {
                break;
            }
            rewrites += 1;
        }
        attempts.push(ViewAttempt {
            view: name.to_string(),
            eff,
            rewrites,
        });
    }
    (q.into_query(), attempts)
}

/// Applies [`optimize_query`] to a query or to each part of a union.
pub fn optimize(stmt: &Statement, catalog: &ViewCatalog, graph: &PropertyGraph, opts: OptimizerOptions) -> Optimized {
    match stmt {
        Statement::Query(q) => {
            let (q, attempts) = optimize_query(q.clone(), catalog, graph, opts);
            Optimized {
                statement: Statement::Query(q),
                attempts,
            }
        }
        Statement::Union { parts, all } => {
            let mut attempts: Vec<ViewAttempt> = Vec::new();
            let mut out = Vec::new();
            for part in parts {
                let (q, a) = optimize_query(part.clone(), catalog, graph, opts);
                for x in a {
                    match attempts.iter_mut().find(|y| y.view == x.view) {
                        Some(y) => y.rewrites += x.rewrites,
                        None => attempts.push(x),
                    }
                }
                out.push(q);
            }
            Optimized {
                statement: Statement::Union { parts: out, all: *all },
                attempts,
            }
        }
        other => Optimized {
            statement: other.clone(),
            attempts: Vec::new(),
        },
    }
}
