//! Materialized path views: catalog, creation, incremental maintenance and
//! consistency checking.

mod maintain;
pub mod oracle;
pub mod templates;

use std::collections::{BTreeMap, HashMap};

pub use maintain::CatalogHooks;
pub use templates::{Template, TemplateKind, TemplateSet};

use crate::exec::{self, ExecOptions, Value, WriteMode};
use crate::lang::{self, Clause, PathPattern, Query, ReturnItem, Statement, ViewDefinition};
use crate::opt::ViewStats;
use crate::store::{LabelId, LabelKind, NoHooks, NodeId, PropertyGraph};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ViewEntry {
    pub definition: ViewDefinition,
    pub label: LabelId,
    pub templates: TemplateSet,
    /// Label of the view edge's source node, if the path constrains it.
    pub start_label: Option<LabelId>,
    pub initial_db_hit: u64,
    pub opt_rate: f64,
}

impl ViewEntry {
    pub fn name(&self) -> &str {
        &self.definition.name
    }

    /// Cost counters against the live graph.
    pub fn stats(&self, graph: &PropertyGraph) -> ViewStats {
        let n = match self.start_label {
            Some(l) => graph.label_count(l).nodes,
            None => graph.node_count() as u64,
        };
        ViewStats {
            n_start_label: n,
            e_view_label: graph.label_count(self.label).edges,
            opt_rate: self.opt_rate,
            initial_db_hit: self.initial_db_hit,
        }
    }

    pub fn edge_count(&self, graph: &PropertyGraph) -> u64 {
        graph.label_count(self.label).edges
    }

    /// Live view edges as sorted (source, destination) pairs.
    pub fn edge_pairs(&self, graph: &PropertyGraph) -> Vec<(NodeId, NodeId)> {
        let mut pairs: Vec<_> = graph
            .edges_with_label(self.label)
            .filter_map(|e| graph.edge(e))
            .map(|e| (e.src, e.dst))
            .collect();
        pairs.sort();
        pairs
    }
}

/// Result of materializing a new view.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewCreation {
    pub name: String,
    pub edges: u64,
    pub initial_db_hit: u64,
    pub opt_rate: f64,
    /// Delete-node, create-edge and delete-edge template counts.
    pub templates: (usize, usize, usize),
}

/// Difference between the stored view edges and a fresh recomputation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub view: String,
    pub expected: usize,
    pub actual: usize,
    /// Pairs the recomputation has more often than the view, with multiplicity.
    pub missing: Vec<(NodeId, NodeId)>,
    /// Pairs the view has more often than the recomputation.
    pub extra: Vec<(NodeId, NodeId)>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl std::fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_consistent() {
            return write!(f, "{}: consistent ({} edges)", self.view, self.actual);
        }
        write!(
            f,
            "{}: INCONSISTENT (expected {}, stored {}, {} missing, {} extra)",
            self.view,
            self.expected,
            self.actual,
            self.missing.len(),
            self.extra.len()
        )?;
        for (s, d) in self.missing.iter().take(10) {
            write!(f, "\n  missing {s} -> {d}")?;
        }
        for (s, d) in self.extra.iter().take(10) {
            write!(f, "\n  extra   {s} -> {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ViewCatalog {
    views: BTreeMap<String, ViewEntry>,
}

impl ViewCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&ViewEntry> {
        self.views.get(name)
    }

    /// Views in name order.
    pub fn iter(&self) -> impl Iterator<Item = &ViewEntry> {
        self.views.values()
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.views.keys().map(String::as_str)
    }

    /// Hooks that keep every view in this catalog up to date.
    pub fn hooks(&self, max_hops: Option<u32>) -> CatalogHooks<'_> {
        CatalogHooks::new(self, max_hops)
    }

    /// Validates, materializes and registers a view.
    pub fn create(&mut self, graph: &mut PropertyGraph, def: ViewDefinition, max_hops: Option<u32>) -> Result<ViewCreation> {
        lang::validate_view(&def).map_err(Error::InvalidViewDefinition)?;
        if self.views.contains_key(&def.name) {
            return Err(Error::DuplicateViewName(def.name.clone()));
        }
        if graph.schema().resolve(&def.name).is_some() {
            return Err(Error::InvalidViewDefinition(format!(
                "`{}` is already a label of the graph",
                def.name
            )));
        }
        check_path_labels(graph, &def.match_path)?;

        let (src, _) = def.edge_endpoints();
        let start_label = def
            .match_path
            .nodes()
            .find(|n| n.variable.as_deref() == Some(src))
            .and_then(|n| n.labels.first())
            .and_then(|l| l.as_ident())
            .map(|l| graph.resolve_label(l))
            .transpose()?;

        let (rows, initial_db_hit) = materialize(graph, &def, max_hops)?;
        let label = graph.register_view_label(&def.name)?;
        for (s, d) in &rows {
            graph.insert_view_edge(*s, *d, label)?;
        }
        let stats = ViewStats::at_creation(
            initial_db_hit,
            start_label.map_or(graph.node_count() as u64, |l| graph.label_count(l).nodes),
            rows.len() as u64,
        );
        let templates = TemplateSet::generate(&def);
        let creation = ViewCreation {
            name: def.name.clone(),
            edges: rows.len() as u64,
            initial_db_hit,
            opt_rate: stats.opt_rate,
            templates: templates.counts(),
        };
        self.views.insert(
            def.name.clone(),
            ViewEntry {
                definition: def,
                label,
                templates,
                start_label,
                initial_db_hit,
                opt_rate: stats.opt_rate,
            },
        );
        Ok(creation)
    }

    /// Removes a view and its edges. Returns the number of edges removed.
    pub fn drop_view(&mut self, graph: &mut PropertyGraph, name: &str) -> Result<u64> {
        let entry = self.views.remove(name).ok_or_else(|| Error::NoSuchView(name.to_string()))?;
        let edges: Vec<_> = graph.edges_with_label(entry.label).collect();
        for e in &edges {
            graph.remove_view_edge(*e)?;
        }
        graph.unregister_view_label(entry.label);
        Ok(edges.len() as u64)
    }

    /// Compares a view's edges with a brute-force recomputation.
    pub fn check_consistency(&self, graph: &PropertyGraph, name: &str) -> Result<ConsistencyReport> {
        let entry = self.get(name).ok_or_else(|| Error::NoSuchView(name.to_string()))?;
        let expected = oracle::recompute_view_edges(graph, &entry.definition);
        let actual = entry.edge_pairs(graph);
        let mut balance: HashMap<(NodeId, NodeId), i64> = HashMap::new();
        for p in &expected {
            *balance.entry(*p).or_default() += 1;
        }
        for p in &actual {
            *balance.entry(*p).or_default() -= 1;
        }
        let mut report = ConsistencyReport {
            view: name.to_string(),
            expected: expected.len(),
            actual: actual.len(),
            ..Default::default()
        };
        for (p, n) in balance {
            let list = if n > 0 { &mut report.missing } else { &mut report.extra };
            list.extend(std::iter::repeat(p).take(n.unsigned_abs() as usize));
        }
        report.missing.sort();
        report.extra.sort();
        Ok(report)
    }
}

/// Every label in the path must be a base label of the right kind.
fn check_path_labels(graph: &PropertyGraph, path: &PathPattern) -> Result<()> {
    let schema = graph.schema();
    let kind_of = |name: &str| -> Result<&LabelKind> {
        let id = graph.resolve_label(name)?;
        Ok(schema.kind(id))
    };
    for n in path.nodes() {
        for l in n.labels.iter().filter_map(|l| l.as_ident()) {
            match kind_of(l)? {
                LabelKind::Node { .. } => {}
                LabelKind::View => {
                    return Err(Error::InvalidViewDefinition(format!("`{l}` is a view; views over views are not supported")))
                }
                LabelKind::Edge => return Err(Error::InvalidViewDefinition(format!("`{l}` is not a node label"))),
            }
        }
    }
    for r in path.rels() {
        if let Some(t) = r.rel_type.as_ref().and_then(|t| t.as_ident()) {
            match kind_of(t)? {
                LabelKind::Edge => {}
                LabelKind::View => {
                    return Err(Error::InvalidViewDefinition(format!("`{t}` is a view; views over views are not supported")))
                }
                LabelKind::Node { .. } => {
                    return Err(Error::InvalidViewDefinition(format!("`{t}` is not a relationship type")))
                }
            }
        }
    }
    Ok(())
}

/// Runs the view path once; returns view edge endpoints and the DB hits spent.
fn materialize(
    graph: &mut PropertyGraph,
    def: &ViewDefinition,
    max_hops: Option<u32>,
) -> Result<(Vec<(NodeId, NodeId)>, u64)> {
    let (src, dst) = def.edge_endpoints();
    let q = Query {
        clauses: vec![
            Clause::Match {
                paths: vec![def.match_path.clone()],
                predicates: Vec::new(),
            },
            Clause::Return {
                items: vec![ReturnItem::Var(src.to_string()), ReturnItem::Var(dst.to_string())],
            },
        ],
    };
    let opts = ExecOptions {
        mode: WriteMode::User,
        max_hops,
    };
    let (result, report) = exec::profile(graph, &Statement::Query(q), &mut NoHooks, opts)?;
    let rows = result
        .rows
        .into_iter()
        .map(|r| match (&r[0], &r[1]) {
            (Value::Node(s), Value::Node(d)) => (*s, *d),
            _ => unreachable!("view endpoints are nodes"),
        })
        .collect();
    Ok((rows, report.total_db_hits()))
}
