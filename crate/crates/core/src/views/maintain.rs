//! Incremental maintenance: instantiate each template for the event, match
//! it, drop rows describing an instance already handled for this event, and
//! run the create or delete action for the rest.

use std::collections::HashSet;

use super::templates::{instantiate, Bindings, Template, TemplateKind};
use super::{ViewCatalog, ViewEntry};
use crate::exec::plan::ClausePlan;
use crate::exec::{self, CompiledQuery, ExecOptions, OpCounter, Value, WriteMode};
use crate::lang::Name;
use crate::store::{EdgeId, MaintenanceHooks, MaintenanceOutcome, NoHooks, NodeId, PropertyGraph, PropertyValue};
use crate::{Error, Result};

/// A view path instance: node ids by position and the edges behind each
/// view relationship.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GraphInstanceKey {
    nodes: Vec<NodeId>,
    edges: Vec<Vec<EdgeId>>,
}

/// Maintenance hooks over every view in a catalog.
pub struct CatalogHooks<'a> {
    catalog: &'a ViewCatalog,
    max_hops: Option<u32>,
}

impl<'a> CatalogHooks<'a> {
    pub fn new(catalog: &'a ViewCatalog, max_hops: Option<u32>) -> Self {
        CatalogHooks { catalog, max_hops }
    }
}

enum Event<'n> {
    DeleteNode { label: &'n str },
    Edge { label: &'n str },
}

impl MaintenanceHooks for CatalogHooks<'_> {
    type Error = Error;

    fn before_delete_node(&mut self, graph: &mut PropertyGraph, id: NodeId) -> Result<MaintenanceOutcome> {
        let node = graph.node(id).ok_or(crate::store::StoreError::NoSuchNode(id))?;
        let label = graph.label_name(node.label).to_string();
        let (key, value) = pk_of(graph, id)?;
        let bindings = Bindings {
            names: vec![("L", label.clone()), ("K", key)],
            values: vec![("V", value)],
        };
        let mut total = MaintenanceOutcome::default();
        for entry in self.catalog.iter() {
            let event = Event::DeleteNode { label: &label };
            total += run_templates(graph, entry, &entry.templates.delete_node, &bindings, &event, self.max_hops)?;
        }
        Ok(total)
    }

    fn after_create_edge(&mut self, graph: &mut PropertyGraph, id: EdgeId) -> Result<MaintenanceOutcome> {
        self.edge_event(graph, id, true)
    }

    fn before_delete_edge(&mut self, graph: &mut PropertyGraph, id: EdgeId) -> Result<MaintenanceOutcome> {
        self.edge_event(graph, id, false)
    }
}

impl CatalogHooks<'_> {
    fn edge_event(&mut self, graph: &mut PropertyGraph, id: EdgeId, create: bool) -> Result<MaintenanceOutcome> {
        let edge = graph.edge(id).ok_or(crate::store::StoreError::NoSuchEdge(id))?;
        let (src, dst) = (edge.src, edge.dst);
        let label = graph.label_name(edge.label).to_string();
        let (sk, sv) = pk_of(graph, src)?;
        let (dk, dv) = pk_of(graph, dst)?;
        let name_of = |n: NodeId| graph.node(n).map(|n| graph.label_name(n.label).to_string()).unwrap_or_default();
        let bindings = Bindings {
            names: vec![("SL", name_of(src)), ("SK", sk), ("DL", name_of(dst)), ("DK", dk)],
            values: vec![("SV", sv), ("DV", dv), ("RID", PropertyValue::Int(id.0 as i64))],
        };
        let mut total = MaintenanceOutcome::default();
        for entry in self.catalog.iter() {
            let templates = if create {
                &entry.templates.create_edge
            } else {
                &entry.templates.delete_edge
            };
            let event = Event::Edge { label: &label };
            total += run_templates(graph, entry, templates, &bindings, &event, self.max_hops)?;
        }
        Ok(total)
    }
}

fn pk_of(graph: &PropertyGraph, id: NodeId) -> Result<(String, PropertyValue)> {
    let node = graph.node(id).ok_or(crate::store::StoreError::NoSuchNode(id))?;
    let key = graph
        .schema()
        .primary_key(node.label)
        .ok_or_else(|| Error::Unsupported(format!("label {} has no primary key", graph.label_name(node.label))))?;
    let value = node.properties.get(key).cloned().ok_or_else(|| crate::store::StoreError::MissingPrimaryKey {
        label: graph.label_name(node.label).to_string(),
        key: key.to_string(),
    })?;
    Ok((key.to_string(), value))
}

/// False when a template cannot match this event because the element it
/// pins has a different label than the one that changed.
fn applies(entry: &ViewEntry, t: &Template, event: &Event<'_>) -> bool {
    let path = &entry.definition.match_path;
    match (t.kind, event) {
        (TemplateKind::ReplNode { pos }, Event::DeleteNode { label }) => {
            path.node(pos).labels.first().and_then(Name::as_ident).is_none_or(|l| l == *label)
        }
        (TemplateKind::ReplNodeInVlen { .. }, Event::DeleteNode { .. }) => true,
        (TemplateKind::ReplEdge { edge } | TemplateKind::ReplEdgeInVlen { edge, .. }, Event::Edge { label, .. }) => {
            path.segments[edge].0.rel_type.as_ref().and_then(Name::as_ident).is_none_or(|l| l == *label)
        }
        _ => false,
    }
}

fn run_templates(
    graph: &mut PropertyGraph,
    entry: &ViewEntry,
    templates: &[Template],
    bindings: &Bindings,
    event: &Event<'_>,
    max_hops: Option<u32>,
) -> Result<MaintenanceOutcome> {
    let mut outcome = MaintenanceOutcome::default();
    let mut seen: HashSet<GraphInstanceKey> = HashSet::new();
    for t in templates.iter().filter(|t| applies(entry, t, event)) {
        let query = instantiate(&t.statement, bindings);
        let plan = CompiledQuery::compile(graph, &query)?;
        let mut counters = vec![OpCounter::default(); plan.ops.len()];
        let ClausePlan::Match(first) = &plan.clauses[0] else {
            unreachable!("templates start with MATCH")
        };
        let (node_slots, rel_slots) = plan.layout(0, 0).expect("template path layout").clone();
        let rows = exec::match_rows(graph, first, vec![vec![None; plan.slot_count]], &mut counters, max_hops);
        let rows: Vec<_> = rows
            .into_iter()
            .filter(|row| {
                let key = GraphInstanceKey {
                    nodes: t
                        .node_map
                        .iter()
                        .map(|&p| match &row[node_slots[p]] {
                            Some(Value::Node(n)) => *n,
                            _ => unreachable!("matched node slot"),
                        })
                        .collect(),
                    edges: t
                        .edge_map
                        .iter()
                        .map(|segs| {
                            let mut es = Vec::new();
                            for &s in segs {
                                match &row[rel_slots[s]] {
                                    Some(Value::Edge(e)) => es.push(*e),
                                    Some(Value::Path(p)) => es.extend_from_slice(p),
                                    _ => unreachable!("matched relationship slot"),
                                }
                            }
                            es
                        })
                        .collect(),
                };
                seen.insert(key)
            })
            .collect();
        let opts = ExecOptions {
            mode: WriteMode::Maintenance,
            max_hops,
        };
        let result = exec::run_clauses(graph, &plan, 1, rows, &mut NoHooks, opts, &mut counters)?;
        outcome.view_edges_created += result.summary.view_edges_created;
        outcome.view_edges_deleted += result.summary.view_edges_deleted;
        outcome.db_hits += counters.iter().map(|c| c.db_hits).sum::<u64>();
    }
    Ok(outcome)
}
