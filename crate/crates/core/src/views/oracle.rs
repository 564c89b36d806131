//! Brute-force enumeration of view path instances.
//!
//! Walks the graph directly through the store API, without the planner,
//! the matcher or the maintenance templates, so it can serve as a reference
//! for all three.

use crate::lang::{PathPattern, RelDirection, ViewDefinition};
use crate::store::{Direction, EdgeId, NodeId, PropertyGraph};

/// One match of a view path: node ids by position and the edges walked by
/// each relationship pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Vec<EdgeId>>,
}

/// Every instance of `path`, with no edge used twice within an instance.
pub fn enumerate_instances(graph: &PropertyGraph, path: &PathPattern) -> Vec<Instance> {
    let labels: Vec<Option<&str>> = path
        .nodes()
        .map(|n| n.labels.first().and_then(|l| l.as_ident()))
        .collect();
    let mut out = Vec::new();
    for node in graph.nodes() {
        if !label_ok(graph, labels[0], node.id) {
            continue;
        }
        let mut inst = Instance {
            nodes: vec![node.id],
            edges: Vec::new(),
        };
        walk_segment(graph, path, &labels, 0, &mut inst, &mut out);
    }
    out.sort();
    out
}

fn label_ok(graph: &PropertyGraph, label: Option<&str>, n: NodeId) -> bool {
    match (label, graph.node(n)) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(l), Some(node)) => graph.label_name(node.label) == l,
    }
}

fn walk_segment(
    graph: &PropertyGraph,
    path: &PathPattern,
    labels: &[Option<&str>],
    seg: usize,
    inst: &mut Instance,
    out: &mut Vec<Instance>,
) {
    if seg == path.segments.len() {
        out.push(inst.clone());
        return;
    }
    let rel = &path.segments[seg].0;
    let (min, max) = match rel.range {
        None => (1, Some(1)),
        Some(r) => (r.min, r.max),
    };
    let dir = match rel.direction {
        RelDirection::Right => Direction::Out,
        RelDirection::Left => Direction::In,
        RelDirection::Undirected => Direction::Both,
    };
    let ty = rel.rel_type.as_ref().and_then(|t| t.as_ident());
    let start = *inst.nodes.last().expect("path has a start node");
    inst.edges.push(Vec::new());
    walk_hops(graph, path, labels, seg, (min, max), dir, ty, start, inst, out);
    inst.edges.pop();
}

#[allow(clippy::too_many_arguments)]
fn walk_hops(
    graph: &PropertyGraph,
    path: &PathPattern,
    labels: &[Option<&str>],
    seg: usize,
    (min, max): (u32, Option<u32>),
    dir: Direction,
    ty: Option<&str>,
    cur: NodeId,
    inst: &mut Instance,
    out: &mut Vec<Instance>,
) {
    let hops = inst.edges[seg].len() as u32;
    if hops >= min && label_ok(graph, labels[seg + 1], cur) {
        inst.nodes.push(cur);
        walk_segment(graph, path, labels, seg + 1, inst, out);
        inst.nodes.pop();
    }
    if max.is_some_and(|m| hops >= m) {
        return;
    }
    for (edge, next) in graph.incident_edges(cur, dir, ty).unwrap_or_default() {
        if inst.edges.iter().flatten().any(|e| *e == edge) {
            continue;
        }
        inst.edges[seg].push(edge);
        walk_hops(graph, path, labels, seg, (min, max), dir, ty, next, inst, out);
        inst.edges[seg].pop();
    }
}

/// The (source, destination) pairs a view should hold, one per instance.
pub fn recompute_view_edges(graph: &PropertyGraph, def: &ViewDefinition) -> Vec<(NodeId, NodeId)> {
    let reversed = def.edge_reversed();
    let mut pairs: Vec<(NodeId, NodeId)> = enumerate_instances(graph, &def.match_path)
        .into_iter()
        .map(|i| {
            let (a, b) = (i.nodes[0], *i.nodes.last().unwrap());
            if reversed {
                (b, a)
            } else {
                (a, b)
            }
        })
        .collect();
    pairs.sort();
    pairs
}
