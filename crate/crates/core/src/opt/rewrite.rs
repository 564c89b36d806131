//! Finding a view's path inside a query pattern graph and replacing it with
//! a single view edge.

use crate::lang::{Clause, Name, NodePattern, PatternEdge, PatternGraph, PatternNode, RelDirection, RelPattern};
use crate::{Error, Result};

/// Assignment of view pattern elements to query pattern elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchResult {
    /// Query node for each view node, in view path order.
    pub node_map: Vec<usize>,
    /// Query edge for each view edge, in view path order.
    pub edge_map: Vec<usize>,
}

impl MatchResult {
    pub fn is_complete(&self, vq: &PatternGraph) -> bool {
        self.node_map.len() == vq.nodes.len() && self.edge_map.len() == vq.edges.len()
    }
}

fn same_labels(a: &[Name], b: &[Name]) -> bool {
    a.iter().all(|l| b.contains(l)) && b.iter().all(|l| a.contains(l))
}

fn node_can_match(vn: &PatternNode, n: &PatternNode, interior: bool) -> bool {
    if !same_labels(&vn.labels, &n.labels) {
        return false;
    }
    !interior || (!n.is_referenced && n.degree == 2 && !n.has_properties)
}

fn normalized(r: Option<crate::lang::Range>) -> (u32, Option<u32>) {
    r.map_or((1, Some(1)), |r| (r.min, r.max))
}

fn relp_can_match(ve: &PatternEdge, e: &PatternEdge, from: usize) -> bool {
    ve.rel_type.is_some()
        && ve.rel_type == e.rel_type
        && !e.is_referenced
        && !e.has_properties
        && !e.no_dup
        && ve.direction != RelDirection::Undirected
        && e.direction_from(from) == ve.direction
        && normalized(ve.range) == normalized(e.range)
}

/// First match of the linear view path `vq` in `q`, trying query nodes in
/// pattern order for the start and incident edges in pattern order after.
pub fn match_view(q: &PatternGraph, vq: &PatternGraph) -> Option<MatchResult> {
    if vq.nodes.is_empty() {
        return None;
    }
    let mut m = MatchResult::default();
    for start in 0..q.nodes.len() {
        if !node_can_match(&vq.nodes[0], &q.nodes[start], vq.nodes.len() == 1) {
            continue;
        }
        m.node_map.push(start);
        if extend(q, vq, &mut m) {
            return Some(m);
        }
        m.node_map.pop();
    }
    None
}

/// Extends a partial match by the next view edge; backtracks on failure.
fn extend(q: &PatternGraph, vq: &PatternGraph, m: &mut MatchResult) -> bool {
    let t = m.edge_map.len();
    if t == vq.edges.len() {
        return true;
    }
    let cur = m.node_map[t];
    let last = vq.nodes.len() - 1;
    for e in q.incident(cur) {
        if m.edge_map.contains(&e) || !relp_can_match(&vq.edges[t], &q.edges[e], cur) {
            continue;
        }
        let next = q.edges[e].other(cur);
        if m.node_map.contains(&next) || !node_can_match(&vq.nodes[t + 1], &q.nodes[next], t + 1 != last) {
            continue;
        }
        m.edge_map.push(e);
        m.node_map.push(next);
        if extend(q, vq, m) {
            return true;
        }
        m.edge_map.pop();
        m.node_map.pop();
    }
    false
}

/// Replaces the matched query path with one edge typed `view`, pointing
/// from the match of view node `src_pos` towards the other end.
pub fn change_pg(q: &mut PatternGraph, vq: &PatternGraph, view: &str, src_pos: usize, m: &MatchResult) -> Result<()> {
    if !m.is_complete(vq) || m.edge_map.is_empty() {
        return Err(Error::IncompleteMatch);
    }
    let locs: Vec<_> = m.edge_map.iter().map(|&e| q.edges[e].loc).collect();
    let (clause, path) = (locs[0].clause, locs[0].path);
    if locs.iter().any(|l| l.clause != clause || l.path != path) {
        return Err(Error::Unsupported("view match spans several paths".into()));
    }
    let lo = locs.iter().map(|l| l.segment).min().unwrap_or(0);
    let hi = locs.iter().map(|l| l.segment).max().unwrap_or(0);
    if hi - lo + 1 != locs.len() {
        return Err(Error::Unsupported("view match is not a contiguous path".into()));
    }
    let left = q.edges.iter().find(|e| e.loc.clause == clause && e.loc.path == path && e.loc.segment == lo);
    let left = left.map(|e| e.from).ok_or(Error::IncompleteMatch)?;
    let direction = if m.node_map[src_pos] == left {
        RelDirection::Right
    } else {
        RelDirection::Left
    };
    let Clause::Match { paths, .. } = &mut q.query_mut().clauses[clause] else {
        return Err(Error::IncompleteMatch);
    };
    let p = &mut paths[path];
    let end: NodePattern = p.segments[hi].1.clone();
    let rel = RelPattern::new(Some(Name::Ident(view.to_string())), direction, None);
    p.segments.splice(lo..=hi, [(rel, end)]);
    q.rebuild();
    Ok(())
}
