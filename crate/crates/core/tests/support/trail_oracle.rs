//! Reference matcher for single-path patterns: enumerate every walk by brute
//! force and keep those that never reuse an edge.

#![allow(dead_code)]

use std::collections::BTreeMap;

use pgview_core::store::{EdgeId, NodeId, PropertyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Right,
    Left,
    Both,
}

#[derive(Debug, Clone)]
pub struct Seg {
    pub ty: Option<String>,
    pub dir: Dir,
    /// `None` is a plain single edge; otherwise (min, max).
    pub range: Option<(u32, Option<u32>)>,
}

#[derive(Debug, Clone)]
pub struct Pattern {
    /// Label per node position.
    pub labels: Vec<Option<String>>,
    /// Variable per node position; equal names must bind equal nodes.
    pub vars: Vec<String>,
    pub segs: Vec<Seg>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    Node(NodeId),
    Edge(EdgeId),
    Path(Vec<EdgeId>),
}

impl Pattern {
    pub fn to_cypher(&self) -> String {
        let node = |i: usize| match &self.labels[i] {
            Some(l) => format!("({}:{l})", self.vars[i]),
            None => format!("({})", self.vars[i]),
        };
        let mut s = format!("MATCH {}", node(0));
        for (i, seg) in self.segs.iter().enumerate() {
            let ty = seg.ty.as_ref().map(|t| format!(":{t}")).unwrap_or_default();
            let range = match seg.range {
                None => String::new(),
                Some((a, Some(b))) if a == b => format!("*{a}"),
                Some((a, Some(b))) => format!("*{a}..{b}"),
                Some((a, None)) => format!("*{a}.."),
            };
            let body = format!("[r{i}{ty}{range}]");
            let rel = match seg.dir {
                Dir::Right => format!("-{body}->"),
                Dir::Left => format!("<-{body}-"),
                Dir::Both => format!("-{body}-"),
            };
            s.push_str(&rel);
            s.push_str(&node(i + 1));
        }
        let mut cols: Vec<String> = Vec::new();
        for i in 0..self.vars.len() {
            if !cols.contains(&self.vars[i]) {
                cols.push(self.vars[i].clone());
            }
            if i < self.segs.len() {
                cols.push(format!("r{i}"));
            }
        }
        s.push_str(" RETURN ");
        s.push_str(&cols.join(", "));
        s
    }

    /// Cells in the column order of [`Pattern::to_cypher`].
    fn row(&self, nodes: &[NodeId], rels: &[Vec<EdgeId>]) -> Vec<Cell> {
        let mut seen: Vec<&str> = Vec::new();
        let mut out = Vec::new();
        for i in 0..self.vars.len() {
            if !seen.contains(&self.vars[i].as_str()) {
                seen.push(&self.vars[i]);
                out.push(Cell::Node(nodes[i]));
            }
            if i < self.segs.len() {
                out.push(match self.segs[i].range {
                    None => Cell::Edge(rels[i][0]),
                    Some(_) => Cell::Path(rels[i].clone()),
                });
            }
        }
        out
    }
}

/// Every row of the pattern, sorted. `hop_cap` bounds unbounded ranges.
pub fn enumerate(graph: &PropertyGraph, p: &Pattern, hop_cap: u32) -> Vec<Vec<Cell>> {
    let mut rows = Vec::new();
    let all: Vec<NodeId> = graph.nodes().map(|n| n.id).collect();
    for &start in &all {
        let mut nodes = vec![start];
        let mut rels = Vec::new();
        extend(graph, p, hop_cap, &mut nodes, &mut rels, &mut rows);
    }
    rows.sort();
    rows
}

fn label_ok(graph: &PropertyGraph, label: &Option<String>, n: NodeId) -> bool {
    match label {
        None => true,
        Some(l) => graph.label_name(graph.node(n).unwrap().label) == l,
    }
}

fn extend(
    graph: &PropertyGraph,
    p: &Pattern,
    cap: u32,
    nodes: &mut Vec<NodeId>,
    rels: &mut Vec<Vec<EdgeId>>,
    rows: &mut Vec<Vec<Cell>>,
) {
    let i = nodes.len() - 1;
    if !label_ok(graph, &p.labels[i], nodes[i]) {
        return;
    }
    let mut binding: BTreeMap<&str, NodeId> = BTreeMap::new();
    for (v, n) in p.vars.iter().zip(nodes.iter()) {
        if *binding.entry(v).or_insert(*n) != *n {
            return;
        }
    }
    if i == p.segs.len() {
        rows.push(p.row(nodes, rels));
        return;
    }
    let seg = &p.segs[i];
    let (min, max) = seg.range.unwrap_or((1, Some(1)));
    let max = max.unwrap_or(cap).min(cap.max(min));
    for len in min..=max {
        for (walk, end) in walks(graph, seg, nodes[i], len) {
            if walk.iter().any(|e| rels.iter().flatten().any(|u| u == e)) {
                continue;
            }
            let mut distinct = walk.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() != walk.len() {
                continue;
            }
            nodes.push(end);
            rels.push(walk);
            extend(graph, p, cap, nodes, rels, rows);
            rels.pop();
            nodes.pop();
        }
    }
}

/// All walks of exactly `len` distinct edges from `from`.
fn walks(graph: &PropertyGraph, seg: &Seg, from: NodeId, len: u32) -> Vec<(Vec<EdgeId>, NodeId)> {
    let mut frontier = vec![(Vec::new(), from)];
    for _ in 0..len {
        let mut next = Vec::new();
        for (walk, at) in frontier {
            for e in graph.edges() {
                if e.is_view || walk.contains(&e.id) {
                    continue;
                }
                if let Some(t) = &seg.ty {
                    if graph.label_name(e.label) != t {
                        continue;
                    }
                }
                let mut step = |to: NodeId| {
                    let mut w = walk.clone();
                    w.push(e.id);
                    next.push((w, to));
                };
                match seg.dir {
                    Dir::Right if e.src == at => step(e.dst),
                    Dir::Left if e.dst == at => step(e.src),
                    Dir::Both => {
                        if e.src == at {
                            step(e.dst);
                        } else if e.dst == at {
                            step(e.src);
                        }
                    }
                    _ => {}
                }
            }
        }
        frontier = next;
    }
    frontier
}
