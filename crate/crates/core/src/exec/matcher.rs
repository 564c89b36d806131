//! Depth-first pattern matching over compiled MATCH plans.

use std::collections::HashSet;

use super::plan::{Anchor, LabelMatch, MatchPlan, NodeSpec, PostFilter, RelSpec, RelTypes, Step};
use super::{OpCounter, Row, Value};
use crate::store::{Direction, EdgeId, NodeId, PropertyGraph};

pub(crate) struct Matcher<'a> {
    pub graph: &'a PropertyGraph,
    pub plan: &'a MatchPlan,
    pub counters: &'a mut [OpCounter],
    pub claimed: &'a mut HashSet<EdgeId>,
    pub out: &'a mut Vec<Row>,
    pub max_hops: Option<u32>,
    row: Row,
    /// Edges bound so far in the current row; no edge may repeat.
    used: Vec<EdgeId>,
}

impl<'a> Matcher<'a> {
    pub fn new(
        graph: &'a PropertyGraph,
        plan: &'a MatchPlan,
        counters: &'a mut [OpCounter],
        claimed: &'a mut HashSet<EdgeId>,
        out: &'a mut Vec<Row>,
        max_hops: Option<u32>,
    ) -> Self {
        Matcher {
            graph,
            plan,
            counters,
            claimed,
            out,
            max_hops,
            row: Vec::new(),
            used: Vec::new(),
        }
    }

    /// Extends `input` with every match of the clause.
    pub fn run(&mut self, input: Row) {
        self.row = input;
        self.used.clear();
        self.step(0);
    }

    fn hit(&mut self, k: usize, n: u64) {
        let op = self.plan.step_ops[k];
        self.counters[op].db_hits += n;
    }

    fn produced(&mut self, k: usize) {
        let op = self.plan.step_ops[k];
        self.counters[op].rows += 1;
    }

    /// Returns false once the search for the current input row should stop.
    fn step(&mut self, k: usize) -> bool {
        if k == self.plan.steps.len() {
            return self.emit();
        }
        let plan = self.plan;
        match plan.steps[k] {
            Step::Anchor { path } => self.anchor(k, path),
            Step::Expand { path, seg, forward } => {
                let p = &plan.paths[path];
                let (from, to) = if forward { (seg, seg + 1) } else { (seg + 1, seg) };
                let Some(Value::Node(cur)) = self.row[p.nodes[from].slot] else {
                    unreachable!("expansion from an unbound node")
                };
                let rel = &p.rels[seg];
                let dir = if forward { rel.dir } else { reverse(rel.dir) };
                match rel.range {
                    None => self.expand_one(k, rel, &p.nodes[to], cur, dir),
                    Some((min, max)) => {
                        let mut trail = Vec::new();
                        self.expand_var(k, rel, &p.nodes[to], cur, dir, forward, (min, max), &mut trail)
                    }
                }
            }
        }
    }

    fn emit(&mut self) -> bool {
        let plan = self.plan;
        for (slot, f) in &plan.post_filters {
            let ok = match (&self.row[*slot], f) {
                (Some(Value::Node(n)), PostFilter::Prop(k, v)) => {
                    self.graph.node(*n).and_then(|n| n.properties.get(k)) == Some(v)
                }
                (Some(Value::Edge(e)), PostFilter::Prop(k, v)) => {
                    self.graph.edge(*e).and_then(|e| e.properties.get(k)) == Some(v)
                }
                (Some(Value::Node(n)), PostFilter::Id(id)) => n.0 == *id,
                (Some(Value::Edge(e)), PostFilter::Id(id)) => e.0 == *id,
                _ => false,
            };
            if !ok {
                return true;
            }
        }
        if let Some(op) = self.plan.filter_op {
            self.counters[op].rows += 1;
        }
        if self.plan.no_dup_slots.is_empty() {
            self.out.push(self.row.clone());
            return true;
        }
        // At most one row per input, never reusing an edge claimed earlier.
        let mut edges = Vec::new();
        for &s in &plan.no_dup_slots {
            match &self.row[s] {
                Some(Value::Edge(e)) => edges.push(*e),
                Some(Value::Path(p)) => edges.extend(p.iter().copied()),
                _ => {}
            }
        }
        if edges.iter().any(|e| self.claimed.contains(e)) {
            return true;
        }
        self.claimed.extend(edges);
        self.out.push(self.row.clone());
        false
    }

    fn anchor(&mut self, k: usize, path: usize) -> bool {
        let plan = self.plan;
        let p = &plan.paths[path];
        let spec = &p.nodes[p.anchor];
        match &p.anchor_mode {
            Anchor::Empty => true,
            Anchor::Bound => match self.row[spec.slot] {
                Some(Value::Node(n)) => self.try_node(k, spec, n),
                _ => unreachable!("bound anchor without a binding"),
            },
            Anchor::IdSeek(id) => {
                self.hit(k, 1);
                let n = NodeId(*id);
                if self.graph.contains_node(n) {
                    self.try_node(k, spec, n)
                } else {
                    true
                }
            }
            Anchor::PkSeek(label, value) => {
                self.hit(k, 1);
                match self.graph.lookup_pk_id(*label, value) {
                    Some(n) => self.try_node(k, spec, n),
                    None => true,
                }
            }
            Anchor::LabelScan(label) => {
                let graph = self.graph;
                for n in graph.nodes_with_label(*label) {
                    self.hit(k, 1);
                    if !self.try_node(k, spec, n) {
                        return false;
                    }
                }
                true
            }
            Anchor::AllScan => {
                let graph = self.graph;
                for n in graph.nodes() {
                    self.hit(k, 1);
                    if !self.try_node(k, spec, n.id) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Binds `n` at a node position (or checks an existing binding) and continues.
    fn try_node(&mut self, k: usize, spec: &NodeSpec, n: NodeId) -> bool {
        if !node_ok(self.graph, spec, n) {
            return true;
        }
        match self.row[spec.slot] {
            Some(Value::Node(b)) if b == n => {
                self.produced(k);
                self.step(k + 1)
            }
            Some(_) => true,
            None => {
                self.row[spec.slot] = Some(Value::Node(n));
                self.produced(k);
                let go = self.step(k + 1);
                self.row[spec.slot] = None;
                go
            }
        }
    }

    fn expand_one(&mut self, k: usize, rel: &RelSpec, to: &NodeSpec, cur: NodeId, dir: Direction) -> bool {
        let graph = self.graph;
        let mut go = true;
        graph.visit_incident(cur, dir, type_filter(&rel.types), |e, nb| {
            self.hit(k, 1);
            if self.used.contains(&e) || !rel_ok(graph, rel, e) {
                return true;
            }
            self.hit(k, 1);
            let prior = self.row[rel.slot].clone();
            match &prior {
                Some(Value::Edge(b)) if *b != e => return true,
                Some(Value::Edge(_)) | None => {}
                Some(_) => return true,
            }
            self.row[rel.slot] = Some(Value::Edge(e));
            self.used.push(e);
            go = self.try_node(k, to, nb);
            self.used.pop();
            self.row[rel.slot] = prior;
            go
        });
        go
    }

    #[allow(clippy::too_many_arguments)]
    fn expand_var(
        &mut self,
        k: usize,
        rel: &RelSpec,
        to: &NodeSpec,
        cur: NodeId,
        dir: Direction,
        forward: bool,
        (min, max): (u32, Option<u32>),
        trail: &mut Vec<EdgeId>,
    ) -> bool {
        let depth = trail.len() as u32;
        if depth >= min {
            let mut path = trail.clone();
            if !forward {
                path.reverse();
            }
            let prior = self.row[rel.slot].take();
            let consistent = match &prior {
                None => true,
                Some(Value::Path(b)) => *b == path,
                Some(_) => false,
            };
            if consistent {
                self.row[rel.slot] = Some(Value::Path(path));
                let go = self.try_node(k, to, cur);
                self.row[rel.slot] = prior;
                if !go {
                    return false;
                }
            } else {
                self.row[rel.slot] = prior;
            }
        }
        let limit = match (max, self.max_hops) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if limit.is_some_and(|l| depth >= l) {
            return true;
        }
        let graph = self.graph;
        let mut go = true;
        graph.visit_incident(cur, dir, type_filter(&rel.types), |e, nb| {
            self.hit(k, 1);
            if self.used.contains(&e) || !rel_ok(graph, rel, e) {
                return true;
            }
            self.hit(k, 1);
            self.used.push(e);
            trail.push(e);
            go = self.expand_var(k, rel, to, nb, dir, forward, (min, max), trail);
            trail.pop();
            self.used.pop();
            go
        });
        go
    }
}

fn reverse(d: Direction) -> Direction {
    match d {
        Direction::Out => Direction::In,
        Direction::In => Direction::Out,
        Direction::Both => Direction::Both,
    }
}

fn type_filter(t: &RelTypes) -> Option<crate::store::LabelId> {
    match t {
        RelTypes::One(l) => Some(*l),
        _ => None,
    }
}

fn node_ok(graph: &PropertyGraph, spec: &NodeSpec, n: NodeId) -> bool {
    let Some(node) = graph.node(n) else { return false };
    match spec.label {
        LabelMatch::Any => {}
        LabelMatch::One(l) if l == node.label => {}
        _ => return false,
    }
    if spec.id_eq.is_some_and(|id| id != n.0) {
        return false;
    }
    spec.props.iter().all(|(k, v)| node.properties.get(k) == Some(v))
}

fn rel_ok(graph: &PropertyGraph, rel: &RelSpec, e: EdgeId) -> bool {
    if rel.id_eq.is_some_and(|id| id != e.0) {
        return false;
    }
    if rel.props.is_empty() {
        return true;
    }
    let Some(edge) = graph.edge(e) else { return false };
    rel.props.iter().all(|(k, v)| edge.properties.get(k) == Some(v))
}
