use std::collections::{HashMap, HashSet};

use super::ast::*;

/// Where a pattern edge lives in the owning query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeLoc {
    pub clause: usize,
    pub path: usize,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNode {
    pub variable: Option<String>,
    pub labels: Vec<Name>,
    pub has_properties: bool,
    pub is_referenced: bool,
    /// Number of pattern edge endpoints at this node; a self-loop counts twice.
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub variable: Option<String>,
    pub rel_type: Option<Name>,
    /// Endpoints in written order: `from` is the node left of the edge.
    pub from: usize,
    pub to: usize,
    pub direction: RelDirection,
    pub range: Option<Range>,
    pub no_dup: bool,
    pub has_properties: bool,
    pub is_referenced: bool,
    pub is_view_edge: bool,
    pub loc: EdgeLoc,
}

impl PatternEdge {
    /// Endpoint opposite `node`.
    pub fn other(&self, node: usize) -> usize {
        if self.from == node {
            self.to
        } else {
            self.from
        }
    }

    /// Direction of the edge when walked starting at `node`.
    pub fn direction_from(&self, node: usize) -> RelDirection {
        if self.from == node {
            self.direction
        } else {
            self.direction.reversed()
        }
    }
}

/// Graph view of a query's MATCH patterns. Variables shared between paths
/// or clauses unify into one node. The graph keeps the query it was built
/// from so rewrites can be applied to the text-level AST.
#[derive(Debug, Clone)]
pub struct PatternGraph {
    query: Query,
    view_labels: HashSet<String>,
    pub nodes: Vec<PatternNode>,
    pub edges: Vec<PatternEdge>,
}

impl PatternGraph {
    pub fn build(query: Query) -> Self {
        Self::with_view_labels(query, HashSet::new())
    }

    /// Builds the graph, flagging edges whose type is one of `view_labels`.
    pub fn with_view_labels(query: Query, view_labels: HashSet<String>) -> Self {
        let mut pg = PatternGraph {
            query,
            view_labels,
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        pg.rebuild();
        pg
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn into_query(self) -> Query {
        self.query
    }

    pub fn view_labels(&self) -> &HashSet<String> {
        &self.view_labels
    }

    /// Edges incident to `node`, in edge order.
    pub fn incident(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == node || e.to == node)
            .map(|(i, _)| i)
    }

    pub(crate) fn query_mut(&mut self) -> &mut Query {
        &mut self.query
    }

    /// Recomputes node and edge tables after the query changed.
    pub(crate) fn rebuild(&mut self) {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for v in self.query.variable_occurrences() {
            *counts.entry(v).or_default() += 1;
        }
        let referenced = |v: &Option<String>| v.as_deref().is_some_and(|v| counts.get(v).copied().unwrap_or(0) >= 2);

        let mut nodes: Vec<PatternNode> = Vec::new();
        let mut edges: Vec<PatternEdge> = Vec::new();
        let mut scope: HashMap<String, usize> = HashMap::new();
        for (ci, clause) in self.query.clauses.iter().enumerate() {
            match clause {
                Clause::Match { paths, .. } => {
                    for (pi, path) in paths.iter().enumerate() {
                        let mut intern = |n: &NodePattern, nodes: &mut Vec<PatternNode>| -> usize {
                            if let Some(v) = &n.variable {
                                if let Some(&i) = scope.get(v) {
                                    let node = &mut nodes[i];
                                    node.has_properties |= !n.properties.is_empty();
                                    for l in &n.labels {
                                        if !node.labels.contains(l) {
                                            node.labels.push(l.clone());
                                        }
                                    }
                                    return i;
                                }
                            }
                            nodes.push(PatternNode {
                                variable: n.variable.clone(),
                                labels: n.labels.clone(),
                                has_properties: !n.properties.is_empty(),
                                is_referenced: referenced(&n.variable),
                                degree: 0,
                            });
                            let i = nodes.len() - 1;
                            if let Some(v) = &n.variable {
                                scope.insert(v.clone(), i);
                            }
                            i
                        };
                        let mut prev = intern(&path.start, &mut nodes);
                        for (si, (rel, node)) in path.segments.iter().enumerate() {
                            let next = intern(node, &mut nodes);
                            nodes[prev].degree += 1;
                            nodes[next].degree += 1;
                            edges.push(PatternEdge {
                                variable: rel.variable.clone(),
                                rel_type: rel.rel_type.clone(),
                                from: prev,
                                to: next,
                                direction: rel.direction,
                                range: rel.range,
                                no_dup: rel.no_dup,
                                has_properties: !rel.properties.is_empty(),
                                is_referenced: referenced(&rel.variable),
                                is_view_edge: rel
                                    .rel_type
                                    .as_ref()
                                    .and_then(Name::as_ident)
                                    .is_some_and(|t| self.view_labels.contains(t)),
                                loc: EdgeLoc {
                                    clause: ci,
                                    path: pi,
                                    segment: si,
                                },
                            });
                            prev = next;
                        }
                    }
                }
                Clause::With { vars } => scope.retain(|k, _| vars.contains(k)),
                _ => {}
            }
        }
        self.nodes = nodes;
        self.edges = edges;
    }
}
