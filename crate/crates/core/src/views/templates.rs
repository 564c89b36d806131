//! Maintenance statement templates.
//!
//! For each view, three ordered statement lists are generated once: one for
//! deleting a node, one for creating an edge and one for deleting an edge.
//! Each statement pins the changed element at one possible position of the
//! view path (an explicit node, a point inside a variable-length edge, or a
//! fixed edge) and then creates or deletes one view edge per match.

use crate::lang::{
    Clause, Name, NodePattern, PathPattern, Predicate, Query, Range, RelPattern, ValueExpr, ViewDefinition,
};

/// Reserved variable naming the changed edge inside edge templates.
pub const EVENT_EDGE_VAR: &str = "@R";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    /// The deleted node sits at explicit match node `pos`.
    ReplNode { pos: usize },
    /// The deleted node sits inside variable-length edge `edge`.
    ReplNodeInVlen { edge: usize, before: Range, after: Range },
    /// The changed edge is fixed-length edge `edge`.
    ReplEdge { edge: usize },
    /// The changed edge sits inside variable-length edge `edge`.
    ReplEdgeInVlen { edge: usize, before: Range, after: Range },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub kind: TemplateKind,
    /// Statement with `$` placeholders, stored parsed.
    pub statement: Query,
    /// Template path position of each view match node.
    pub node_map: Vec<usize>,
    /// Template path segments whose edges, concatenated, form each view edge.
    pub edge_map: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemplateSet {
    pub delete_node: Vec<Template>,
    pub create_edge: Vec<Template>,
    pub delete_edge: Vec<Template>,
}

impl TemplateSet {
    pub fn generate(def: &ViewDefinition) -> Self {
        TemplateSet {
            delete_node: gen_delete_node_template(def),
            create_edge: gen_update_edge_template(def, true),
            delete_edge: gen_update_edge_template(def, false),
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.delete_node.len(), self.create_edge.len(), self.delete_edge.len())
    }
}

/// Statements that remove the view edges of every instance through a
/// deleted node.
pub fn gen_delete_node_template(def: &ViewDefinition) -> Vec<Template> {
    let path = &def.match_path;
    let mut out = Vec::new();
    for pos in 0..path.node_count() {
        let mut p = path.clone();
        let node = p.node_mut(pos);
        node.labels.push(Name::placeholder("L"));
        node.properties = node_info("L");
        out.push(template(def, TemplateKind::ReplNode { pos }, p, identity_map(path), false, None));
    }
    for (edge, rel) in path.rels().enumerate() {
        let Some(range) = rel.range else { continue };
        let n = range.min as i64;
        match range.max {
            None => {
                let last = (n - 1).max(1);
                for i in 1..=last {
                    let (before, after) = if i < last {
                        (Range::exact(i as u32), Range::at_least((n - i) as u32))
                    } else {
                        (Range::at_least(i as u32), Range::at_least(1))
                    };
                    out.push(split_node(def, edge, before, after));
                }
            }
            Some(m) => {
                for i in 1..m as i64 {
                    let before = Range::exact(i as u32);
                    let after = Range::new((n - i).max(1) as u32, Some((m as i64 - i) as u32));
                    out.push(split_node(def, edge, before, after));
                }
            }
        }
    }
    out
}

/// Statements that create (or delete) the view edges of every instance
/// through a created (or deleted) edge.
pub fn gen_update_edge_template(def: &ViewDefinition, is_create: bool) -> Vec<Template> {
    let path = &def.match_path;
    let mut out = Vec::new();
    for (edge, rel) in path.rels().enumerate() {
        if rel.range.is_some() {
            continue;
        }
        let mut p = path.clone();
        let (left, right) = if rel.direction == crate::lang::RelDirection::Left {
            ("DL", "SL")
        } else {
            ("SL", "DL")
        };
        for (pos, ph) in [(edge, left), (edge + 1, right)] {
            let node = p.node_mut(pos);
            node.labels.push(Name::placeholder(ph));
            node.properties = node_info(ph);
        }
        p.segments[edge].0.variable = Some(EVENT_EDGE_VAR.to_string());
        out.push(template(def, TemplateKind::ReplEdge { edge }, p, identity_map(path), is_create, Some(())));
    }
    for (edge, rel) in path.rels().enumerate() {
        let Some(range) = rel.range else { continue };
        let n = range.min as i64;
        match range.max {
            None => {
                let last = (n - 1).max(0);
                for i in 0..=last {
                    let (before, after) = if i < last {
                        (Range::exact(i as u32), Range::at_least((n - 1 - i) as u32))
                    } else {
                        (Range::at_least(i as u32), Range::at_least(0))
                    };
                    out.push(split_edge(def, edge, before, after, is_create));
                }
            }
            Some(m) => {
                for i in 0..m as i64 {
                    let before = Range::exact(i as u32);
                    let after = Range::new((n - 1 - i).max(0) as u32, Some((m as i64 - 1 - i) as u32));
                    out.push(split_edge(def, edge, before, after, is_create));
                }
            }
        }
    }
    out
}

fn node_info(prefix: &str) -> Vec<(Name, ValueExpr)> {
    let key = match prefix {
        "L" => ("K", "V"),
        "SL" => ("SK", "SV"),
        _ => ("DK", "DV"),
    };
    vec![(Name::placeholder(key.0), ValueExpr::Placeholder(key.1.to_string()))]
}

fn info_node(prefix: &str) -> NodePattern {
    NodePattern {
        variable: None,
        labels: vec![Name::placeholder(prefix)],
        properties: node_info(prefix),
    }
}

type Maps = (Vec<usize>, Vec<Vec<usize>>);

fn identity_map(path: &PathPattern) -> Maps {
    (
        (0..path.node_count()).collect(),
        (0..path.segments.len()).map(|i| vec![i]).collect(),
    )
}

/// Maps for a path where segment `edge` was replaced by `width` segments.
fn widened_map(path: &PathPattern, edge: usize, width: usize) -> Maps {
    let extra = width - 1;
    let nodes = (0..path.node_count())
        .map(|i| if i <= edge { i } else { i + extra })
        .collect();
    let edges = (0..path.segments.len())
        .map(|i| match i.cmp(&edge) {
            std::cmp::Ordering::Less => vec![i],
            std::cmp::Ordering::Equal => (i..i + width).collect(),
            std::cmp::Ordering::Greater => vec![i + extra],
        })
        .collect();
    (nodes, edges)
}

fn segment(rel: &RelPattern, range: Option<Range>) -> RelPattern {
    RelPattern::new(rel.rel_type.clone(), rel.direction, range)
}

fn split_node(def: &ViewDefinition, edge: usize, before: Range, after: Range) -> Template {
    let path = &def.match_path;
    let mut p = path.clone();
    let (rel, end) = p.segments[edge].clone();
    p.segments.splice(
        edge..=edge,
        [
            (segment(&rel, Some(before)), info_node("L")),
            (segment(&rel, Some(after)), end),
        ],
    );
    let kind = TemplateKind::ReplNodeInVlen { edge, before, after };
    template(def, kind, p, widened_map(path, edge, 2), false, None)
}

fn split_edge(def: &ViewDefinition, edge: usize, before: Range, after: Range, is_create: bool) -> Template {
    let path = &def.match_path;
    let mut p = path.clone();
    let (rel, end) = p.segments[edge].clone();
    let (left, right) = if rel.direction == crate::lang::RelDirection::Left {
        ("DL", "SL")
    } else {
        ("SL", "DL")
    };
    let mut event = segment(&rel, None);
    event.variable = Some(EVENT_EDGE_VAR.to_string());
    p.segments.splice(
        edge..=edge,
        [
            (segment(&rel, Some(before)), info_node(left)),
            (event, info_node(right)),
            (segment(&rel, Some(after)), end),
        ],
    );
    let kind = TemplateKind::ReplEdgeInVlen { edge, before, after };
    template(def, kind, p, widened_map(path, edge, 3), is_create, Some(()))
}

/// Wraps a match path into the full maintenance statement.
fn template(
    def: &ViewDefinition,
    kind: TemplateKind,
    path: PathPattern,
    (node_map, edge_map): Maps,
    is_create: bool,
    event_edge: Option<()>,
) -> Template {
    let first = def.match_path.start.variable.clone().unwrap_or_default();
    let last = def.match_path.last().variable.clone().unwrap_or_default();
    let (src, dst) = def.edge_endpoints();
    let mut taken: Vec<&str> = Vec::new();
    crate::lang::collect_path_vars(&def.match_path, &mut taken);
    let mut action_var = def.construct.segments[0]
        .0
        .variable
        .clone()
        .unwrap_or_else(|| "r".to_string());
    while taken.contains(&action_var.as_str()) {
        action_var.push('_');
    }
    let predicates = match event_edge {
        Some(()) => vec![Predicate::IdEq {
            var: EVENT_EDGE_VAR.to_string(),
            value: ValueExpr::Placeholder("RID".into()),
        }],
        None => Vec::new(),
    };
    let mut view_rel = RelPattern::new(
        Some(Name::Ident(def.name.clone())),
        crate::lang::RelDirection::Right,
        None,
    );
    view_rel.variable = Some(action_var.clone());
    let mut clauses = vec![
        Clause::Match {
            paths: vec![path],
            predicates,
        },
        Clause::With {
            vars: vec![first, last],
        },
    ];
    let view_path = |no_dup: bool| {
        let mut rel = view_rel.clone();
        rel.no_dup = no_dup;
        PathPattern {
            start: NodePattern::named(src),
            segments: vec![(rel, NodePattern::named(dst))],
        }
    };
    if is_create {
        clauses.push(Clause::Create {
            paths: vec![view_path(false)],
        });
    } else {
        clauses.push(Clause::Match {
            paths: vec![view_path(true)],
            predicates: Vec::new(),
        });
        clauses.push(Clause::Delete {
            vars: vec![action_var],
            detach: false,
        });
    }
    Template {
        kind,
        statement: Query { clauses },
        node_map,
        edge_map,
    }
}

/// Values substituted into a template for one event.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub names: Vec<(&'static str, String)>,
    pub values: Vec<(&'static str, crate::store::PropertyValue)>,
}

impl Bindings {
    fn name(&self, p: &str) -> Option<&str> {
        self.names.iter().find(|(k, _)| *k == p).map(|(_, v)| v.as_str())
    }

    fn value(&self, p: &str) -> Option<&crate::store::PropertyValue> {
        self.values.iter().find(|(k, _)| *k == p).map(|(_, v)| v)
    }
}

/// Replaces every placeholder the bindings know about. Unknown placeholders
/// are left in place and rejected later by the executor.
pub fn instantiate(q: &Query, b: &Bindings) -> Query {
    let mut q = q.clone();
    let name = |n: &mut Name| {
        if let Name::Placeholder(p) = n {
            if let Some(v) = b.name(p) {
                *n = Name::Ident(v.to_string());
            }
        }
    };
    let value = |v: &mut ValueExpr| {
        if let ValueExpr::Placeholder(p) = v {
            if let Some(x) = b.value(p) {
                *v = ValueExpr::Literal(x.clone());
            }
        }
    };
    let props = |ps: &mut Vec<(Name, ValueExpr)>| {
        for (k, v) in ps {
            name(k);
            value(v);
        }
    };
    let path = |p: &mut PathPattern| {
        let node = |n: &mut NodePattern| {
            n.labels.iter_mut().for_each(name);
            props(&mut n.properties);
        };
        node(&mut p.start);
        for (r, n) in &mut p.segments {
            if let Some(t) = &mut r.rel_type {
                name(t);
            }
            props(&mut r.properties);
            node(n);
        }
    };
    for clause in &mut q.clauses {
        match clause {
            Clause::Match { paths, predicates } => {
                paths.iter_mut().for_each(path);
                for pred in predicates {
                    match pred {
                        Predicate::PropEq { key, value: v, .. } => {
                            name(key);
                            value(v);
                        }
                        Predicate::IdEq { value: v, .. } => value(v),
                    }
                }
            }
            Clause::Create { paths } => paths.iter_mut().for_each(path),
            _ => {}
        }
    }
    q
}
