use crate::store::PropertyValue;

/// A label, relationship type or property key: either a plain identifier or
/// a `$NAME` template placeholder (stored without the `$`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Name {
    Ident(String),
    Placeholder(String),
}

impl Name {
    pub fn ident(s: &str) -> Name {
        Name::Ident(s.to_string())
    }

    pub fn placeholder(s: &str) -> Name {
        Name::Placeholder(s.to_string())
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            Name::Ident(s) => Some(s),
            Name::Placeholder(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueExpr {
    Literal(PropertyValue),
    Placeholder(String),
}

pub type PropertyFilter = Vec<(Name, ValueExpr)>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePattern {
    pub variable: Option<String>,
    /// Normally zero or one label. Maintenance templates stack a placeholder
    /// label onto an existing one, as in `(s:Person:$L{$K:$V})`.
    pub labels: Vec<Name>,
    pub properties: PropertyFilter,
}

impl NodePattern {
    pub fn named(var: &str) -> Self {
        NodePattern {
            variable: Some(var.to_string()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelDirection {
    /// `-[]->`
    Right,
    /// `<-[]-`
    Left,
    /// `-[]-`
    Undirected,
}

impl RelDirection {
    pub fn reversed(self) -> Self {
        match self {
            RelDirection::Right => RelDirection::Left,
            RelDirection::Left => RelDirection::Right,
            RelDirection::Undirected => RelDirection::Undirected,
        }
    }
}

/// Hop bounds of a variable-length relationship; `max: None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Range {
    pub min: u32,
    pub max: Option<u32>,
}

impl Range {
    pub const fn new(min: u32, max: Option<u32>) -> Self {
        Range { min, max }
    }

    pub const fn exact(n: u32) -> Self {
        Range { min: n, max: Some(n) }
    }

    pub const fn at_least(n: u32) -> Self {
        Range { min: n, max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelPattern {
    pub variable: Option<String>,
    pub rel_type: Option<Name>,
    pub direction: RelDirection,
    /// `None` for a plain single-hop relationship without `*` syntax.
    pub range: Option<Range>,
    pub no_dup: bool,
    pub properties: PropertyFilter,
}

impl RelPattern {
    pub fn new(rel_type: Option<Name>, direction: RelDirection, range: Option<Range>) -> Self {
        RelPattern {
            variable: None,
            rel_type,
            direction,
            range,
            no_dup: false,
            properties: Vec::new(),
        }
    }

    /// Range with the plain form normalized to exactly one hop.
    pub fn hops(&self) -> Range {
        self.range.unwrap_or(Range::exact(1))
    }

    pub fn is_variable_length(&self) -> bool {
        self.range.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPattern {
    pub start: NodePattern,
    pub segments: Vec<(RelPattern, NodePattern)>,
}

impl PathPattern {
    pub fn node(&self, i: usize) -> &NodePattern {
        if i == 0 {
            &self.start
        } else {
            &self.segments[i - 1].1
        }
    }

    pub fn node_mut(&mut self, i: usize) -> &mut NodePattern {
        if i == 0 {
            &mut self.start
        } else {
            &mut self.segments[i - 1].1
        }
    }

    pub fn node_count(&self) -> usize {
        self.segments.len() + 1
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.segments.iter().map(|(_, n)| n))
    }

    pub fn rels(&self) -> impl Iterator<Item = &RelPattern> {
        self.segments.iter().map(|(r, _)| r)
    }

    pub fn last(&self) -> &NodePattern {
        self.node(self.segments.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// `var.key = value`
    PropEq { var: String, key: Name, value: ValueExpr },
    /// `id(var) = value`
    IdEq { var: String, value: ValueExpr },
}

impl Predicate {
    pub fn var(&self) -> &str {
        match self {
            Predicate::PropEq { var, .. } | Predicate::IdEq { var, .. } => var,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReturnItem {
    Var(String),
    CountStar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    Match { paths: Vec<PathPattern>, predicates: Vec<Predicate> },
    With { vars: Vec<String> },
    Return { items: Vec<ReturnItem> },
    Create { paths: Vec<PathPattern> },
    Delete { vars: Vec<String>, detach: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub clauses: Vec<Clause>,
}

impl Query {
    /// Whether any clause writes to the graph.
    pub fn is_write(&self) -> bool {
        self.clauses
            .iter()
            .any(|c| matches!(c, Clause::Create { .. } | Clause::Delete { .. }))
    }

    /// Every textual occurrence of a variable, in clause order.
    pub fn variable_occurrences(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for clause in &self.clauses {
            match clause {
                Clause::Match { paths, predicates } => {
                    for p in paths {
                        collect_path_vars(p, &mut out);
                    }
                    out.extend(predicates.iter().map(Predicate::var));
                }
                Clause::Create { paths } => {
                    for p in paths {
                        collect_path_vars(p, &mut out);
                    }
                }
                Clause::With { vars } | Clause::Delete { vars, .. } => {
                    out.extend(vars.iter().map(String::as_str))
                }
                Clause::Return { items } => out.extend(items.iter().filter_map(|i| match i {
                    ReturnItem::Var(v) => Some(v.as_str()),
                    ReturnItem::CountStar => None,
                })),
            }
        }
        out
    }
}

pub(crate) fn collect_path_vars<'a>(p: &'a PathPattern, out: &mut Vec<&'a str>) {
    out.extend(p.start.variable.as_deref());
    for (r, n) in &p.segments {
        out.extend(r.variable.as_deref());
        out.extend(n.variable.as_deref());
    }
}

/// `CREATE VIEW name AS (CONSTRUCT (a)-[:name]->(b) MATCH path)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewDefinition {
    pub name: String,
    pub construct: PathPattern,
    pub match_path: PathPattern,
}

impl ViewDefinition {
    /// Variables of the view edge's source and destination, in edge direction.
    pub fn edge_endpoints(&self) -> (&str, &str) {
        let a = self.construct.start.variable.as_deref().unwrap_or_default();
        let b = self.construct.segments[0].1.variable.as_deref().unwrap_or_default();
        match self.construct.segments[0].0.direction {
            RelDirection::Left => (b, a),
            _ => (a, b),
        }
    }

    /// True when the view edge points from the last match node back to the first.
    pub fn edge_reversed(&self) -> bool {
        let (src, _) = self.edge_endpoints();
        self.match_path.start.variable.as_deref() != Some(src)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Query(Query),
    Union { parts: Vec<Query>, all: bool },
    CreateView(ViewDefinition),
    DropView(String),
}
