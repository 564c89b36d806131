//! Compilation of a query AST into slot-addressed clause plans.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lang::{Clause, Name, NodePattern, PathPattern, Predicate, Query, RelDirection, RelPattern, ReturnItem, ValueExpr};
use crate::store::{Direction, LabelId, LabelKind, PropertyGraph, PropertyValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SlotKind {
    Node,
    Edge,
    Path,
}

impl SlotKind {
    fn describe(self) -> &'static str {
        match self {
            SlotKind::Node => "node",
            SlotKind::Edge => "relationship",
            SlotKind::Path => "path",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LabelMatch {
    Any,
    One(LabelId),
    Never,
}

#[derive(Debug, Clone)]
pub(crate) struct NodeSpec {
    pub slot: usize,
    pub label: LabelMatch,
    pub props: Vec<(String, PropertyValue)>,
    pub id_eq: Option<u64>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RelTypes {
    /// Untyped: every base edge type, never a view edge.
    AnyBase,
    One(LabelId),
    Never,
}

#[derive(Debug, Clone)]
pub(crate) struct RelSpec {
    pub slot: usize,
    pub types: RelTypes,
    /// Direction when walking the path left to right.
    pub dir: Direction,
    pub range: Option<(u32, Option<u32>)>,
    pub props: Vec<(String, PropertyValue)>,
    pub id_eq: Option<u64>,
    pub no_dup: bool,
    pub text: String,
}

#[derive(Debug, Clone)]
pub(crate) enum Anchor {
    Bound,
    IdSeek(u64),
    PkSeek(LabelId, PropertyValue),
    LabelScan(LabelId),
    AllScan,
    Empty,
}

#[derive(Debug, Clone)]
pub(crate) struct PathPlan {
    pub nodes: Vec<NodeSpec>,
    pub rels: Vec<RelSpec>,
    pub anchor: usize,
    pub anchor_mode: Anchor,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Step {
    Anchor { path: usize },
    /// Expand segment `seg`; forward walks left to right.
    Expand { path: usize, seg: usize, forward: bool },
}

#[derive(Debug, Clone)]
pub(crate) struct MatchPlan {
    pub paths: Vec<PathPlan>,
    pub steps: Vec<Step>,
    /// Operator index of each step in the statement's operator list.
    pub step_ops: Vec<usize>,
    /// Predicates on variables that no pattern position of this clause binds.
    pub post_filters: Vec<(usize, PostFilter)>,
    pub filter_op: Option<usize>,
    pub no_dup_slots: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) enum PostFilter {
    Prop(String, PropertyValue),
    Id(u64),
}

#[derive(Debug, Clone)]
pub(crate) struct CreateNode {
    pub slot: usize,
    /// `None` when the variable is already bound.
    pub new: Option<(String, Vec<(String, PropertyValue)>)>,
}

#[derive(Debug, Clone)]
pub(crate) struct CreateRel {
    pub slot: usize,
    pub label: String,
    pub left_to_right: bool,
    pub props: Vec<(String, PropertyValue)>,
}

#[derive(Debug, Clone)]
pub(crate) struct CreatePath {
    pub nodes: Vec<CreateNode>,
    pub rels: Vec<CreateRel>,
}

#[derive(Debug, Clone)]
pub(crate) enum ClausePlan {
    Match(MatchPlan),
    With { keep: Vec<usize>, op: usize },
    Return { columns: Vec<String>, slots: Vec<usize>, count: bool, op: usize },
    Create { paths: Vec<CreatePath>, op: usize },
    Delete { slots: Vec<usize>, op: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct OpInfo {
    pub name: &'static str,
    pub detail: String,
}

/// A query compiled against a graph's schema.
#[derive(Debug, Clone)]
pub struct CompiledQuery {
    pub(crate) clauses: Vec<ClausePlan>,
    pub(crate) slot_count: usize,
    pub(crate) ops: Vec<OpInfo>,
    pub(crate) columns: Vec<String>,
    /// Slot layout of each MATCH path: (node slots, relationship slots).
    pub(crate) layouts: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
}

impl CompiledQuery {
    pub fn compile(graph: &PropertyGraph, query: &Query) -> Result<Self> {
        Compiler {
            graph,
            scope: HashMap::new(),
            kinds: Vec::new(),
            ops: Vec::new(),
        }
        .compile(query)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Node and relationship slots of a path in clause `clause`, if it is a MATCH.
    pub(crate) fn layout(&self, clause: usize, path: usize) -> Option<&(Vec<usize>, Vec<usize>)> {
        self.layouts.get(clause)?.get(path)
    }
}

struct Compiler<'g> {
    graph: &'g PropertyGraph,
    scope: HashMap<String, usize>,
    kinds: Vec<SlotKind>,
    ops: Vec<OpInfo>,
}

fn literal(v: &ValueExpr) -> Result<PropertyValue> {
    match v {
        ValueExpr::Literal(v) => Ok(v.clone()),
        ValueExpr::Placeholder(p) => Err(Error::Placeholder(p.clone())),
    }
}

fn ident(n: &Name) -> Result<&str> {
    match n {
        Name::Ident(s) => Ok(s),
        Name::Placeholder(p) => Err(Error::Placeholder(p.clone())),
    }
}

fn id_literal(v: &ValueExpr) -> Result<u64> {
    match literal(v)? {
        PropertyValue::Int(i) => Ok(i.max(-1) as u64),
        other => Err(Error::Unsupported(format!("id() compared with {}", other.kind()))),
    }
}

fn props(filter: &[(Name, ValueExpr)]) -> Result<Vec<(String, PropertyValue)>> {
    filter
        .iter()
        .map(|(k, v)| Ok((ident(k)?.to_string(), literal(v)?)))
        .collect()
}

impl<'g> Compiler<'g> {
    fn op(&mut self, name: &'static str, detail: String) -> usize {
        self.ops.push(OpInfo { name, detail });
        self.ops.len() - 1
    }

    fn new_slot(&mut self, kind: SlotKind) -> usize {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }

    /// Slot for a pattern variable: reuses an in-scope binding, else allocates.
    fn slot(&mut self, var: &Option<String>, kind: SlotKind) -> Result<(usize, bool)> {
        match var {
            None => Ok((self.new_slot(kind), false)),
            Some(v) => {
                if let Some(&s) = self.scope.get(v) {
                    let found = self.kinds[s];
                    let compatible = found == kind || (found != SlotKind::Node && kind != SlotKind::Node);
                    if !compatible {
                        return Err(Error::TypeMismatch {
                            var: v.clone(),
                            expected: kind.describe(),
                            found: found.describe(),
                        });
                    }
                    Ok((s, true))
                } else {
                    let s = self.new_slot(kind);
                    self.scope.insert(v.clone(), s);
                    Ok((s, false))
                }
            }
        }
    }

    fn lookup(&self, var: &str) -> Result<usize> {
        self.scope
            .get(var)
            .copied()
            .ok_or_else(|| Error::Lang(crate::lang::LangError::UnboundVariable { name: var.to_string() }))
    }

    fn compile(mut self, query: &Query) -> Result<CompiledQuery> {
        let mut clauses = Vec::new();
        let mut layouts = Vec::new();
        let mut columns = Vec::new();
        for clause in &query.clauses {
            let mut layout = Vec::new();
            let plan = match clause {
                Clause::Match { paths, predicates } => {
                    let (plan, l) = self.match_clause(paths, predicates)?;
                    layout = l;
                    ClausePlan::Match(plan)
                }
                Clause::With { vars } => {
                    let keep = vars.iter().map(|v| self.lookup(v)).collect::<Result<Vec<_>>>()?;
                    self.scope.retain(|k, _| vars.contains(k));
                    let op = self.op("Projection", vars.join(", "));
                    ClausePlan::With { keep, op }
                }
                Clause::Return { items } => {
                    let count = items.contains(&ReturnItem::CountStar);
                    let mut slots = Vec::new();
                    columns.clear();
                    for item in items {
                        match item {
                            ReturnItem::Var(v) => {
                                slots.push(self.lookup(v)?);
                                columns.push(v.clone());
                            }
                            ReturnItem::CountStar => columns.push("count(*)".into()),
                        }
                    }
                    if count {
                        self.op("Count", String::new());
                    }
                    let op = self.op("ProduceResults", columns.join(", "));
                    ClausePlan::Return {
                        columns: columns.clone(),
                        slots,
                        count,
                        op,
                    }
                }
                Clause::Create { paths } => {
                    let paths = paths.iter().map(|p| self.create_path(p)).collect::<Result<Vec<_>>>()?;
                    let op = self.op("Create", String::new());
                    ClausePlan::Create { paths, op }
                }
                Clause::Delete { vars, .. } => {
                    let slots = vars.iter().map(|v| self.lookup(v)).collect::<Result<Vec<_>>>()?;
                    let op = self.op("Delete", vars.join(", "));
                    ClausePlan::Delete { slots, op }
                }
            };
            clauses.push(plan);
            layouts.push(layout);
        }
        Ok(CompiledQuery {
            clauses,
            slot_count: self.kinds.len(),
            ops: self.ops,
            columns,
            layouts,
        })
    }

    fn node_spec(&mut self, n: &NodePattern) -> Result<(NodeSpec, bool)> {
        let (slot, bound) = self.slot(&n.variable, SlotKind::Node)?;
        let mut label = LabelMatch::Any;
        for l in &n.labels {
            let name = ident(l)?;
            let id = self.graph.resolve_label(name)?;
            if !matches!(self.graph.schema().kind(id), LabelKind::Node { .. }) {
                label = LabelMatch::Never;
                continue;
            }
            label = match label {
                LabelMatch::Any => LabelMatch::One(id),
                LabelMatch::One(prev) if prev == id => LabelMatch::One(id),
                _ => LabelMatch::Never,
            };
        }
        Ok((
            NodeSpec {
                slot,
                label,
                props: props(&n.properties)?,
                id_eq: None,
                text: n.to_string(),
            },
            bound,
        ))
    }

    fn rel_spec(&mut self, r: &RelPattern) -> Result<RelSpec> {
        let kind = if r.range.is_some() { SlotKind::Path } else { SlotKind::Edge };
        let (slot, _) = self.slot(&r.variable, kind)?;
        let types = match &r.rel_type {
            None => RelTypes::AnyBase,
            Some(t) => {
                let id = self.graph.resolve_label(ident(t)?)?;
                match self.graph.schema().kind(id) {
                    LabelKind::Node { .. } => RelTypes::Never,
                    _ => RelTypes::One(id),
                }
            }
        };
        Ok(RelSpec {
            slot,
            types,
            dir: match r.direction {
                RelDirection::Right => Direction::Out,
                RelDirection::Left => Direction::In,
                RelDirection::Undirected => Direction::Both,
            },
            range: r.range.map(|rg| (rg.min, rg.max)),
            props: props(&r.properties)?,
            id_eq: None,
            no_dup: r.no_dup,
            text: r.to_string(),
        })
    }

    #[allow(clippy::type_complexity)]
    fn match_clause(
        &mut self,
        paths: &[PathPattern],
        predicates: &[Predicate],
    ) -> Result<(MatchPlan, Vec<(Vec<usize>, Vec<usize>)>)> {
        let mut plans = Vec::new();
        let mut bound_flags = Vec::new();
        let prior: Vec<usize> = self.scope.values().copied().collect();
        for p in paths {
            let mut nodes = Vec::new();
            let mut flags = Vec::new();
            let (n, _) = self.node_spec(&p.start)?;
            flags.push(prior.contains(&n.slot));
            nodes.push(n);
            let mut rels = Vec::new();
            for (r, n) in &p.segments {
                rels.push(self.rel_spec(r)?);
                let (n, _) = self.node_spec(n)?;
                flags.push(prior.contains(&n.slot));
                nodes.push(n);
            }
            plans.push(PathPlan {
                nodes,
                rels,
                anchor: 0,
                anchor_mode: Anchor::AllScan,
            });
            bound_flags.push(flags);
        }

        // Attach WHERE predicates to every position binding the variable.
        let mut post_filters = Vec::new();
        for pred in predicates {
            let slot = self.lookup(pred.var())?;
            let filter = match pred {
                Predicate::PropEq { key, value, .. } => PostFilter::Prop(ident(key)?.to_string(), literal(value)?),
                Predicate::IdEq { value, .. } => PostFilter::Id(id_literal(value)?),
            };
            if self.kinds[slot] == SlotKind::Path {
                return Err(Error::Unsupported(format!(
                    "predicate on variable-length relationship `{}`",
                    pred.var()
                )));
            }
            let mut attached = false;
            for plan in &mut plans {
                for n in plan.nodes.iter_mut().filter(|n| n.slot == slot) {
                    attach_node(n, &filter);
                    attached = true;
                }
                for r in plan.rels.iter_mut().filter(|r| r.slot == slot) {
                    attach_rel(r, &filter);
                    attached = true;
                }
            }
            if !attached {
                post_filters.push((slot, filter));
            }
        }

        let mut steps = Vec::new();
        let mut step_ops = Vec::new();
        let mut layout = Vec::new();
        let mut bound_in_clause: Vec<usize> = Vec::new();
        for (pi, plan) in plans.iter_mut().enumerate() {
            let empty = plan.nodes.iter().any(|n| n.label == LabelMatch::Never)
                || plan.rels.iter().any(|r| r.types == RelTypes::Never);
            let is_bound =
                |i: usize, plan: &PathPlan| bound_flags[pi][i] || bound_in_clause.contains(&plan.nodes[i].slot);
            let anchor = if empty {
                (0, Anchor::Empty)
            } else if let Some(i) = (0..plan.nodes.len()).find(|&i| is_bound(i, plan)) {
                (i, Anchor::Bound)
            } else if let Some(i) = plan.nodes.iter().position(|n| n.id_eq.is_some()) {
                (i, Anchor::IdSeek(plan.nodes[i].id_eq.unwrap()))
            } else if let Some((i, l, v)) = plan.nodes.iter().enumerate().find_map(|(i, n)| {
                let LabelMatch::One(l) = n.label else { return None };
                let pk = self.graph.schema().primary_key(l)?;
                n.props.iter().find(|(k, _)| k == pk).map(|(_, v)| (i, l, v.clone()))
            }) {
                (i, Anchor::PkSeek(l, v))
            } else {
                match plan.nodes[0].label {
                    LabelMatch::One(l) => (0, Anchor::LabelScan(l)),
                    _ => (0, Anchor::AllScan),
                }
            };
            plan.anchor = anchor.0;
            plan.anchor_mode = anchor.1;

            let anchor_node = &plan.nodes[plan.anchor];
            let name = match plan.anchor_mode {
                Anchor::Bound => "Argument",
                Anchor::IdSeek(_) => "NodeByIdSeek",
                Anchor::PkSeek(..) => "NodeIndexSeek",
                Anchor::LabelScan(_) => "NodeByLabelScan",
                Anchor::AllScan => "AllNodesScan",
                Anchor::Empty => "Empty",
            };
            steps.push(Step::Anchor { path: pi });
            step_ops.push(self.op(name, anchor_node.text.clone()));
            for seg in plan.anchor..plan.rels.len() {
                steps.push(Step::Expand {
                    path: pi,
                    seg,
                    forward: true,
                });
                let op = self.expand_op(plan, seg);
                step_ops.push(op);
            }
            for seg in (0..plan.anchor).rev() {
                steps.push(Step::Expand {
                    path: pi,
                    seg,
                    forward: false,
                });
                let op = self.expand_op(plan, seg);
                step_ops.push(op);
            }
            bound_in_clause.extend(plan.nodes.iter().map(|n| n.slot));
            layout.push((
                plan.nodes.iter().map(|n| n.slot).collect(),
                plan.rels.iter().map(|r| r.slot).collect(),
            ));
        }
        let filter_op = if post_filters.is_empty() {
            None
        } else {
            Some(self.op("Filter", String::new()))
        };
        let no_dup_slots = plans
            .iter()
            .flat_map(|p| p.rels.iter().filter(|r| r.no_dup).map(|r| r.slot))
            .collect();
        Ok((
            MatchPlan {
                paths: plans,
                steps,
                step_ops,
                post_filters,
                filter_op,
                no_dup_slots,
            },
            layout,
        ))
    }

    fn expand_op(&mut self, plan: &PathPlan, seg: usize) -> usize {
        let r = &plan.rels[seg];
        let detail = format!("{}{}{}", plan.nodes[seg].text, r.text, plan.nodes[seg + 1].text);
        let name = if r.range.is_some() { "VarLengthExpand" } else { "Expand" };
        self.op(name, detail)
    }

    fn create_path(&mut self, p: &PathPattern) -> Result<CreatePath> {
        let mut nodes = Vec::new();
        for n in p.nodes() {
            let (slot, bound) = self.slot(&n.variable, SlotKind::Node)?;
            let new = if bound {
                if !n.labels.is_empty() || !n.properties.is_empty() {
                    return Err(Error::InvalidCreate(format!(
                        "bound node `{}` cannot take labels or properties",
                        n.variable.as_deref().unwrap_or_default()
                    )));
                }
                None
            } else {
                if n.labels.len() != 1 {
                    return Err(Error::InvalidCreate(format!("node {n} needs exactly one label")));
                }
                Some((ident(&n.labels[0])?.to_string(), props(&n.properties)?))
            };
            nodes.push(CreateNode { slot, new });
        }
        let mut rels = Vec::new();
        for r in p.rels() {
            let left_to_right = match r.direction {
                RelDirection::Right => true,
                RelDirection::Left => false,
                RelDirection::Undirected => {
                    return Err(Error::InvalidCreate(format!("relationship {r} needs a direction")))
                }
            };
            let label = match &r.rel_type {
                Some(t) => ident(t)?.to_string(),
                None => return Err(Error::InvalidCreate(format!("relationship {r} needs a type"))),
            };
            if r.range.is_some() || r.no_dup {
                return Err(Error::InvalidCreate(format!("relationship {r} must be a plain edge")));
            }
            let (slot, bound) = self.slot(&r.variable, SlotKind::Edge)?;
            if bound {
                return Err(Error::InvalidCreate(format!("relationship {r} is already bound")));
            }
            rels.push(CreateRel {
                slot,
                label,
                left_to_right,
                props: props(&r.properties)?,
            });
        }
        Ok(CreatePath { nodes, rels })
    }
}

fn attach_node(n: &mut NodeSpec, f: &PostFilter) {
    match f {
        PostFilter::Prop(k, v) => n.props.push((k.clone(), v.clone())),
        PostFilter::Id(id) => {
            n.id_eq = match n.id_eq {
                Some(prev) if prev != *id => Some(u64::MAX),
                _ => Some(*id),
            }
        }
    }
}

fn attach_rel(r: &mut RelSpec, f: &PostFilter) {
    match f {
        PostFilter::Prop(k, v) => r.props.push((k.clone(), v.clone())),
        PostFilter::Id(id) => {
            r.id_eq = match r.id_eq {
                Some(prev) if prev != *id => Some(u64::MAX),
                _ => Some(*id),
            }
        }
    }
}
