//! Query execution: pattern matching, mutations and the Rows/DBHit profiler.
//!
//! DBHit counting: one hit per node fetched by id or primary key or produced
//! by a scan, one per edge yielded from an adjacency list and one per
//! neighbor node materialized across an edge. Expanding one edge therefore
//! costs two hits.

mod matcher;
pub(crate) mod plan;
mod profile;

use std::collections::HashSet;
use std::fmt;

pub use plan::CompiledQuery;
pub use profile::{OperatorStats, ProfileReport};

use crate::error::{Error, Result};
use crate::lang::{Query, Statement};
use crate::store::{EdgeId, MaintenanceHooks, NodeId, Properties, PropertyGraph};
use matcher::Matcher;
use plan::ClausePlan;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Node(NodeId),
    Edge(EdgeId),
    /// Edges of a variable-length match, in pattern (left to right) order.
    Path(Vec<EdgeId>),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Node(n) => write!(f, "{n}"),
            Value::Edge(e) => write!(f, "{e}"),
            Value::Path(p) => {
                f.write_str("[")?;
                for (i, e) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("]")
            }
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

pub(crate) type Row = Vec<Option<Value>>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub rows: u64,
    pub db_hits: u64,
}

/// Who is executing. Maintenance may create and delete view edges directly
/// and never fires hooks for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WriteMode {
    #[default]
    User,
    Maintenance,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExecOptions {
    pub mode: WriteMode,
    /// Safety cap on variable-length expansion depth. `None` is unlimited.
    pub max_hops: Option<u32>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationSummary {
    pub nodes_created: u64,
    pub edges_created: u64,
    pub nodes_deleted: u64,
    pub edges_deleted: u64,
    pub view_edges_created: u64,
    pub view_edges_deleted: u64,
    /// Storage accesses made by view maintenance triggered by this statement.
    pub maintenance_db_hits: u64,
}

impl MutationSummary {
    pub fn is_empty(&self) -> bool {
        *self == MutationSummary::default()
    }
}

impl std::ops::AddAssign for MutationSummary {
    fn add_assign(&mut self, o: Self) {
        self.nodes_created += o.nodes_created;
        self.edges_created += o.edges_created;
        self.nodes_deleted += o.nodes_deleted;
        self.edges_deleted += o.edges_deleted;
        self.view_edges_created += o.view_edges_created;
        self.view_edges_deleted += o.view_edges_deleted;
        self.maintenance_db_hits += o.maintenance_db_hits;
    }
}

impl fmt::Display for MutationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes +{} -{}, edges +{} -{}, view edges +{} -{}, maintenance dbhits {}",
            self.nodes_created,
            self.nodes_deleted,
            self.edges_created,
            self.edges_deleted,
            self.view_edges_created,
            self.view_edges_deleted,
            self.maintenance_db_hits
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: MutationSummary,
}

impl QueryResult {
    /// Rows sorted, for multiset comparison.
    pub fn sorted_rows(&self) -> Vec<Vec<Value>> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }
}

/// Executes a query or union. View statements are handled by the database.
pub fn execute<H>(graph: &mut PropertyGraph, stmt: &Statement, hooks: &mut H, opts: ExecOptions) -> Result<QueryResult>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    profile(graph, stmt, hooks, opts).map(|(r, _)| r)
}

/// Executes and returns the operator profile alongside the result.
pub fn profile<H>(
    graph: &mut PropertyGraph,
    stmt: &Statement,
    hooks: &mut H,
    opts: ExecOptions,
) -> Result<(QueryResult, ProfileReport)>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    match stmt {
        Statement::Query(q) => graph.atomically(|g| run_query(g, q, hooks, opts)),
        Statement::Union { parts, all } => graph.atomically(|g| {
            let mut result = QueryResult::default();
            let mut report = ProfileReport::default();
            let mut children = Vec::new();
            for (i, q) in parts.iter().enumerate() {
                let (r, p) = run_query(g, q, hooks, opts)?;
                if i == 0 {
                    result.columns = r.columns.clone();
                } else if r.columns.len() != result.columns.len() {
                    return Err(Error::Unsupported("UNION parts return different columns".into()));
                }
                result.rows.extend(r.rows);
                result.summary += r.summary;
                children.push(p);
            }
            if !*all {
                let mut seen = HashSet::new();
                result.rows.retain(|r| seen.insert(r.clone()));
            }
            report.push(
                "Union",
                String::new(),
                OpCounter {
                    rows: result.rows.len() as u64,
                    db_hits: 0,
                },
                0,
            );
            for child in children {
                report.append_child(child);
            }
            Ok((result, report))
        }),
        Statement::CreateView(_) | Statement::DropView(_) => {
            Err(Error::Unsupported("view statements go through the database".into()))
        }
    }
}

fn run_query<H>(
    graph: &mut PropertyGraph,
    q: &Query,
    hooks: &mut H,
    opts: ExecOptions,
) -> Result<(QueryResult, ProfileReport)>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    let plan = CompiledQuery::compile(graph, q)?;
    let mut counters = vec![OpCounter::default(); plan.ops.len()];
    let rows = vec![vec![None; plan.slot_count]];
    let out = run_clauses(graph, &plan, 0, rows, hooks, opts, &mut counters)?;
    Ok((out, ProfileReport::from_plan(&plan, &counters)))
}

/// Runs clauses `from..` of a compiled query over `rows`.
pub(crate) fn run_clauses<H>(
    graph: &mut PropertyGraph,
    plan: &CompiledQuery,
    from: usize,
    mut rows: Vec<Row>,
    hooks: &mut H,
    opts: ExecOptions,
    counters: &mut [OpCounter],
) -> Result<QueryResult>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    let mut result = QueryResult::default();
    for clause in &plan.clauses[from..] {
        match clause {
            ClausePlan::Match(m) => {
                rows = match_rows(graph, m, rows, counters, opts.max_hops);
            }
            ClausePlan::With { keep, op } => {
                for row in &mut rows {
                    for (i, v) in row.iter_mut().enumerate() {
                        if !keep.contains(&i) {
                            *v = None;
                        }
                    }
                }
                counters[*op].rows += rows.len() as u64;
            }
            ClausePlan::Return { columns, slots, count, op } => {
                result.columns = columns.clone();
                if *count {
                    counters[*op - 1].rows += 1;
                    result.rows = vec![vec![Value::Int(rows.len() as i64)]];
                } else {
                    result.rows = rows
                        .iter()
                        .map(|r| slots.iter().map(|&s| r[s].clone().expect("returned slot is bound")).collect())
                        .collect();
                }
                counters[*op].rows += result.rows.len() as u64;
            }
            ClausePlan::Create { paths, op } => {
                for row in &mut rows {
                    for p in paths {
                        create_path(graph, p, row, hooks, opts.mode, &mut result.summary, &mut counters[*op])?;
                    }
                }
                counters[*op].rows += rows.len() as u64;
            }
            ClausePlan::Delete { slots, op } => {
                for row in &rows {
                    for &s in slots {
                        let Some(v) = &row[s] else { continue };
                        delete_value(graph, v, hooks, opts.mode, &mut result.summary, &mut counters[*op])?;
                    }
                }
                counters[*op].rows += rows.len() as u64;
            }
        }
    }
    Ok(result)
}

pub(crate) fn match_rows(
    graph: &PropertyGraph,
    m: &plan::MatchPlan,
    rows: Vec<Row>,
    counters: &mut [OpCounter],
    max_hops: Option<u32>,
) -> Vec<Row> {
    let mut out = Vec::new();
    let mut claimed = HashSet::new();
    let mut matcher = Matcher::new(graph, m, counters, &mut claimed, &mut out, max_hops);
    for row in rows {
        matcher.run(row);
    }
    out
}

fn create_path<H>(
    graph: &mut PropertyGraph,
    p: &plan::CreatePath,
    row: &mut Row,
    hooks: &mut H,
    mode: WriteMode,
    summary: &mut MutationSummary,
    counter: &mut OpCounter,
) -> Result<()>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    let mut ids = Vec::with_capacity(p.nodes.len());
    for n in &p.nodes {
        let id = match (&n.new, &row[n.slot]) {
            (_, Some(Value::Node(id))) => *id,
            (Some((label, props)), None) => {
                let id = graph.create_node(label, props.iter().cloned().collect())?;
                summary.nodes_created += 1;
                counter.db_hits += 1;
                row[n.slot] = Some(Value::Node(id));
                id
            }
            _ => return Err(Error::InvalidCreate("endpoint is not a node".into())),
        };
        ids.push(id);
    }
    for (i, r) in p.rels.iter().enumerate() {
        let (src, dst) = if r.left_to_right {
            (ids[i], ids[i + 1])
        } else {
            (ids[i + 1], ids[i])
        };
        let label = graph.resolve_label(&r.label)?;
        let id = if graph.schema().is_view(label) {
            if mode != WriteMode::Maintenance || !r.props.is_empty() {
                return Err(crate::store::StoreError::ViewLabelReserved(r.label.clone()).into());
            }
            summary.view_edges_created += 1;
            graph.insert_view_edge(src, dst, label)?
        } else {
            let props: Properties = r.props.iter().cloned().collect();
            let (id, outcome) = graph.create_edge(src, dst, &r.label, props, hooks)?;
            summary.edges_created += 1;
            summary.view_edges_created += outcome.view_edges_created;
            summary.view_edges_deleted += outcome.view_edges_deleted;
            summary.maintenance_db_hits += outcome.db_hits;
            id
        };
        counter.db_hits += 1;
        row[r.slot] = Some(Value::Edge(id));
    }
    Ok(())
}

fn delete_value<H>(
    graph: &mut PropertyGraph,
    v: &Value,
    hooks: &mut H,
    mode: WriteMode,
    summary: &mut MutationSummary,
    counter: &mut OpCounter,
) -> Result<()>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    match v {
        Value::Node(n) => {
            if graph.contains_node(*n) {
                let s = graph.delete_node(*n, hooks)?;
                counter.db_hits += 1;
                summary.nodes_deleted += 1;
                summary.edges_deleted += s.incident_edges_removed;
                summary.view_edges_deleted += s.view_edges_removed;
                summary.view_edges_created += s.maintenance.view_edges_created;
                summary.maintenance_db_hits += s.maintenance.db_hits;
            }
        }
        Value::Edge(e) => delete_edge(graph, *e, hooks, mode, summary, counter)?,
        Value::Path(p) => {
            for e in p {
                delete_edge(graph, *e, hooks, mode, summary, counter)?;
            }
        }
        Value::Int(_) => return Err(Error::Unsupported("cannot delete a number".into())),
    }
    Ok(())
}

fn delete_edge<H>(
    graph: &mut PropertyGraph,
    e: EdgeId,
    hooks: &mut H,
    mode: WriteMode,
    summary: &mut MutationSummary,
    counter: &mut OpCounter,
) -> Result<()>
where
    H: MaintenanceHooks,
    Error: From<H::Error>,
{
    let Some(edge) = graph.edge(e) else { return Ok(()) };
    counter.db_hits += 1;
    if edge.is_view {
        if mode != WriteMode::Maintenance {
            return Err(crate::store::StoreError::IsViewEdge(e).into());
        }
        graph.remove_view_edge(e)?;
        summary.view_edges_deleted += 1;
    } else {
        let s = graph.delete_edge(e, hooks)?;
        summary.edges_deleted += 1;
        summary.view_edges_deleted += s.view_edges_removed;
        summary.view_edges_created += s.maintenance.view_edges_created;
        summary.maintenance_db_hits += s.maintenance.db_hits;
    }
    Ok(())
}
