//! A property graph together with its view catalog. Every mutation that goes
//! through [`Database`] keeps the views up to date.

use std::fmt;

use crate::exec::{self, ExecOptions, ProfileReport, QueryResult, WriteMode};
use crate::lang::{self, Statement, ViewDefinition};
use crate::opt::{self, OptimizerOptions, ViewAttempt};
use crate::store::{DeletionSummary, EdgeId, GraphSchema, MaintenanceOutcome, NodeId, Properties, PropertyGraph};
use crate::views::{ConsistencyReport, ViewCatalog, ViewCreation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DbConfig {
    /// Rewrite queries with views before running them.
    pub optimize: bool,
    pub skip_negative_eff: bool,
    /// Cap on variable-length expansion depth.
    pub max_hops: Option<u32>,
}

impl Default for DbConfig {
    fn default() -> Self {
        DbConfig {
            optimize: true,
            skip_negative_eff: false,
            max_hops: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Rows(QueryResult),
    ViewCreated(ViewCreation),
    ViewDropped { name: String, edges: u64 },
}

impl Outcome {
    /// The query result, or an empty one for view statements.
    pub fn into_result(self) -> QueryResult {
        match self {
            Outcome::Rows(r) => r,
            _ => QueryResult::default(),
        }
    }
}

/// What the optimizer would do with a statement.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub original: String,
    pub rewritten: String,
    pub attempts: Vec<ViewAttempt>,
    /// (view, estimated cost without the view, cost of scanning the view).
    pub estimates: Vec<(String, u64, u64)>,
    /// Measured DB hits of the original and the rewritten statement, for reads.
    pub measured: Option<(u64, u64)>,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "original:  {}", self.original)?;
        writeln!(f, "rewritten: {}", self.rewritten)?;
        writeln!(f, "view order:")?;
        for a in &self.attempts {
            let (est, scan) = self
                .estimates
                .iter()
                .find(|e| e.0 == a.view)
                .map_or((0, 0), |e| (e.1, e.2));
            writeln!(
                f,
                "  {:<20} eff {:>8}  estimate {:>8}  view scan {:>8}  rewrites {}",
                a.view, a.eff, est, scan, a.rewrites
            )?;
        }
        match self.measured {
            Some((o, r)) => write!(f, "measured dbhits: original {o}, rewritten {r}"),
            None => write!(f, "measured dbhits: n/a (write statement)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Database {
    graph: PropertyGraph,
    catalog: ViewCatalog,
    pub config: DbConfig,
}

impl Database {
    pub fn new(schema: GraphSchema) -> Self {
        Self::from_graph(PropertyGraph::new(schema))
    }

    /// Wraps an existing graph. It must not contain view labels yet.
    pub fn from_graph(graph: PropertyGraph) -> Self {
        Database {
            graph,
            catalog: ViewCatalog::new(),
            config: DbConfig::default(),
        }
    }

    pub fn graph(&self) -> &PropertyGraph {
        &self.graph
    }

    pub fn catalog(&self) -> &ViewCatalog {
        &self.catalog
    }

    fn exec_opts(&self) -> ExecOptions {
        ExecOptions {
            mode: WriteMode::User,
            max_hops: self.config.max_hops,
        }
    }

    fn opt_opts(&self) -> OptimizerOptions {
        OptimizerOptions {
            skip_negative_eff: self.config.skip_negative_eff,
        }
    }

    /// Parses and runs one statement.
    pub fn execute(&mut self, text: &str) -> Result<Outcome> {
        let stmt = lang::parse(text)?;
        self.execute_statement(&stmt)
    }

    pub fn execute_statement(&mut self, stmt: &Statement) -> Result<Outcome> {
        self.profile_statement(stmt).map(|(o, _)| o)
    }

    /// Runs a statement and returns its operator profile. View statements
    /// have an empty profile.
    pub fn profile(&mut self, text: &str) -> Result<(Outcome, ProfileReport)> {
        let stmt = lang::parse(text)?;
        self.profile_statement(&stmt)
    }

    pub fn profile_statement(&mut self, stmt: &Statement) -> Result<(Outcome, ProfileReport)> {
        match stmt {
            Statement::CreateView(def) => Ok((Outcome::ViewCreated(self.create_view(def.clone())?), ProfileReport::default())),
            Statement::DropView(name) => {
                let edges = self.drop_view(name)?;
                Ok((
                    Outcome::ViewDropped {
                        name: name.clone(),
                        edges,
                    },
                    ProfileReport::default(),
                ))
            }
            _ => {
                let rewritten;
                let stmt = if self.config.optimize && !self.catalog.is_empty() {
                    rewritten = opt::optimize(stmt, &self.catalog, &self.graph, self.opt_opts()).statement;
                    &rewritten
                } else {
                    stmt
                };
                self.run_unoptimized(stmt).map(|(r, p)| (Outcome::Rows(r), p))
            }
        }
    }

    /// Runs a query or union exactly as written.
    pub fn run_unoptimized(&mut self, stmt: &Statement) -> Result<(QueryResult, ProfileReport)> {
        let opts = self.exec_opts();
        let mut hooks = self.catalog.hooks(self.config.max_hops);
        exec::profile(&mut self.graph, stmt, &mut hooks, opts)
    }

    pub fn create_view(&mut self, def: ViewDefinition) -> Result<ViewCreation> {
        self.catalog.create(&mut self.graph, def, self.config.max_hops)
    }

    pub fn drop_view(&mut self, name: &str) -> Result<u64> {
        self.catalog.drop_view(&mut self.graph, name)
    }

    /// The statement the optimizer would run instead of `text`, with cost
    /// estimates. Read statements are also measured both ways.
    pub fn explain(&mut self, text: &str) -> Result<Explanation> {
        let stmt = lang::parse(text)?;
        if matches!(stmt, Statement::CreateView(_) | Statement::DropView(_)) {
            return Err(Error::Unsupported("EXPLAIN applies to queries".into()));
        }
        let o = opt::optimize(&stmt, &self.catalog, &self.graph, self.opt_opts());
        let estimates = self
            .catalog
            .iter()
            .map(|v| {
                let s = v.stats(&self.graph);
                (v.name().to_string(), opt::estimate_dbhit(&s), s.view_scan_cost())
            })
            .collect();
        let is_write = match &stmt {
            Statement::Query(q) => q.is_write(),
            Statement::Union { parts, .. } => parts.iter().any(|q| q.is_write()),
            _ => true,
        };
        let measured = if is_write {
            None
        } else {
            let (_, before) = self.run_unoptimized(&stmt)?;
            let (_, after) = self.run_unoptimized(&o.statement)?;
            Some((before.total_db_hits(), after.total_db_hits()))
        };
        Ok(Explanation {
            original: lang::render(&stmt),
            rewritten: lang::render(&o.statement),
            attempts: o.attempts,
            estimates,
            measured,
        })
    }

    pub fn check_consistency(&self, view: &str) -> Result<ConsistencyReport> {
        self.catalog.check_consistency(&self.graph, view)
    }

    /// Consistency reports for every view, in name order.
    pub fn check_all(&self) -> Result<Vec<ConsistencyReport>> {
        self.catalog.names().map(|n| self.check_consistency(n)).collect()
    }

    pub fn create_node(&mut self, label: &str, properties: Properties) -> Result<NodeId> {
        Ok(self.graph.create_node(label, properties)?)
    }

    pub fn create_edge(&mut self, src: NodeId, dst: NodeId, label: &str, properties: Properties) -> Result<(EdgeId, MaintenanceOutcome)> {
        let mut hooks = self.catalog.hooks(self.config.max_hops);
        self.graph.create_edge(src, dst, label, properties, &mut hooks)
    }

    pub fn delete_node(&mut self, id: NodeId) -> Result<DeletionSummary> {
        let mut hooks = self.catalog.hooks(self.config.max_hops);
        self.graph.delete_node(id, &mut hooks)
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<DeletionSummary> {
        let mut hooks = self.catalog.hooks(self.config.max_hops);
        self.graph.delete_edge(id, &mut hooks)
    }
}
