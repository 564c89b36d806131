//! Workload scripts.
//!
//! A script is a sequence of statements. Lines starting with `--` followed by
//! a directive keyword tag the statement that follows:
//!
//! ```text
//! -- dataset commentTree posts=24 fanout=2 depth=10 persons=200 seed=7
//! -- view
//! CREATE VIEW ROOT_POST AS (...);
//! -- read Q1
//! MATCH (n:Comment)-[:replyOf*..]->(m:Post) RETURN n, m;
//! -- write DE
//! MATCH (c:Comment {id: 9})-[r:replyOf]->() DELETE r;
//! -- recover
//! MATCH (c:Comment {id: 9}), (p:Comment {id: 3}) CREATE (c)-[:replyOf]->(p);
//! ```
//!
//! `-- recover snapshot` restores the database as it was before the write
//! instead of running a statement. Other `--` lines are comments. Statements
//! before the first directive are classified by parsing them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use pgview_core::lang::{self, Statement};
use pgview_core::opt::{self, OptimizerOptions};
use pgview_core::store::NodeId;
use pgview_core::{Database, Outcome};

use crate::csvio::Dataset;
use crate::datagen::{CommentTree, KnowsGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    View,
    Read,
    Write,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::View => "view",
            Kind::Read => "read",
            Kind::Write => "write",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recover {
    Statement(Statement),
    Snapshot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub kind: Kind,
    pub name: String,
    pub statement: Statement,
    pub recover: Option<Recover>,
    /// Script line where the statement starts.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    CommentTree(CommentTree),
    KnowsGraph(KnowsGraph),
    Files { nodes: PathBuf, edges: PathBuf, schema: PathBuf },
}

impl DatasetSpec {
    pub fn dataset(&self) -> anyhow::Result<Dataset> {
        Ok(match self {
            DatasetSpec::CommentTree(t) => t.generate(),
            DatasetSpec::KnowsGraph(k) => k.generate(),
            DatasetSpec::Files { nodes, edges, schema } => Dataset::read_files(nodes, edges, schema)?,
        })
    }

    pub fn database(&self) -> anyhow::Result<Database> {
        Ok(Database::from_graph(self.dataset()?.to_graph()?))
    }

    /// Parses `commentTree k=v ...`, `knowsGraph k=v ...` or
    /// `files nodes=F edges=F schema=F`; file paths are relative to `base`.
    pub fn parse(text: &str, base: &Path) -> anyhow::Result<DatasetSpec> {
        let mut words = text.split_whitespace();
        let kind = words.next().context("missing dataset kind")?;
        let mut params = BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').with_context(|| format!("expected key=value, found `{w}`"))?;
            params.insert(k, v);
        }
        let mut num = |k: &str, default: u64| -> anyhow::Result<u64> {
            match params.remove(k) {
                Some(v) => v.parse().with_context(|| format!("`{k}` must be a non-negative integer")),
                None => Ok(default),
            }
        };
        let spec = match kind {
            "commentTree" => DatasetSpec::CommentTree(CommentTree {
                posts: num("posts", 10)?,
                fanout: num("fanout", 2)?,
                depth: num("depth", 8)? as u32,
                persons: num("persons", 0)?,
                seed: num("seed", 0)?,
            }),
            "knowsGraph" => DatasetSpec::KnowsGraph(KnowsGraph {
                persons: num("persons", 1000)?,
                layers: num("layers", 5)?,
                degree: num("degree", 2)?,
                seed: num("seed", 0)?,
            }),
            "files" => {
                let mut path = |k: &str| -> anyhow::Result<PathBuf> {
                    Ok(base.join(params.remove(k).with_context(|| format!("missing `{k}=`"))?))
                };
                DatasetSpec::Files {
                    nodes: path("nodes")?,
                    edges: path("edges")?,
                    schema: path("schema")?,
                }
            }
            other => bail!("unknown dataset kind `{other}`"),
        };
        if let Some(k) = params.keys().next() {
            bail!("unknown dataset parameter `{k}`");
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkloadScript {
    pub dataset: Option<DatasetSpec>,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

enum Tag {
    Kind(Kind, String),
    Untagged,
    Recover,
}

impl WorkloadScript {
    pub fn from_file(path: &Path) -> anyhow::Result<WorkloadScript> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(WorkloadScript::parse(&text, base)?)
    }

    pub fn parse(text: &str, base: &Path) -> Result<WorkloadScript, ScriptError> {
        let mut script = WorkloadScript::default();
        let mut tag = Tag::Untagged;
        let mut block = String::new();
        let mut block_line = 1;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let Some(directive) = raw.trim_start().strip_prefix("--") else {
                if block.trim().is_empty() {
                    block_line = line;
                }
                block.push_str(raw);
                block.push('\n');
                continue;
            };
            let mut words = directive.split_whitespace();
            let next = match words.next() {
                Some("dataset") => {
                    let rest = directive.trim_start().trim_start_matches("dataset");
                    let spec = DatasetSpec::parse(rest, base).map_err(|e| ScriptError {
                        line,
                        message: format!("{e:#}"),
                    })?;
                    script.dataset = Some(spec);
                    None
                }
                Some("view") => Some(Tag::Kind(Kind::View, words.next().unwrap_or_default().to_string())),
                Some("read") => Some(Tag::Kind(Kind::Read, words.next().unwrap_or_default().to_string())),
                Some("write") => Some(Tag::Kind(Kind::Write, words.next().unwrap_or_default().to_string())),
                Some("recover") if words.next() == Some("snapshot") => {
                    script.flush(&mut tag, &mut block, block_line)?;
                    script.attach_recover(Recover::Snapshot, line)?;
                    None
                }
                Some("recover") => Some(Tag::Recover),
                _ => None,
            };
            if let Some(next) = next {
                script.flush(&mut tag, &mut block, block_line)?;
                tag = next;
                block_line = line + 1;
            }
        }
        script.flush(&mut tag, &mut block, block_line)?;
        Ok(script)
    }

    fn flush(&mut self, tag: &mut Tag, block: &mut String, line: usize) -> Result<(), ScriptError> {
        let texts = lang::split_statements(block);
        block.clear();
        let current = std::mem::replace(tag, Tag::Untagged);
        let parse = |t: &str| {
            lang::parse(t).map_err(|e| ScriptError {
                line,
                message: e.to_string(),
            })
        };
        match current {
            Tag::Untagged => {
                for t in texts {
                    let statement = parse(&t)?;
                    let kind = classify(&statement);
                    let name = format!("S{}", self.entries.len() + 1);
                    self.entries.push(Entry { kind, name, statement, recover: None, line });
                }
            }
            Tag::Kind(kind, name) => {
                let [t] = texts.as_slice() else {
                    return Err(ScriptError {
                        line,
                        message: format!("a `-- {}` directive takes exactly one statement", kind.as_str()),
                    });
                };
                let statement = parse(t)?;
                if classify(&statement) != kind {
                    return Err(ScriptError {
                        line,
                        message: format!("statement is not a {} statement", kind.as_str()),
                    });
                }
                let name = if name.is_empty() { format!("S{}", self.entries.len() + 1) } else { name };
                self.entries.push(Entry { kind, name, statement, recover: None, line });
            }
            Tag::Recover => {
                let [t] = texts.as_slice() else {
                    return Err(ScriptError {
                        line,
                        message: "a `-- recover` directive takes exactly one statement".into(),
                    });
                };
                let statement = parse(t)?;
                self.attach_recover(Recover::Statement(statement), line)?;
            }
        }
        Ok(())
    }

    fn attach_recover(&mut self, recover: Recover, line: usize) -> Result<(), ScriptError> {
        match self.entries.last_mut() {
            Some(e) if e.kind == Kind::Write && e.recover.is_none() => {
                e.recover = Some(recover);
                Ok(())
            }
            _ => Err(ScriptError {
                line,
                message: "recover must directly follow a write".into(),
            }),
        }
    }

    pub fn count(&self, kind: Kind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }
}

fn classify(s: &Statement) -> Kind {
    match s {
        Statement::CreateView(_) | Statement::DropView(_) => Kind::View,
        Statement::Query(q) if q.is_write() => Kind::Write,
        Statement::Union { parts, .. } if parts.iter().any(|q| q.is_write()) => Kind::Write,
        _ => Kind::Read,
    }
}

/// The workload bundled with the binary: a ~50k node reply forest, two
/// views, seven reads and three writes.
pub const BUNDLED: &str = include_str!("../workloads/forum.pgw");

pub fn bundled() -> WorkloadScript {
    WorkloadScript::parse(BUNDLED, Path::new(".")).expect("bundled workload parses")
}

/// (src, dst) pairs of every view, for before/after comparisons.
pub fn view_state(db: &Database) -> BTreeMap<String, Vec<(NodeId, NodeId)>> {
    db.catalog()
        .iter()
        .map(|v| (v.name().to_string(), v.edge_pairs(db.graph())))
        .collect()
}

/// Runs a write and then its recover action.
pub fn recover(db: &mut Database, before: Option<Database>, recover: &Option<Recover>) -> anyhow::Result<()> {
    match (recover, before) {
        (Some(Recover::Statement(s)), _) => {
            db.execute_statement(s)?;
        }
        (Some(Recover::Snapshot), Some(snap)) => *db = snap,
        (Some(Recover::Snapshot), None) => bail!("snapshot recover without a snapshot"),
        (None, _) => {}
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub optimize: bool,
    pub profile: bool,
    pub verify_views: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub name: String,
    pub kind: Kind,
    pub rows: usize,
    pub time_ms: f64,
    pub db_hit: u64,
    /// Rewrite time and rewrite count; present only when optimizing.
    pub vpg: Option<(f64, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub optimize: bool,
    pub rows: Vec<RunRow>,
    /// Consistency or recover checks that failed.
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.optimize {
            out.push_str("statement,kind,rows,optVpgTimeMs,optTimeMs,optDbHit,rewrites\n");
        } else {
            out.push_str("statement,kind,rows,oriTimeMs,oriDbHit\n");
        }
        for r in &self.rows {
            match r.vpg {
                Some((vpg, n)) if self.optimize => out.push_str(&format!(
                    "{},{},{},{:.4},{:.4},{},{}\n",
                    r.name,
                    r.kind.as_str(),
                    r.rows,
                    vpg,
                    r.time_ms,
                    r.db_hit,
                    n
                )),
                _ => out.push_str(&format!(
                    "{},{},{},{:.4},{}\n",
                    r.name,
                    r.kind.as_str(),
                    r.rows,
                    r.time_ms,
                    r.db_hit
                )),
            }
        }
        out
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs one statement, optionally rewriting it first. Returns the outcome,
/// the profile and the timings.
pub(crate) struct Timed {
    pub outcome: Outcome,
    pub db_hit: u64,
    pub time_ms: f64,
    pub vpg_ms: f64,
    pub rewrites: usize,
    pub profile: pgview_core::exec::ProfileReport,
}

pub(crate) fn timed(db: &mut Database, stmt: &Statement, optimize: bool) -> anyhow::Result<Timed> {
    if let Statement::CreateView(_) | Statement::DropView(_) = stmt {
        let t = Instant::now();
        let outcome = db.execute_statement(stmt)?;
        return Ok(Timed {
            db_hit: match &outcome {
                Outcome::ViewCreated(c) => c.initial_db_hit,
                _ => 0,
            },
            outcome,
            time_ms: ms(t),
            vpg_ms: 0.0,
            rewrites: 0,
            profile: Default::default(),
        });
    }
    let (stmt, vpg_ms, rewrites) = if optimize && !db.catalog().is_empty() {
        let opts = OptimizerOptions {
            skip_negative_eff: db.config.skip_negative_eff,
        };
        let t = Instant::now();
        let o = opt::optimize(stmt, db.catalog(), db.graph(), opts);
        let vpg = ms(t);
        let n = o.total_rewrites();
        (o.statement, vpg, n)
    } else {
        (stmt.clone(), 0.0, 0)
    };
    let t = Instant::now();
    let (result, profile) = db.run_unoptimized(&stmt)?;
    let time_ms = ms(t);
    Ok(Timed {
        db_hit: profile.total_db_hits() + result.summary.maintenance_db_hits,
        outcome: Outcome::Rows(result),
        time_ms,
        vpg_ms,
        rewrites,
        profile,
    })
}

/// Executes a script against `db`, writing a transcript to `out`.
pub fn run_script(
    script: &WorkloadScript,
    db: &mut Database,
    opts: RunOptions,
    out: &mut dyn Write,
) -> anyhow::Result<RunReport> {
    let mut report = RunReport {
        optimize: opts.optimize,
        ..Default::default()
    };
    for e in &script.entries {
        let snapshot = matches!(e.recover, Some(Recover::Snapshot)).then(|| db.clone());
        let before = (opts.verify_views && e.recover.is_some()).then(|| view_state(db));
        let t = timed(db, &e.statement, opts.optimize).with_context(|| format!("{} (line {})", e.name, e.line))?;
        let rows = match &t.outcome {
            Outcome::Rows(r) => r.rows.len(),
            _ => 0,
        };
        write!(out, "{} {}: ", e.name, e.kind.as_str())?;
        match &t.outcome {
            Outcome::Rows(r) if e.kind == Kind::Write => write!(out, "{}", r.summary)?,
            Outcome::Rows(r) => write!(out, "{} rows", r.rows.len())?,
            Outcome::ViewCreated(c) => write!(
                out,
                "view {} created, {} edges, templates {}/{}/{}",
                c.name, c.edges, c.templates.0, c.templates.1, c.templates.2
            )?,
            Outcome::ViewDropped { name, edges } => write!(out, "view {name} dropped, {edges} edges removed")?,
        }
        write!(out, ", {:.3} ms, dbhits {}", t.time_ms, t.db_hit)?;
        if opts.optimize && e.kind != Kind::View {
            write!(out, ", rewrite {:.3} ms, {} rewrites", t.vpg_ms, t.rewrites)?;
        }
        writeln!(out)?;
        if opts.profile && e.kind != Kind::View {
            write!(out, "{}", indent(&t.profile.to_string()))?;
        }
        report.rows.push(RunRow {
            name: e.name.clone(),
            kind: e.kind,
            rows,
            time_ms: t.time_ms,
            db_hit: t.db_hit,
            vpg: (opts.optimize && e.kind != Kind::View).then_some((t.vpg_ms, t.rewrites)),
        });
        if opts.verify_views && e.kind == Kind::Write {
            verify(db, &format!("after {}", e.name), out, &mut report)?;
        }
        if e.recover.is_some() {
            recover(db, snapshot, &e.recover).with_context(|| format!("recovering {}", e.name))?;
            if let Some(before) = before {
                verify(db, &format!("after recovering {}", e.name), out, &mut report)?;
                if view_state(db) != before {
                    let msg = format!("recovering {} did not restore the views", e.name);
                    writeln!(out, "  {msg}")?;
                    report.failures.push(msg);
                }
            }
        }
    }
    Ok(report)
}

fn verify(db: &Database, when: &str, out: &mut dyn Write, report: &mut RunReport) -> anyhow::Result<()> {
    for r in db.check_all()? {
        writeln!(out, "  verify {when}: {r}")?;
        if !r.is_consistent() {
            report.failures.push(format!("{when}: {} inconsistent", r.view));
        }
    }
    Ok(())
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}\n")).collect()
}
