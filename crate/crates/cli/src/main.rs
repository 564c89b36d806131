use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pgview::bench::{self, BenchOptions};
use pgview::csvio::{label_counts, Dataset};
use pgview::datagen::{CommentTree, KnowsGraph};
use pgview::repl::Repl;
use pgview::scaling;
use pgview::workload::{self, DatasetSpec, RunOptions, WorkloadScript};
use pgview_core::Database;

#[derive(Parser)]
#[command(name = "pgview", version, about = "In-memory property graph engine with materialized path views")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a CSV graph and report label counts.
    Load {
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Write the loaded graph back out as CSV into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Generate a synthetic dataset as nodes.csv, edges.csv and schema.txt.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[command(flatten)]
        params: GenParams,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Execute a workload script.
    Run {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        optimize: bool,
        #[arg(long)]
        profile: bool,
        #[arg(long)]
        verify_views: bool,
        /// Write per-statement rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Compare unoptimized and view-optimized execution of a workload.
    Bench {
        /// Workload script; the bundled workload when omitted.
        #[arg(long)]
        workload: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        #[arg(long, default_value_t = 1)]
        warmup: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Measure view maintenance cost against the number of deleted edges.
    Scale {
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        counts: Vec<usize>,
        #[arg(
            long,
            default_value = "CREATE VIEW INDIRECT_KNOW AS (CONSTRUCT (s)-[:INDIRECT_KNOW]->(d) \
                             MATCH (s:Person)-[:knows*3..]->(d:Person))"
        )]
        view: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Interactive shell.
    Repl {
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    #[value(name = "commentTree")]
    CommentTree,
    #[value(name = "knowsGraph")]
    KnowsGraph,
}

#[derive(Args, Clone)]
struct GenParams {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    posts: u64,
    #[arg(long, default_value_t = 2)]
    fanout: u64,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    /// People: creators in a comment tree, the node count of a knows graph.
    #[arg(long)]
    persons: Option<u64>,
    #[arg(long, default_value_t = 5)]
    layers: u64,
    #[arg(long, default_value_t = 2)]
    degree: u64,
}

impl GenParams {
    fn spec(&self, kind: GenKind) -> DatasetSpec {
        match kind {
            GenKind::CommentTree => DatasetSpec::CommentTree(CommentTree {
                posts: self.posts,
                fanout: self.fanout,
                depth: self.depth,
                persons: self.persons.unwrap_or(0),
                seed: self.seed,
            }),
            GenKind::KnowsGraph => DatasetSpec::KnowsGraph(KnowsGraph {
                persons: self.persons.unwrap_or(1000),
                layers: self.layers,
                degree: self.degree,
                seed: self.seed,
            }),
        }
    }
}

/// Where the graph comes from: CSV files, a generator, or the script.
#[derive(Args, Clone)]
struct DataArgs {
    #[arg(long, requires_all = ["edges", "schema"], conflicts_with = "gen")]
    nodes: Option<PathBuf>,
    #[arg(long, requires = "nodes")]
    edges: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Generate the graph instead of loading it.
    #[arg(long, value_enum)]
    gen: Option<GenKind>,
    #[command(flatten)]
    params: GenParams,
}

impl DataArgs {
    fn spec(&self) -> Option<DatasetSpec> {
        if let (Some(n), Some(e), Some(s)) = (&self.nodes, &self.edges, &self.schema) {
            return Some(DatasetSpec::Files {
                nodes: n.clone(),
                edges: e.clone(),
                schema: s.clone(),
            });
        }
        self.gen.map(|k| self.params.spec(k))
    }

    /// A database from the flags, else the script's dataset, else an empty
    /// graph over `--schema` alone.
    fn database(&self, script: Option<&WorkloadScript>) -> Result<Database, Failure> {
        if let Some(spec) = self.spec().or_else(|| script.and_then(|s| s.dataset.clone())) {
            return spec.database().map_err(Failure::Statement);
        }
        if let Some(schema) = &self.schema {
            let text = std::fs::read_to_string(schema)
                .with_context(|| format!("reading {}", schema.display()))
                .map_err(Failure::Statement)?;
            let schema = pgview_core::store::GraphSchema::parse(&text).map_err(|e| Failure::Statement(e.into()))?;
            return Ok(Database::new(schema));
        }
        Err(Failure::Usage(
            "no dataset: pass --nodes/--edges/--schema, --gen, or a script with a dataset directive".into(),
        ))
    }
}

enum Failure {
    Usage(String),
    Statement(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Statement(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Statement(e.into())
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Load { nodes, edges, schema, dump } => {
            let ds = Dataset::read_files(&nodes, &edges, &schema).map_err(|e| Failure::Statement(e.into()))?;
            let g = ds.to_graph().map_err(|e| Failure::Statement(e.into()))?;
            writeln!(out, "loaded {} nodes, {} edges", g.node_count(), g.edge_count())?;
            for (label, n) in label_counts(&g) {
                writeln!(out, "  {label}: {n}")?;
            }
            if let Some(dir) = dump {
                Dataset::from_graph(&g).write_dir(&dir)?;
            }
        }
        Command::Gen { kind, params, out: dir } => {
            let ds = params.spec(kind).dataset()?;
            ds.write_dir(&dir)?;
            writeln!(
                out,
                "wrote {} nodes and {} edges to {}",
                ds.nodes.rows.len(),
                ds.edges.rows.len(),
                dir.display()
            )?;
        }
        Command::Run {
            script,
            optimize,
            profile,
            verify_views,
            csv,
            data,
        } => {
            let script = WorkloadScript::from_file(&script)?;
            let mut db = data.database(Some(&script))?;
            let opts = RunOptions {
                optimize,
                profile,
                verify_views,
            };
            let report = workload::run_script(&script, &mut db, opts, &mut out)?;
            write_out(&csv, &report.to_csv())?;
            if !report.failures.is_empty() {
                return Err(Failure::Statement(anyhow::anyhow!(
                    "{} view checks failed",
                    report.failures.len()
                )));
            }
        }
        Command::Bench {
            workload: path,
            reps,
            warmup,
            out: csv,
            data,
        } => {
            let script = match path {
                Some(p) => WorkloadScript::from_file(&p)?,
                None => workload::bundled(),
            };
            let db = data.database(Some(&script))?;
            let report = bench::bench(&script, &db, BenchOptions { reps, warmup })?;
            write!(out, "{}", report.to_text())?;
            write_out(&csv, &report.to_csv())?;
        }
        Command::Scale { counts, view, out: csv, mut data } => {
            if data.spec().is_none() {
                data.gen = Some(GenKind::KnowsGraph);
            }
            let mut db = data.database(None)?;
            let created = db.execute(&view).map_err(|e| Failure::Statement(e.into()))?;
            if let pgview_core::Outcome::ViewCreated(c) = created {
                writeln!(out, "view {} created with {} edges", c.name, c.edges)?;
            }
            let rows = scaling::maintenance_scaling(&db, &counts, data.params.seed)
                .map_err(|e| Failure::Statement(e.into()))?;
            write!(out, "{}", scaling::to_text(&rows))?;
            write_out(&csv, &scaling::to_csv(&rows))?;
        }
        Command::Repl { data } => {
            let db = data.database(None)?;
            let mut repl = Repl::new(db);
            let stdin = io::stdin();
            repl.prompt = stdin.is_terminal();
            if repl.prompt {
                writeln!(out, "pgview shell, :help for commands")?;
            }
            repl.run(stdin.lock(), &mut out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Statement(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
