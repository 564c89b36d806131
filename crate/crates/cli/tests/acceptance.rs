//! Acceptance suite: one line per criterion, `[PASS]` or `[FAIL]`.

#[path = "../../core/tests/support/listings.rs"]
mod listings;
#[path = "../../core/tests/support/oracle_cases.rs"]
mod oracle_cases;
#[path = "../../core/tests/support/random_queries.rs"]
mod random_queries;
#[path = "../../core/tests/support/statements.rs"]
mod statements;
#[path = "../../core/tests/support/trail_oracle.rs"]
mod trail_oracle;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pgview::bench::{bench, BenchOptions, BenchReport};
use pgview::datagen::{CommentTree, KnowsGraph};
use pgview::scaling::{maintenance_scaling, r_squared};
use pgview::workload::{self, Kind, Recover};
use pgview_core::lang::{self, parse, render, PatternGraph, Statement};
use pgview_core::opt::{self, OptimizerOptions};
use pgview_core::store::{EdgeId, NodeId, Properties, PropertyValue};
use pgview_core::views::templates::{gen_delete_node_template, gen_update_edge_template, TemplateSet};
use pgview_core::Database;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TEMPLATE_BUDGET: Duration = Duration::from_secs(1);
const FUZZ_MUTATIONS: usize = 1000;
const FUZZ_WEIGHTS: [u32; 4] = [40, 10, 40, 10];
const FUZZ_BUDGET: Duration = Duration::from_secs(60);
const COST_GRAPHS: u64 = 10;
const MIN_DBHIT_REDUCTION: f64 = 5.0;
const MIN_FIG4_SPEEDUP: f64 = 2.0;
const MIN_WORKLOAD_RATIO: f64 = 1.5;
const MIN_WORKLOAD_RATIO_WITH_MV: f64 = 1.0;
const SCALING_COUNTS: [usize; 4] = [1, 10, 100, 1000];
const SCALING_MIN_EDGES: u64 = 20_000;
const MIN_R_SQUARED: f64 = 0.98;
const SCALING_BUDGET: Duration = Duration::from_secs(120);
const MAX_VPG_FRACTION: f64 = 0.01;
const RANDOM_QUERIES: usize = 500;
const ORACLE_GRAPHS: usize = 200;
const GENERATED_STATEMENTS: usize = 100;

const ROOT_POST: &str =
    "CREATE VIEW ROOT_POST AS (CONSTRUCT (c)-[:ROOT_POST]->(p) MATCH (c:Comment)-[:replyOf*..]->(p:Post))";
const INDIRECT_KNOW: &str =
    "CREATE VIEW INDIRECT_KNOW AS (CONSTRUCT (s)-[:INDIRECT_KNOW]->(d) MATCH (s:Person)-[:knows*3..]->(d:Person))";

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn templates() -> Outcome {
    let t = Instant::now();
    let v = listings::view(listings::INDIRECT_KNOW);
    let del: Vec<_> = gen_delete_node_template(&v).into_iter().map(|t| t.statement).collect();
    let cre: Vec<_> = gen_update_edge_template(&v, true).into_iter().map(|t| t.statement).collect();
    let del_ok = del == listings::queries(&listings::DELETE_NODE);
    let cre_ok = cre == listings::queries(&listings::CREATE_EDGE);
    let took = t.elapsed();
    check(
        del.len() == 4 && cre.len() == 3 && del_ok && cre_ok && took < TEMPLATE_BUDGET,
        format!(
            "{} delete-node statements (match: {del_ok}), {} create-edge statements (match: {cre_ok}) in {took:.2?}",
            del.len(),
            cre.len()
        ),
    )
}

/// How the fuzzer grows a particular dataset.
struct Grower {
    new_label: fn(&mut ChaCha8Rng) -> &'static str,
    /// Picks (src, dst, type) among live nodes; edges always point from a
    /// younger to an older node, or the reverse, so the graph stays acyclic.
    new_edge: fn(&mut ChaCha8Rng, &Database, &[NodeId]) -> Option<(NodeId, NodeId, &'static str)>,
}

fn label_of(db: &Database, n: NodeId) -> &str {
    db.graph().label_name(db.graph().node(n).unwrap().label)
}

fn reply_edge(rng: &mut ChaCha8Rng, db: &Database, live: &[NodeId]) -> Option<(NodeId, NodeId, &'static str)> {
    for _ in 0..20 {
        let a = live[rng.gen_range(0..live.len())];
        let b = live[rng.gen_range(0..live.len())];
        let (src, dst) = if a > b { (a, b) } else { (b, a) };
        if src != dst && label_of(db, src) == "Comment" {
            return Some((src, dst, "replyOf"));
        }
    }
    None
}

fn knows_edge(rng: &mut ChaCha8Rng, _: &Database, live: &[NodeId]) -> Option<(NodeId, NodeId, &'static str)> {
    let a = live[rng.gen_range(0..live.len())];
    let b = live[rng.gen_range(0..live.len())];
    (a != b).then(|| (a.min(b), a.max(b), "knows"))
}

fn fuzz_one(mut db: Database, grow: Grower, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = WeightedIndex::new(FUZZ_WEIGHTS).unwrap();
    let mut live: Vec<NodeId> = db.graph().nodes().map(|n| n.id).collect();
    let mut next_pk = 10_000_000i64;
    let mut applied = 0;
    for step in 0..FUZZ_MUTATIONS {
        let op = ops.sample(&mut rng);
        let what = match op {
            0 => {
                let label = (grow.new_label)(&mut rng);
                next_pk += 1;
                let props = Properties::from([("id".to_string(), PropertyValue::Int(next_pk))]);
                live.push(db.create_node(label, props).map_err(|e| e.to_string())?);
                format!("create {label}")
            }
            1 if !live.is_empty() => {
                let n = live.swap_remove(rng.gen_range(0..live.len()));
                db.delete_node(n).map_err(|e| e.to_string())?;
                format!("delete node {n}")
            }
            2 => match (grow.new_edge)(&mut rng, &db, &live) {
                Some((s, d, t)) => {
                    db.create_edge(s, d, t, Properties::new()).map_err(|e| e.to_string())?;
                    format!("create edge {s}->{d}")
                }
                None => continue,
            },
            3 => {
                let base: Vec<EdgeId> = db.graph().edges().filter(|e| !e.is_view).map(|e| e.id).collect();
                if base.is_empty() {
                    continue;
                }
                let e = base[rng.gen_range(0..base.len())];
                db.delete_edge(e).map_err(|e| e.to_string())?;
                format!("delete edge {e}")
            }
            _ => continue,
        };
        applied += 1;
        for r in db.check_all().map_err(|e| e.to_string())? {
            if !r.is_consistent() {
                return Err(format!("step {step} ({what}): {r}"));
            }
        }
    }
    Ok(applied)
}

fn fuzz() -> Outcome {
    let t = Instant::now();
    let tree = CommentTree { posts: 5, fanout: 2, depth: 9, persons: 0, seed: 11 };
    let mut a = Database::from_graph(tree.generate().to_graph().unwrap());
    a.execute(ROOT_POST).unwrap();
    let a_nodes = a.graph().node_count();
    let knows = KnowsGraph { persons: 5000, layers: 5, degree: 2, seed: 12 };
    let mut b = Database::from_graph(knows.generate().to_graph().unwrap());
    b.execute(INDIRECT_KNOW).unwrap();
    let b_views = b.catalog().get("INDIRECT_KNOW").unwrap().edge_count(b.graph());

    let ra = fuzz_one(
        a,
        Grower {
            new_label: |rng| if rng.gen_bool(0.9) { "Comment" } else { "Post" },
            new_edge: reply_edge,
        },
        21,
    );
    let rb = fuzz_one(
        b,
        Grower {
            new_label: |_| "Person",
            new_edge: knows_edge,
        },
        22,
    );
    let took = t.elapsed();
    match (ra, rb) {
        (Ok(x), Ok(y)) => check(
            took < FUZZ_BUDGET,
            format!(
                "commentTree ({a_nodes} nodes, ROOT_POST) {x} mutations, knowsGraph (5000 nodes, \
                 INDIRECT_KNOW {b_views} edges) {y} mutations, consistent after each, {took:.1?}"
            ),
        ),
        (Err(e), _) => Err(format!("commentTree: {e}")),
        (_, Err(e)) => Err(format!("knowsGraph: {e}")),
    }
}

fn equivalence() -> Outcome {
    let w = workload::bundled();
    let mut db = w.dataset.as_ref().unwrap().database().unwrap();
    let mut reads = 0;
    let mut rewritten = 0;
    for e in &w.entries {
        match e.kind {
            Kind::View => {
                db.execute_statement(&e.statement).unwrap();
            }
            Kind::Read => {
                let (plain, _) = db.run_unoptimized(&e.statement).unwrap();
                let o = opt::optimize(&e.statement, db.catalog(), db.graph(), OptimizerOptions::default());
                let (fast, _) = db.run_unoptimized(&o.statement).unwrap();
                if plain.sorted_rows() != fast.sorted_rows() {
                    return Err(format!("{}: {} rows unoptimized, {} optimized", e.name, plain.rows.len(), fast.rows.len()));
                }
                reads += 1;
                rewritten += usize::from(o.total_rewrites() > 0);
            }
            Kind::Write => {}
        }
    }
    check(reads == 7, format!("{reads} reads, {rewritten} rewritten, identical row multisets"))
}

fn random_forum(rng: &mut ChaCha8Rng) -> Database {
    let mut db = Database::new(CommentTree::schema());
    let id = |v: i64| Properties::from([("id".to_string(), PropertyValue::Int(v))]);
    let mut targets = Vec::new();
    for i in 0..rng.gen_range(1..6) {
        targets.push(db.create_node("Post", id(i)).unwrap());
    }
    for i in 0..rng.gen_range(0..300) {
        let c = db.create_node("Comment", id(i)).unwrap();
        let parent = targets[rng.gen_range(0..targets.len())];
        db.create_edge(c, parent, "replyOf", Properties::new()).unwrap();
        targets.push(c);
    }
    db
}

fn cost_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = Vec::new();
    for g in 0..COST_GRAPHS {
        let (mut db, view, q) = if g % 2 == 0 {
            (random_forum(&mut rng), ROOT_POST, "MATCH (c:Comment)-[:ROOT_POST]->(p:Post) RETURN c, p")
        } else {
            let k = KnowsGraph {
                persons: rng.gen_range(20..400),
                layers: rng.gen_range(2..7),
                degree: rng.gen_range(1..4),
                seed: rng.gen(),
            };
            (
                Database::from_graph(k.generate().to_graph().unwrap()),
                INDIRECT_KNOW,
                "MATCH (s:Person)-[:INDIRECT_KNOW]->(d:Person) RETURN s, d",
            )
        };
        db.execute(view).unwrap();
        let stats = db.catalog().iter().next().unwrap().stats(db.graph());
        let expected = stats.n_start_label + 2 * stats.e_view_label;
        let (_, profile) = db.profile(q).unwrap();
        if profile.total_db_hits() != expected {
            return Err(format!("graph {g}: measured {} expected {expected}", profile.total_db_hits()));
        }
        checked.push(expected);
    }
    Ok(format!("{COST_GRAPHS} graphs, DBHit = N + 2E exactly (values {checked:?})"))
}

fn bundled_bench() -> BenchReport {
    let w = workload::bundled();
    let db = w.dataset.as_ref().unwrap().database().unwrap();
    bench(&w, &db, BenchOptions::default()).unwrap()
}

fn speedup(r: &BenchReport, nodes: usize) -> Outcome {
    let q1 = r.row("Q1").unwrap();
    let reduction = q1.ori_db_hit as f64 / q1.opt_db_hit as f64;
    check(
        reduction > MIN_DBHIT_REDUCTION
            && q1.speedup() > MIN_FIG4_SPEEDUP
            && r.ratio() > MIN_WORKLOAD_RATIO
            && r.ratio_with_mv() > MIN_WORKLOAD_RATIO_WITH_MV,
        format!(
            "{nodes} nodes; Q1 dbhits {} -> {} ({reduction:.2}x), time {:.2}x; Wori/Wopt {:.2}, Wori/(MV+Wopt) {:.2}",
            q1.ori_db_hit,
            q1.opt_db_hit,
            q1.speedup(),
            r.ratio(),
            r.ratio_with_mv()
        ),
    )
}

fn linearity() -> Outcome {
    let t = Instant::now();
    let k = KnowsGraph { persons: 8500, layers: 5, degree: 3, seed: 41 };
    let mut db = Database::from_graph(k.generate().to_graph().unwrap());
    let edges = db.graph().edge_count() as u64;
    db.execute(INDIRECT_KNOW).unwrap();
    let rows = maintenance_scaling(&db, &SCALING_COUNTS, 42).map_err(|e| e.to_string())?;
    let r2 = r_squared(&rows);
    let took = t.elapsed();
    let hits: Vec<u64> = rows.iter().map(|r| r.maintenance_db_hit).collect();
    check(
        edges >= SCALING_MIN_EDGES && r2 >= MIN_R_SQUARED && took < SCALING_BUDGET,
        format!("{edges} base edges, dbhits {hits:?} for counts {SCALING_COUNTS:?}, R^2 {r2:.5}, {took:.1?}"),
    )
}

fn negligible_rewrite(r: &BenchReport) -> Outcome {
    let mut worst = (String::new(), 0.0);
    for row in r.rows.iter().filter(|x| x.kind == Kind::Read) {
        let f = row.opt_vpg_time_ms / row.ori_time_ms;
        if f > worst.1 {
            worst = (row.name.clone(), f);
        }
    }
    check(
        worst.1 < MAX_VPG_FRACTION,
        format!("largest optVpgTime/oriTime {:.4}% ({})", worst.1 * 100.0, worst.0),
    )
}

fn termination() -> Outcome {
    let t = CommentTree { posts: 3, fanout: 3, depth: 3, persons: 5, seed: 51 };
    let mut ds = t.generate();
    ds.schema = ds.schema.with_edge_label("knows");
    for p in 0..4u64 {
        ds.edges.rows.push(
            ["Person", &p.to_string(), "knows", "Person", &(p + 1).to_string()]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        );
    }
    let mut db = Database::from_graph(ds.to_graph().unwrap());
    for v in [
        ROOT_POST,
        "CREATE VIEW ROOT_POST_CREATOR AS (CONSTRUCT (c)-[:ROOT_POST_CREATOR]->(u) \
         MATCH (c:Comment)-[:replyOf*..]->(:Post)-[:hasCreator]->(u:Person))",
        "CREATE VIEW K3 AS (CONSTRUCT (s)-[:K3]->(d) MATCH (s:Person)-[:knows*3..]->(d:Person))",
        "CREATE VIEW REPLY AS (CONSTRUCT (a)-[:REPLY]->(b) MATCH (a:Comment)-[:replyOf]->(b))",
    ] {
        db.execute(v).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let mut total = 0;
    let mut most = 0;
    for i in 0..RANDOM_QUERIES {
        let q = random_queries::random_query(&mut rng);
        let stmt = parse(&q).map_err(|e| format!("{q}: {e}"))?;
        let Statement::Query(query) = &stmt else { unreachable!() };
        let edges = PatternGraph::build(query.clone()).edges.len();
        let o = opt::optimize(&stmt, db.catalog(), db.graph(), OptimizerOptions::default());
        for a in &o.attempts {
            if a.rewrites > edges {
                return Err(format!("query {i}: {} rewrites by {} with {edges} edges: {q}", a.rewrites, a.view));
            }
            most = most.max(a.rewrites);
        }
        total += o.total_rewrites();
    }
    Ok(format!("{RANDOM_QUERIES} queries, {total} rewrites, at most {most} per view, never above |Q edges|"))
}

fn executor_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut rows = 0;
    for case in 0..ORACLE_GRAPHS {
        let mut db = oracle_cases::random_graph(&mut rng);
        let pattern = oracle_cases::random_pattern(&mut rng);
        let q = pattern.to_cypher();
        let expected = trail_oracle::enumerate(db.graph(), &pattern, db.graph().edge_count() as u32);
        let got = oracle_cases::to_cells(&db.execute(&q).map_err(|e| format!("{q}: {e}"))?.into_result());
        if got != expected {
            return Err(format!("case {case}: {q}: {} rows, oracle {}", got.len(), expected.len()));
        }
        rows += got.len();
    }
    Ok(format!("{ORACLE_GRAPHS} graphs, {rows} rows, identical to brute-force trails"))
}

fn round_trip() -> Outcome {
    let mut texts: Vec<String> = Vec::new();
    let w = workload::bundled();
    for e in &w.entries {
        texts.push(render(&e.statement));
        if let Some(Recover::Statement(s)) = &e.recover {
            texts.push(render(s));
        }
    }
    texts.extend(workload::BUNDLED.split(';').filter(|t| t.contains("CREATE VIEW")).map(|t| {
        t.lines().filter(|l| !l.trim_start().starts_with("--")).collect::<Vec<_>>().join("\n")
    }));
    texts.extend(listings::DELETE_NODE.iter().chain(&listings::CREATE_EDGE).map(|s| s.to_string()));
    let mut template_count = 0;
    for def in [listings::INDIRECT_KNOW, listings::ROOT_POST] {
        texts.push(def.to_string());
        let set = TemplateSet::generate(&listings::view(def));
        for t in set.delete_node.iter().chain(&set.create_edge).chain(&set.delete_edge) {
            texts.push(t.statement.to_string());
            template_count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..GENERATED_STATEMENTS {
        texts.push(statements::gen_statement(&mut rng));
    }
    for t in &texts {
        let first = lang::parse(t).map_err(|e| format!("{t}: {e}"))?;
        let rendered = render(&first);
        let second = lang::parse(&rendered).map_err(|e| format!("{rendered}: {e}"))?;
        if first != second || render(&second) != rendered {
            return Err(format!("not a fixpoint: {t}"));
        }
    }
    Ok(format!(
        "{} statements ({template_count} templates, {GENERATED_STATEMENTS} generated) are parse/render fixpoints",
        texts.len()
    ))
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = t.elapsed().as_secs_f64();
    match r {
        Ok(msg) => {
            println!("[PASS] {n:>2} {name}: {msg} ({secs:.2} s)");
            true
        }
        Err(msg) => {
            println!("[FAIL] {n:>2} {name}: {msg} ({secs:.2} s)");
            false
        }
    }
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mut ok = true;
    ok &= run(1, "template goldens", templates);
    ok &= run(2, "consistency fuzz", fuzz);
    ok &= run(3, "query equivalence", equivalence);
    ok &= run(4, "view scan cost", cost_model);
    let report = panic::catch_unwind(bundled_bench).ok();
    let nodes = workload::bundled().dataset.map(|d| d.dataset().unwrap().nodes.rows.len()).unwrap_or(0);
    ok &= run(5, "desk-scale speedup", || speedup(report.as_ref().ok_or("benchmark panicked")?, nodes));
    ok &= run(6, "maintenance linearity", linearity);
    ok &= run(7, "rewrite negligibility", || negligible_rewrite(report.as_ref().ok_or("benchmark panicked")?));
    ok &= run(8, "optimizer termination bound", termination);
    ok &= run(9, "executor oracle", executor_oracle);
    ok &= run(10, "parser round-trip", round_trip);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
