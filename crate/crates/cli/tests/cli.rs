use std::io::Cursor;
use std::path::Path;
use std::process::Command;

use pgview::bench::{bench, BenchOptions};
use pgview::csvio::{label_counts, Dataset, LoadError};
use pgview::datagen::{CommentTree, KnowsGraph};
use pgview::repl::Repl;
use pgview::scaling::{maintenance_scaling, ScalingError};
use pgview::workload::{self, run_script, DatasetSpec, Kind, Recover, RunOptions, WorkloadScript};
use pgview_core::store::GraphSchema;
use pgview_core::Database;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn people_schema() -> GraphSchema {
    GraphSchema::new().with_node_label("Person", "id").with_edge_label("knows")
}

fn load(nodes: &str, edges: &str) -> Result<pgview_core::store::PropertyGraph, LoadError> {
    Dataset::read(nodes.as_bytes(), edges.as_bytes(), people_schema())?.to_graph()
}

#[test]
fn loads_small_files() {
    let g = load(
        "label,id,name\nPerson,1,ann\nPerson,2,\n",
        "src_label,src_pk,edge_label,dst_label,dst_pk,since\nPerson,1,knows,Person,2,2019\n",
    )
    .unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    let ann = g.lookup_pk("Person", &pgview_core::store::PropertyValue::Int(1)).unwrap().unwrap();
    assert_eq!(g.node(ann).unwrap().properties.len(), 2);
    let bob = g.lookup_pk("Person", &pgview_core::store::PropertyValue::Int(2)).unwrap().unwrap();
    assert_eq!(g.node(bob).unwrap().properties.len(), 1);
}

#[test]
fn load_errors_name_the_row() {
    let edges = "src_label,src_pk,edge_label,dst_label,dst_pk\nPerson,1,knows,Person,2\nPerson,1,knows,Person,99\n";
    let err = load("label,id\nPerson,1\nPerson,2\n", edges).unwrap_err();
    assert!(matches!(err, LoadError::MissingNode { row: 2, .. }), "{err:?}");
    assert!(err.to_string().contains("row 2"), "{err}");

    let err = load("label,id\nPerson,1\nPerson,1\n", "src_label,src_pk,edge_label,dst_label,dst_pk\n").unwrap_err();
    assert!(err.to_string().starts_with("nodes row 2"), "{err}");
    let err = load("label,id\nPlace,1\n", "src_label,src_pk,edge_label,dst_label,dst_pk\n").unwrap_err();
    assert!(err.to_string().starts_with("nodes row 1"), "{err}");
    let err = load("id,label\n", "src_label,src_pk,edge_label,dst_label,dst_pk\n").unwrap_err();
    assert!(matches!(err, LoadError::Header { file: "nodes", .. }));
    let err = load("label,id\n", "src,dst\n").unwrap_err();
    assert!(matches!(err, LoadError::Header { file: "edges", .. }));
}

#[test]
fn dump_and_reload_keeps_label_counts() {
    let ds = CommentTree { posts: 3, fanout: 3, depth: 3, persons: 7, seed: 2 }.generate();
    let g = ds.to_graph().unwrap();
    let dir = tempfile::tempdir().unwrap();
    Dataset::from_graph(&g).write_dir(dir.path()).unwrap();
    let again = Dataset::read_files(
        &dir.path().join("nodes.csv"),
        &dir.path().join("edges.csv"),
        &dir.path().join("schema.txt"),
    )
    .unwrap()
    .to_graph()
    .unwrap();
    assert_eq!(label_counts(&g), label_counts(&again));
    assert_eq!(label_counts(&g)[2], ("Comment".to_string(), 3 * (3 + 9 + 27)));
}

#[test]
fn comment_tree_shape() {
    let t = CommentTree { posts: 1, fanout: 2, depth: 2, persons: 0, seed: 7 };
    let g = t.generate().to_graph().unwrap();
    let counts = label_counts(&g);
    assert_eq!(
        counts,
        vec![
            ("Person".to_string(), 0),
            ("Post".to_string(), 1),
            ("Comment".to_string(), 6),
            ("replyOf".to_string(), 6),
            ("hasCreator".to_string(), 0),
        ]
    );
    let flat = CommentTree { depth: 0, ..t }.generate().to_graph().unwrap();
    assert_eq!((flat.node_count(), flat.edge_count()), (1, 0));
}

fn csv_bytes(ds: &Dataset) -> (Vec<u8>, Vec<u8>) {
    let (mut n, mut e) = (Vec::new(), Vec::new());
    ds.write(&mut n, &mut e).unwrap();
    (n, e)
}

#[test]
fn generators_are_deterministic() {
    let t = CommentTree { posts: 4, fanout: 3, depth: 3, persons: 10, seed: 7 };
    assert_eq!(csv_bytes(&t.generate()), csv_bytes(&t.generate()));
    assert_ne!(csv_bytes(&t.generate()), csv_bytes(&CommentTree { seed: 8, ..t }.generate()));
    let k = KnowsGraph { persons: 500, layers: 5, degree: 3, seed: 1 };
    assert_eq!(csv_bytes(&k.generate()), csv_bytes(&k.generate()));
}

#[test]
fn knows_edges_go_to_the_next_layer() {
    let k = KnowsGraph { persons: 300, layers: 4, degree: 3, seed: 5 };
    let ds = k.generate();
    assert_eq!(ds.edges.rows.len() as u64, k.edge_count());
    for r in &ds.edges.rows {
        let (s, d): (u64, u64) = (r[1].parse().unwrap(), r[4].parse().unwrap());
        assert_eq!(k.layer_of(d), k.layer_of(s) + 1, "{r:?}");
    }
    // Out-degree is exactly `degree` outside the last layer.
    let mut out = vec![0; 300];
    for r in &ds.edges.rows {
        out[r[1].parse::<usize>().unwrap()] += 1;
    }
    assert!((0..300).all(|p| out[p] == if k.layer_of(p as u64) == 3 { 0 } else { 3 }));
}

#[test]
fn bundled_workload_structure() {
    let w = workload::bundled();
    assert_eq!(w.count(Kind::View), 2);
    assert_eq!(w.count(Kind::Read), 7);
    assert_eq!(w.count(Kind::Write), 3);
    let writes: Vec<_> = w.entries.iter().filter(|e| e.kind == Kind::Write).collect();
    assert_eq!(writes.iter().map(|e| e.name.as_str()).collect::<Vec<_>>(), ["CE", "DE", "DV"]);
    assert!(writes.iter().all(|e| e.recover.is_some()));
    assert_eq!(writes[2].recover, Some(Recover::Snapshot));
    let Some(DatasetSpec::CommentTree(t)) = &w.dataset else { panic!("{:?}", w.dataset) };
    assert!(t.depth >= 8);
    // The write targets described in the script comments.
    assert_eq!(t.level_of(4046), t.depth);
    assert_eq!(t.parent_of(4101), (2, Some(4095)));
    assert_eq!(t.level_of(4101), 3);
    assert_eq!(t.level_of(14342), 4);
}

#[test]
fn script_errors() {
    let base = Path::new(".");
    let e = WorkloadScript::parse("-- recover\nMATCH (a) RETURN a;", base).unwrap_err();
    assert!(e.message.contains("follow a write"), "{e}");
    let e = WorkloadScript::parse("-- read Q\nMATCH (a) RETURN a; MATCH (b) RETURN b;", base).unwrap_err();
    assert!(e.message.contains("exactly one"), "{e}");
    let e = WorkloadScript::parse("-- read Q\nMATCH (a) DELETE a;", base).unwrap_err();
    assert!(e.message.contains("not a read"), "{e}");
    let e = WorkloadScript::parse("MATCH (a) RETURN a;\n\n-- read Q\nMATCH (a RETURN a;", base).unwrap_err();
    assert_eq!(e.line, 4);
    assert!(e.message.contains("syntax error"), "{e}");
    let e = WorkloadScript::parse("-- dataset commentTree posts=x\n", base).unwrap_err();
    assert_eq!(e.line, 1);

    let w = WorkloadScript::parse("MATCH (a) RETURN a;\nMATCH (a) DETACH DELETE a;\n-- just a note\n", base).unwrap();
    assert_eq!(w.entries.iter().map(|e| e.kind).collect::<Vec<_>>(), [Kind::Read, Kind::Write]);
    assert_eq!(w.entries[1].line, 1);
}

const SMALL: &str = "\
-- dataset commentTree posts=3 fanout=2 depth=4 persons=4 seed=1
-- view
CREATE VIEW ROOT_POST AS (CONSTRUCT (c)-[:ROOT_POST]->(p) MATCH (c:Comment)-[:replyOf*..]->(p:Post));
-- read Q1
MATCH (n:Comment)-[:replyOf*..]->(m:Post) RETURN n, m;
-- read Q2
MATCH (n:Comment)-[:replyOf*..]->(m:Post)-[:hasCreator]->(u:Person) RETURN count(*);
-- write DE
MATCH (c:Comment {id: 2})-[r:replyOf]->(:Comment {id: 0}) DELETE r;
-- recover
MATCH (c:Comment {id: 2}), (p:Comment {id: 0}) CREATE (c)-[:replyOf]->(p);
-- write DV
MATCH (c:Comment {id: 1}) DELETE c;
-- recover snapshot
";

fn small() -> (WorkloadScript, Database) {
    let w = WorkloadScript::parse(SMALL, Path::new(".")).unwrap();
    let db = w.dataset.as_ref().unwrap().database().unwrap();
    (w, db)
}

#[test]
fn run_reports_columns_by_mode() {
    let (w, db) = small();
    let mut out = Vec::new();
    let plain = run_script(&w, &mut db.clone(), RunOptions::default(), &mut out).unwrap();
    let csv = plain.to_csv();
    assert!(csv.starts_with("statement,kind,rows,oriTimeMs,oriDbHit\n"), "{csv}");
    assert!(!csv.contains("optDbHit"));
    assert_eq!(csv.lines().count(), 1 + 5);

    let opts = RunOptions {
        optimize: true,
        profile: true,
        verify_views: true,
    };
    let mut out = Vec::new();
    let fast = run_script(&w, &mut db.clone(), opts, &mut out).unwrap();
    assert!(fast.failures.is_empty(), "{:?}", fast.failures);
    assert!(fast.to_csv().starts_with("statement,kind,rows,optVpgTimeMs,optTimeMs,optDbHit,rewrites\n"));
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("verify after recovering DE: ROOT_POST: consistent"), "{text}");
    assert!(text.contains("DB Hits"), "{text}");
    for (a, b) in plain.rows.iter().zip(&fast.rows) {
        assert_eq!(a.rows, b.rows, "{}", a.name);
    }
    let q1 = &fast.rows[1];
    assert_eq!(q1.vpg.unwrap().1, 1);
    assert!(q1.db_hit < plain.rows[1].db_hit);
}

#[test]
fn verify_passes_on_random_writes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = CommentTree { posts: 3, fanout: 2, depth: 4, persons: 0, seed: 1 };
    let n = t.comment_count();
    let mut script = String::from(
        "-- view\nCREATE VIEW ROOT_POST AS (CONSTRUCT (c)-[:ROOT_POST]->(p) MATCH (c:Comment)-[:replyOf*..]->(p:Post));\n",
    );
    for i in 0..40 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => script.push_str(&format!(
                "-- write W{i}\nMATCH (a:Comment {{id: {a}}}), (b:Comment {{id: {b}}}) CREATE (a)-[:replyOf]->(b);\n"
            )),
            1 => script.push_str(&format!("-- write W{i}\nMATCH (a:Comment {{id: {a}}})-[r:replyOf]->() DELETE r;\n")),
            _ => script.push_str(&format!("-- write W{i}\nMATCH (a:Comment {{id: {a}}}) DELETE a;\n")),
        }
        if rng.gen_bool(0.5) {
            script.push_str("-- recover snapshot\n");
        }
    }
    let w = WorkloadScript::parse(&script, Path::new(".")).unwrap();
    let mut db = Database::from_graph(t.generate().to_graph().unwrap());
    let opts = RunOptions {
        optimize: true,
        verify_views: true,
        ..Default::default()
    };
    let report = run_script(&w, &mut db, opts, &mut std::io::sink()).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
}

#[test]
fn bundled_recovers_restore_every_view() {
    let w = workload::bundled();
    let mut db = w.dataset.as_ref().unwrap().database().unwrap();
    let opts = RunOptions {
        optimize: true,
        verify_views: true,
        ..Default::default()
    };
    let report = run_script(&w, &mut db, opts, &mut std::io::sink()).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
}

#[test]
fn bench_single_shot_and_write_overhead() {
    let (w, db) = small();
    let r = bench(&w, &db, BenchOptions { reps: 1, warmup: 0 }).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert_eq!(r.views.len(), 1);
    let sum: f64 = r.rows.iter().map(|x| x.ori_time_ms).sum();
    assert_eq!(r.w_ori(), sum);
    let csv = r.to_csv();
    assert!(csv.contains("Wori/(MV+Wopt)"));
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 9);

    // Writes pay for maintenance, so the optimized side is slower.
    let writes = "\
-- view
CREATE VIEW ROOT_POST AS (CONSTRUCT (c)-[:ROOT_POST]->(p) MATCH (c:Comment)-[:replyOf*..]->(p:Post));
-- write DE
MATCH (c:Comment {id: 2})-[r:replyOf]->() DELETE r;
-- recover
MATCH (c:Comment {id: 2}), (p:Comment {id: 0}) CREATE (c)-[:replyOf]->(p);
-- write DE2
MATCH (c:Comment {id: 3})-[r:replyOf]->() DELETE r;
-- recover
MATCH (c:Comment {id: 3}), (p:Comment {id: 0}) CREATE (c)-[:replyOf]->(p);
";
    let w = WorkloadScript::parse(writes, Path::new(".")).unwrap();
    let t = CommentTree { posts: 4, fanout: 2, depth: 9, persons: 0, seed: 1 };
    let db = Database::from_graph(t.generate().to_graph().unwrap());
    let r = bench(&w, &db, BenchOptions::default()).unwrap();
    for row in &r.rows {
        assert!(row.opt_db_hit > row.ori_db_hit, "{row:?}");
    }
    assert!(r.ratio() <= 1.0, "{}", r.to_text());
}

#[test]
fn scaling_edge_cases() {
    let k = KnowsGraph { persons: 200, layers: 4, degree: 2, seed: 3 };
    let mut db = Database::from_graph(k.generate().to_graph().unwrap());
    db.execute("CREATE VIEW K2 AS (CONSTRUCT (s)-[:K2]->(d) MATCH (s:Person)-[:knows*2..]->(d:Person))")
        .unwrap();
    let rows = maintenance_scaling(&db, &[0, 5], 1).unwrap();
    assert_eq!((rows[0].count, rows[0].maintenance_db_hit), (0, 0));
    assert!(rows[1].maintenance_db_hit > 0);
    let err = maintenance_scaling(&db, &[1, 10_000], 1).unwrap_err();
    assert!(matches!(err, ScalingError::InsufficientEdges { wanted: 10_000, .. }), "{err}");
    // The source database is untouched.
    assert_eq!(db.check_all().unwrap().len(), 1);
    assert_eq!(db.graph().edges().filter(|e| !e.is_view).count() as u64, k.edge_count());
}

fn repl(db: Database, input: &str) -> String {
    let mut r = Repl::new(db);
    r.prompt = false;
    let mut out = Vec::new();
    r.run(Cursor::new(input), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn repl_session() {
    let t = CommentTree { posts: 2, fanout: 2, depth: 3, persons: 2, seed: 1 };
    let db = Database::from_graph(t.generate().to_graph().unwrap());
    let out = repl(
        db,
        ":views\n\
         CREATE VIEW ROOT_POST AS (CONSTRUCT (c)-[r:ROOT_POST]->(p) MATCH (c:Comment)-[:replyOf*..]->(p:Post));\n\
         :views\n\
         MATCH (n:Comment RETURN n\n\
         :explain MATCH (n:Comment)-[:replyOf*..]->(m:Post) RETURN n, m\n\
         MATCH (n:Comment)-[:replyOf*..]->(m:Post) RETURN count(*)\n\
         :verify\n\
         :templates ROOT_POST\n\
         :bogus\n\
         :quit\n\
         MATCH (n) RETURN n\n",
    );
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "no views");
    assert!(lines.contains(&"ROOT_POST, edges=28, templates=3/1/1"), "{out}");
    assert!(out.contains("error: syntax error"), "{out}");
    assert!(out.contains("rewritten: MATCH (n:Comment)-[:ROOT_POST]->(m:Post) RETURN n, m"), "{out}");
    assert!(lines.contains(&"28"), "{out}");
    assert!(out.contains("ROOT_POST: consistent (28 edges)"), "{out}");
    assert!(out.contains("create edge:"), "{out}");
    assert!(out.contains("unknown command `:bogus`"), "{out}");
    // Nothing after :quit runs.
    assert!(!out.contains("n0 |") && !out.trim_end().ends_with("rows"), "{out}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pgview"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["gen", "--kind", "commentTree", "--posts", "2", "--depth", "3", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let out = bin()
        .arg("load")
        .arg("--nodes")
        .arg(dir.path().join("nodes.csv"))
        .arg("--edges")
        .arg(dir.path().join("edges.csv"))
        .arg("--schema")
        .arg(dir.path().join("schema.txt"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Comment: 28"));

    assert_eq!(bin().arg("frobnicate").status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["gen", "--kind", "tree"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["repl"]).status().unwrap().code(), Some(2));

    let script = dir.path().join("bad.pgw");
    std::fs::write(&script, "-- read Q\nMATCH (a:Comment)-[:replyOf]->(b:Nope) RETURN a;\n").unwrap();
    let out = bin()
        .args(["run", "--gen", "commentTree", "--posts", "1", "--depth", "2", "--script"])
        .arg(&script)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&script, "-- read Q\nMATCH (a:Comment RETURN a;\n").unwrap();
    let out = bin().args(["run", "--gen", "commentTree", "--script"]).arg(&script).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&out.stderr));
}
