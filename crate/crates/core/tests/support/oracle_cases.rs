//! Random small graphs and single-path patterns for checking the matcher
//! against the brute-force trail enumerator.

#![allow(dead_code)]

use pgview_core::exec::{QueryResult, Value};
use pgview_core::store::{GraphSchema, Properties, PropertyValue};
use pgview_core::Database;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::trail_oracle::{Cell, Dir, Pattern, Seg};

pub fn schema() -> GraphSchema {
    GraphSchema::new()
        .with_node_label("A", "id")
        .with_node_label("B", "id")
        .with_edge_label("x")
        .with_edge_label("y")
}

fn id(v: i64) -> Properties {
    Properties::from([("id".to_string(), PropertyValue::Int(v))])
}

/// Up to six nodes and eight edges, self loops and parallel edges allowed.
pub fn random_graph(rng: &mut ChaCha8Rng) -> Database {
    let mut db = Database::new(schema());
    let n = rng.gen_range(1..=6);
    let nodes: Vec<_> = (0..n)
        .map(|i| db.create_node(if rng.gen_bool(0.5) { "A" } else { "B" }, id(i)).unwrap())
        .collect();
    for _ in 0..rng.gen_range(0..=8) {
        let a = nodes[rng.gen_range(0..n as usize)];
        let b = nodes[rng.gen_range(0..n as usize)];
        let t = if rng.gen_bool(0.7) { "x" } else { "y" };
        db.create_edge(a, b, t, Properties::new()).unwrap();
    }
    db
}

const RANGES: [Option<(u32, Option<u32>)>; 5] = [Some((0, Some(0))), None, Some((1, None)), Some((2, Some(3))), Some((3, None))];

pub fn random_pattern(rng: &mut ChaCha8Rng) -> Pattern {
    let segs = rng.gen_range(1..=3);
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| -> Option<String> {
        let i = rng.gen_range(0..=xs.len());
        xs.get(i).map(|s| s.to_string())
    };
    let mut vars: Vec<String> = (0..=segs).map(|i| format!("n{i}")).collect();
    if segs >= 2 && rng.gen_bool(0.2) {
        vars[segs] = "n0".to_string();
    }
    let mut labels: Vec<Option<String>> = (0..=segs).map(|_| pick(rng, &["A", "B"])).collect();
    if vars[segs] == "n0" {
        labels[segs] = labels[0].clone();
    }
    Pattern {
        labels,
        vars,
        segs: (0..segs)
            .map(|_| Seg {
                ty: pick(rng, &["x", "y", "x"]),
                dir: [Dir::Right, Dir::Left, Dir::Both][rng.gen_range(0..3)],
                range: RANGES[rng.gen_range(0..RANGES.len())],
            })
            .collect(),
    }
}

/// Query rows as sorted oracle cells.
pub fn to_cells(r: &QueryResult) -> Vec<Vec<Cell>> {
    let mut out: Vec<Vec<Cell>> = r
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::Node(n) => Cell::Node(*n),
                    Value::Edge(e) => Cell::Edge(*e),
                    Value::Path(p) => Cell::Path(p.clone()),
                    Value::Int(_) => panic!("unexpected number"),
                })
                .collect()
        })
        .collect();
    out.sort();
    out
}
