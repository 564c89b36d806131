//! Random statements covering the grammar, placeholders included.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn gen_node(rng: &mut ChaCha8Rng, vars: &mut Vec<String>) -> String {
    let mut s = String::from("(");
    if rng.gen_bool(0.7) {
        let v = format!("v{}", rng.gen_range(0..4));
        if !vars.contains(&v) {
            vars.push(v.clone());
        }
        s.push_str(&v);
    }
    if rng.gen_bool(0.6) {
        s.push_str([":Person", ":Post", ":$L"][rng.gen_range(0..3)]);
    }
    if rng.gen_bool(0.3) {
        s.push_str([" {id: 3}", " {name: 'ann'}", " {$K: $V}", " {w: 2.5, ok: true}"][rng.gen_range(0..4)]);
    }
    s.push(')');
    s
}

fn gen_rel(rng: &mut ChaCha8Rng, k: usize) -> String {
    let mut body = String::new();
    if rng.gen_bool(0.3) {
        body.push_str(&format!("e{k}"));
    }
    if rng.gen_bool(0.7) {
        body.push_str([":knows", ":replyOf", ":$T"][rng.gen_range(0..3)]);
    }
    if rng.gen_bool(0.5) {
        body.push_str(["*", "*2", "*1..3", "*0..", "*..4", "*2.."][rng.gen_range(0..6)]);
    }
    if rng.gen_bool(0.1) {
        body.push_str(" NoDupEdge");
    }
    let body = if body.is_empty() && rng.gen_bool(0.5) { String::new() } else { format!("[{body}]") };
    match rng.gen_range(0..3) {
        0 => format!("-{body}->"),
        1 => format!("<-{body}-"),
        _ => format!("-{body}-"),
    }
}

pub fn gen_statement(rng: &mut ChaCha8Rng) -> String {
    let mut vars = Vec::new();
    let mut path = gen_node(rng, &mut vars);
    for k in 0..rng.gen_range(0..4) {
        path.push_str(&gen_rel(rng, k));
        path.push_str(&gen_node(rng, &mut vars));
    }
    let mut s = format!("MATCH {path}");
    if let Some(v) = vars.first() {
        if rng.gen_bool(0.3) {
            s.push_str(&format!(" WHERE {v}.id = 7"));
        }
        if rng.gen_bool(0.3) {
            s.push_str(&format!(" WITH {v} MATCH ({v})-[:knows]->(z)"));
            vars = vec![v.clone(), "z".into()];
        }
    }
    if vars.is_empty() || rng.gen_bool(0.2) {
        s.push_str(" RETURN count(*)");
    } else {
        s.push_str(&format!(" RETURN {}", vars.join(", ")));
    }
    if rng.gen_bool(0.15) {
        let again = s.clone();
        s = format!("{s} UNION ALL {again}");
    }
    s
}
