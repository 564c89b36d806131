//! Random read queries over the Person/Post/Comment vocabulary.

#![allow(dead_code)]

use rand::Rng;

const LABELS: [&str; 3] = ["Person", "Post", "Comment"];
const TYPES: [&str; 3] = ["knows", "replyOf", "hasCreator"];
const RANGES: [&str; 6] = ["", "*..", "*3..", "*1..2", "*2", "*0.."];

/// A single-clause MATCH ... RETURN query with one or two paths.
pub fn random_query(rng: &mut impl Rng) -> String {
    let mut vars: Vec<String> = Vec::new();
    let mut fresh = 0;
    let mut node = |rng: &mut dyn rand::RngCore, vars: &mut Vec<String>| {
        let mut s = String::from("(");
        if !vars.is_empty() && rng.gen_bool(0.15) {
            s.push_str(&vars[rng.gen_range(0..vars.len())]);
        } else if rng.gen_bool(0.5) {
            let v = format!("n{fresh}");
            fresh += 1;
            s.push_str(&v);
            vars.push(v);
        }
        if rng.gen_bool(0.7) {
            s.push(':');
            s.push_str(LABELS[rng.gen_range(0..3)]);
        }
        if rng.gen_bool(0.1) {
            s.push_str(" {id: 1}");
        }
        s.push(')');
        s
    };
    let mut paths = Vec::new();
    let mut rel_vars = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let mut p = node(rng, &mut vars);
        for k in 0..rng.gen_range(1..=4) {
            let var = if rng.gen_bool(0.15) {
                let v = format!("r{}_{k}", paths.len());
                rel_vars.push(v.clone());
                v
            } else {
                String::new()
            };
            let body = format!("[{var}:{}{}]", TYPES[rng.gen_range(0..3)], RANGES[rng.gen_range(0..RANGES.len())]);
            if rng.gen_bool(0.3) {
                p.push_str(&format!("<-{body}-"));
            } else {
                p.push_str(&format!("-{body}->"));
            }
            p.push_str(&node(rng, &mut vars));
        }
        paths.push(p);
    }
    let mut ret: Vec<String> = vars.clone();
    ret.extend(rel_vars);
    let ret = if ret.is_empty() || rng.gen_bool(0.2) {
        "count(*)".to_string()
    } else {
        ret.join(", ")
    };
    format!("MATCH {} RETURN {ret}", paths.join(", "))
}
