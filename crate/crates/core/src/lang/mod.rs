//! Statement language: lexer, parser, AST, renderer and pattern graphs.

mod ast;
mod lexer;
mod parser;
mod pattern;
mod render;

pub use ast::*;
pub use parser::{parse, split_statements};
pub use pattern::{EdgeLoc, PatternEdge, PatternGraph, PatternNode};
pub use render::render;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("variable `{name}` is not bound")]
    UnboundVariable { name: String },
}

/// Parses a statement that must be a plain query.
pub fn parse_query(text: &str) -> Result<Query, LangError> {
    match parse(text)? {
        Statement::Query(q) => Ok(q),
        _ => Err(LangError::Syntax {
            line: 1,
            column: 1,
            message: "expected a query".into(),
        }),
    }
}

/// Structural rules for a view definition: a two-node construct whose
/// endpoints are the ends of a fully directed, label-only match path.
pub fn validate_view(def: &ViewDefinition) -> Result<(), String> {
    let c = &def.construct;
    if c.segments.len() != 1 {
        return Err("CONSTRUCT must be a single edge between two nodes".into());
    }
    let (rel, _) = &c.segments[0];
    if rel.direction == RelDirection::Undirected {
        return Err("the view edge must be directed".into());
    }
    if rel.range.is_some() || rel.no_dup || !rel.properties.is_empty() {
        return Err("the view edge must be a plain edge".into());
    }
    match &rel.rel_type {
        Some(Name::Ident(t)) if *t == def.name => {}
        _ => return Err(format!("the view edge must have type {}", def.name)),
    }
    for n in c.nodes() {
        if n.variable.is_none() || !n.labels.is_empty() || !n.properties.is_empty() {
            return Err("CONSTRUCT nodes must be bare variables".into());
        }
    }
    let m = &def.match_path;
    if m.segments.is_empty() {
        return Err("the match path needs at least one edge".into());
    }
    let mut seen = std::collections::HashSet::new();
    for n in m.nodes() {
        if n.labels.len() > 1 || n.labels.iter().any(|l| l.as_ident().is_none()) {
            return Err("match nodes take at most one plain label".into());
        }
        if !n.properties.is_empty() {
            return Err("views cannot filter on properties".into());
        }
        if let Some(v) = &n.variable {
            if !seen.insert(v.as_str()) {
                return Err(format!("variable `{v}` repeats in the match path"));
            }
        }
    }
    for r in m.rels() {
        if r.direction == RelDirection::Undirected {
            return Err("view match paths must be fully directed".into());
        }
        match &r.rel_type {
            Some(Name::Ident(_)) => {}
            _ => return Err("every view relationship needs a type".into()),
        }
        if r.no_dup || !r.properties.is_empty() {
            return Err("views cannot filter on relationship properties".into());
        }
        if let Some(v) = &r.variable {
            if !seen.insert(v.as_str()) {
                return Err(format!("variable `{v}` repeats in the match path"));
            }
        }
    }
    let first = m.start.variable.as_deref();
    let last = m.last().variable.as_deref();
    let (a, b) = (c.start.variable.as_deref(), c.segments[0].1.variable.as_deref());
    if first.is_none() || last.is_none() || !((a == first && b == last) || (a == last && b == first)) {
        return Err("CONSTRUCT endpoints must be the first and last match nodes".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(text: &str) -> ViewDefinition {
        match parse(text).unwrap() {
            Statement::CreateView(v) => v,
            _ => panic!(),
        }
    }

    #[test]
    fn view_rules() {
        let ok = "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A)-[:x*..]->(b:B))";
        assert!(validate_view(&view(ok)).is_ok());
        let reversed = "CREATE VIEW V AS (CONSTRUCT (b)-[:V]->(a) MATCH (a:A)-[:x]->(b:B))";
        assert!(validate_view(&view(reversed)).is_ok());
        for bad in [
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A)-[:x]-(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A{k:1})-[:x]->(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A)-[:x {w:1}]->(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:W]->(b) MATCH (a:A)-[:x]->(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(c) MATCH (a:A)-[:x]->(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A)-[]->(b:B))",
            "CREATE VIEW V AS (CONSTRUCT (a)-[:V]->(b) MATCH (a:A:C)-[:x]->(b:B))",
        ] {
            assert!(validate_view(&view(bad)).is_err(), "{bad}");
        }
    }
}
