//! Canonical text form of statements. Parsing the output yields an equal AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

impl Display for Name {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Name::Ident(s) => f.write_str(s),
            Name::Placeholder(s) => write!(f, "${s}"),
        }
    }
}

impl Display for ValueExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ValueExpr::Literal(v) => write!(f, "{v}"),
            ValueExpr::Placeholder(s) => write!(f, "${s}"),
        }
    }
}

fn write_props(f: &mut Formatter<'_>, props: &PropertyFilter) -> fmt::Result {
    f.write_char('{')?;
    for (i, (k, v)) in props.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{k}: {v}")?;
    }
    f.write_char('}')
}

impl Display for NodePattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        if let Some(v) = &self.variable {
            f.write_str(v)?;
        }
        for l in &self.labels {
            write!(f, ":{l}")?;
        }
        if !self.properties.is_empty() {
            write_props(f, &self.properties)?;
        }
        f.write_char(')')
    }
}

impl Display for Range {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(max) if max == self.min => write!(f, "*{max}"),
            Some(max) => write!(f, "*{}..{max}", self.min),
            None => write!(f, "*{}..", self.min),
        }
    }
}

impl Display for RelPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(if self.direction == RelDirection::Left { "<-" } else { "-" })?;
        let empty = self.variable.is_none()
            && self.rel_type.is_none()
            && self.range.is_none()
            && !self.no_dup
            && self.properties.is_empty();
        if !empty {
            f.write_char('[')?;
            if let Some(v) = &self.variable {
                f.write_str(v)?;
            }
            if let Some(t) = &self.rel_type {
                write!(f, ":{t}")?;
            }
            if let Some(r) = &self.range {
                write!(f, "{r}")?;
            }
            if self.no_dup {
                f.write_str(" NoDupEdge")?;
            }
            if !self.properties.is_empty() {
                f.write_char(' ')?;
                write_props(f, &self.properties)?;
            }
            f.write_char(']')?;
        }
        f.write_str(if self.direction == RelDirection::Right { "->" } else { "-" })
    }
}

impl Display for PathPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (r, n) in &self.segments {
            write!(f, "{r}{n}")?;
        }
        Ok(())
    }
}

impl Display for Predicate {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::PropEq { var, key, value } => write!(f, "{var}.{key} = {value}"),
            Predicate::IdEq { var, value } => write!(f, "id({var}) = {value}"),
        }
    }
}

fn join<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl Display for ReturnItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ReturnItem::Var(v) => f.write_str(v),
            ReturnItem::CountStar => f.write_str("count(*)"),
        }
    }
}

impl Display for Clause {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Match { paths, predicates } => {
                f.write_str("MATCH ")?;
                join(f, paths, ", ")?;
                if !predicates.is_empty() {
                    f.write_str(" WHERE ")?;
                    join(f, predicates, " AND ")?;
                }
                Ok(())
            }
            Clause::With { vars } => {
                f.write_str("WITH ")?;
                join(f, vars, ", ")
            }
            Clause::Return { items } => {
                f.write_str("RETURN ")?;
                join(f, items, ", ")
            }
            Clause::Create { paths } => {
                f.write_str("CREATE ")?;
                join(f, paths, ", ")
            }
            Clause::Delete { vars, detach } => {
                f.write_str(if *detach { "DETACH DELETE " } else { "DELETE " })?;
                join(f, vars, ", ")
            }
        }
    }
}

impl Display for Query {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        join(f, &self.clauses, " ")
    }
}

impl Display for ViewDefinition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CREATE VIEW {} AS (CONSTRUCT {} MATCH {})",
            self.name, self.construct, self.match_path
        )
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Query(q) => write!(f, "{q}"),
            Statement::Union { parts, all } => join(f, parts, if *all { " UNION ALL " } else { " UNION " }),
            Statement::CreateView(v) => write!(f, "{v}"),
            Statement::DropView(name) => write!(f, "DROP VIEW {name}"),
        }
    }
}

/// Renders a statement in its canonical single-line form.
pub fn render(stmt: &Statement) -> String {
    stmt.to_string()
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn ranges_render_compactly() {
        assert_eq!(Range::exact(0).to_string(), "*0");
        assert_eq!(Range::exact(1).to_string(), "*1");
        assert_eq!(Range::at_least(2).to_string(), "*2..");
        assert_eq!(Range::new(2, Some(4)).to_string(), "*2..4");
    }

    #[test]
    fn template_renders_verbatim() {
        let text = "MATCH (s:Person)-[:knows*1]->(:$L{$K: $V})-[:knows*2..]->(d:Person) \
                    WITH s, d MATCH (s)-[r:INDIRECT_KNOW NoDupEdge]->(d) DELETE r";
        assert_eq!(render(&parse(text).unwrap()), text);
        let text = "MATCH (s:Person)-[:knows*0]->(:$SL{$SK: $SV})-[@R:knows]->(:$DL{$DK: $DV})-[:knows*2..]->(d:Person) \
                    WHERE id(@R) = $RID WITH s, d CREATE (s)-[r:INDIRECT_KNOW]->(d)";
        assert_eq!(render(&parse(text).unwrap()), text);
    }

    #[test]
    fn round_trip_assorted() {
        for text in [
            "MATCH (a)<-[:x {w: 'it\\'s'}]-(b), (b)-->(c) RETURN a, c",
            "CREATE VIEW V AS (CONSTRUCT (a)<-[:V]-(b) MATCH (a:A)-[:x*2..3]->(b:B))",
            "MATCH (n:Person{id: -4, score: 2.5, ok: true}) DETACH DELETE n",
            "MATCH (a:A) RETURN a UNION ALL MATCH (a:B) RETURN a",
            "DROP VIEW V",
        ] {
            let once = parse(text).unwrap();
            assert_eq!(parse(&render(&once)).unwrap(), once, "{text}");
        }
    }
}
