use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::LangError;
use crate::store::PropertyValue;

/// Parses one statement. A trailing `;` is allowed.
pub fn parse(text: &str) -> Result<Statement, LangError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let stmt = p.statement()?;
    p.eat(&Tok::Semicolon);
    p.expect(&Tok::Eof, "end of statement")?;
    match &stmt {
        Statement::Query(q) => check_scopes(q)?,
        Statement::Union { parts, .. } => {
            for q in parts {
                check_scopes(q)?;
            }
        }
        Statement::CreateView(_) | Statement::DropView(_) => {}
    }
    Ok(stmt)
}

/// Splits a script into statements at top-level `;` and returns each
/// statement's text. Blank pieces and `//` comments are dropped.
pub fn split_statements(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match quote {
            Some(q) => {
                cur.push(c);
                if c == '\\' {
                    if let Some(n) = chars.next() {
                        cur.push(n);
                    }
                } else if c == q {
                    quote = None;
                }
            }
            None => match c {
                '\'' | '"' => {
                    quote = Some(c);
                    cur.push(c);
                }
                '/' if chars.peek() == Some(&'/') => {
                    for n in chars.by_ref() {
                        if n == '\n' {
                            cur.push('\n');
                            break;
                        }
                    }
                }
                ';' => {
                    if !cur.trim().is_empty() {
                        out.push(cur.trim().to_string());
                    }
                    cur.clear();
                }
                _ => cur.push(c),
            },
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LangError> {
        let t = &self.toks[self.pos];
        Err(LangError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), LangError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        is_kw(self.peek(), kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), LangError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected {kw}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => self.error(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn name(&mut self, what: &str) -> Result<Name, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !s.starts_with('@') => {
                self.advance();
                Ok(Name::Ident(s))
            }
            Tok::Placeholder(s) => {
                self.advance();
                Ok(Name::Placeholder(s))
            }
            other => self.error(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn statement(&mut self) -> Result<Statement, LangError> {
        if self.at_kw("CREATE") && is_kw(self.peek_at(1), "VIEW") {
            self.advance();
            self.advance();
            return self.view_definition().map(Statement::CreateView);
        }
        if self.at_kw("DROP") {
            self.advance();
            self.expect_kw("VIEW")?;
            return Ok(Statement::DropView(self.ident("view name")?));
        }
        let first = self.query()?;
        if !self.at_kw("UNION") {
            return Ok(Statement::Query(first));
        }
        let mut parts = vec![first];
        let mut all = None;
        while self.eat_kw("UNION") {
            let this_all = self.eat_kw("ALL");
            if *all.get_or_insert(this_all) != this_all {
                return self.error("cannot mix UNION and UNION ALL");
            }
            parts.push(self.query()?);
        }
        Ok(Statement::Union {
            parts,
            all: all.unwrap_or(false),
        })
    }

    fn view_definition(&mut self) -> Result<ViewDefinition, LangError> {
        let name = self.ident("view name")?;
        self.expect_kw("AS")?;
        let paren = self.eat(&Tok::LParen);
        self.expect_kw("CONSTRUCT")?;
        let construct = self.path()?;
        self.expect_kw("MATCH")?;
        let match_path = self.path()?;
        if paren {
            self.expect(&Tok::RParen, "`)` closing the view body")?;
        }
        Ok(ViewDefinition {
            name,
            construct,
            match_path,
        })
    }

    fn query(&mut self) -> Result<Query, LangError> {
        let mut clauses = Vec::new();
        loop {
            if self.eat_kw("MATCH") {
                let paths = self.paths()?;
                let mut predicates = Vec::new();
                if self.eat_kw("WHERE") {
                    predicates.push(self.predicate()?);
                    while self.eat_kw("AND") {
                        predicates.push(self.predicate()?);
                    }
                }
                clauses.push(Clause::Match { paths, predicates });
            } else if self.eat_kw("WITH") {
                clauses.push(Clause::With {
                    vars: self.var_list()?,
                });
            } else if self.eat_kw("RETURN") {
                clauses.push(Clause::Return {
                    items: self.return_items()?,
                });
            } else if self.at_kw("CREATE") && !is_kw(self.peek_at(1), "VIEW") {
                self.advance();
                clauses.push(Clause::Create { paths: self.paths()? });
            } else if self.at_kw("DELETE") || self.at_kw("DETACH") {
                let detach = self.eat_kw("DETACH");
                self.expect_kw("DELETE")?;
                clauses.push(Clause::Delete {
                    vars: self.var_list()?,
                    detach,
                });
            } else {
                break;
            }
        }
        if clauses.is_empty() {
            return self.error(format!("expected a statement, found {}", describe(self.peek())));
        }
        match self.peek() {
            Tok::Eof | Tok::Semicolon => {}
            _ if self.at_kw("UNION") => {}
            other => return self.error(format!("expected a clause, found {}", describe(other))),
        }
        Ok(Query { clauses })
    }

    fn var_list(&mut self) -> Result<Vec<String>, LangError> {
        let mut vars = vec![self.ident("variable")?];
        while self.eat(&Tok::Comma) {
            vars.push(self.ident("variable")?);
        }
        Ok(vars)
    }

    fn return_items(&mut self) -> Result<Vec<ReturnItem>, LangError> {
        let mut items = Vec::new();
        loop {
            if self.at_kw("count") && self.peek_at(1) == &Tok::LParen {
                self.advance();
                self.advance();
                self.expect(&Tok::Star, "`*`")?;
                self.expect(&Tok::RParen, "`)`")?;
                items.push(ReturnItem::CountStar);
            } else {
                items.push(ReturnItem::Var(self.ident("variable or count(*)")?));
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if items.len() > 1 && items.contains(&ReturnItem::CountStar) {
            return self.error("count(*) cannot be combined with other return items");
        }
        Ok(items)
    }

    fn predicate(&mut self) -> Result<Predicate, LangError> {
        if self.at_kw("id") && self.peek_at(1) == &Tok::LParen {
            self.advance();
            self.advance();
            let var = self.ident("variable")?;
            self.expect(&Tok::RParen, "`)`")?;
            self.expect(&Tok::Eq, "`=`")?;
            let value = self.value()?;
            return Ok(Predicate::IdEq { var, value });
        }
        let var = self.ident("variable")?;
        self.expect(&Tok::Dot, "`.`")?;
        let key = self.name("property name")?;
        self.expect(&Tok::Eq, "`=`")?;
        let value = self.value()?;
        Ok(Predicate::PropEq { var, key, value })
    }

    fn paths(&mut self) -> Result<Vec<PathPattern>, LangError> {
        let mut paths = vec![self.path()?];
        while self.eat(&Tok::Comma) {
            paths.push(self.path()?);
        }
        Ok(paths)
    }

    fn path(&mut self) -> Result<PathPattern, LangError> {
        let start = self.node()?;
        let mut segments = Vec::new();
        while matches!(self.peek(), Tok::Dash | Tok::LArrow) {
            let rel = self.rel()?;
            let node = self.node()?;
            segments.push((rel, node));
        }
        Ok(PathPattern { start, segments })
    }

    fn node(&mut self) -> Result<NodePattern, LangError> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut node = NodePattern::default();
        if let Tok::Ident(_) = self.peek() {
            node.variable = Some(self.ident("variable")?);
        }
        while self.eat(&Tok::Colon) {
            node.labels.push(self.name("label")?);
        }
        if self.peek() == &Tok::LBrace {
            node.properties = self.properties()?;
        }
        self.expect(&Tok::RParen, "`)`")?;
        Ok(node)
    }

    fn rel(&mut self) -> Result<RelPattern, LangError> {
        let left = match self.advance() {
            Tok::LArrow => true,
            Tok::Dash => false,
            _ => unreachable!("rel() called off a relationship token"),
        };
        let mut rel = RelPattern::new(None, RelDirection::Undirected, None);
        if self.eat(&Tok::LBracket) {
            if let Tok::Ident(s) = self.peek() {
                if !s.eq_ignore_ascii_case("NoDupEdge") {
                    rel.variable = Some(self.ident("variable")?);
                }
            }
            if self.eat(&Tok::Colon) {
                rel.rel_type = Some(self.name("relationship type")?);
            }
            if self.eat(&Tok::Star) {
                rel.range = Some(self.range()?);
            }
            if self.eat_kw("NoDupEdge") {
                rel.no_dup = true;
            }
            if self.peek() == &Tok::LBrace {
                rel.properties = self.properties()?;
            }
            self.expect(&Tok::RBracket, "`]`")?;
        }
        rel.direction = match (left, self.peek()) {
            (false, Tok::Arrow) => RelDirection::Right,
            (false, Tok::Dash) => RelDirection::Undirected,
            (true, Tok::Dash) => RelDirection::Left,
            (true, Tok::Arrow) => return self.error("a relationship cannot point both ways"),
            (_, other) => {
                return self.error(format!("expected `-` or `->`, found {}", describe(other)))
            }
        };
        self.advance();
        Ok(rel)
    }

    fn range(&mut self) -> Result<Range, LangError> {
        let bound = |p: &mut Parser| -> Result<Option<u32>, LangError> {
            match p.peek().clone() {
                Tok::Int(i) => {
                    if !(0..=u32::MAX as i64).contains(&i) {
                        return p.error("hop count out of range");
                    }
                    p.advance();
                    Ok(Some(i as u32))
                }
                _ => Ok(None),
            }
        };
        let min = bound(self)?;
        let range = if self.eat(&Tok::DotDot) {
            Range::new(min.unwrap_or(1), bound(self)?)
        } else {
            match min {
                Some(k) => Range::exact(k),
                None => Range::at_least(1),
            }
        };
        if let Some(max) = range.max {
            if range.min > max {
                return self.error(format!("range minimum {} exceeds maximum {max}", range.min));
            }
        }
        Ok(range)
    }

    fn properties(&mut self) -> Result<PropertyFilter, LangError> {
        self.expect(&Tok::LBrace, "`{`")?;
        let mut props = Vec::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                let key = self.name("property name")?;
                self.expect(&Tok::Colon, "`:`")?;
                let value = self.value()?;
                props.push((key, value));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RBrace, "`}`")?;
        }
        Ok(props)
    }

    fn value(&mut self) -> Result<ValueExpr, LangError> {
        let v = match self.peek().clone() {
            Tok::Int(i) => PropertyValue::Int(i),
            Tok::Float(f) => PropertyValue::Float(f),
            Tok::Str(s) => PropertyValue::Text(s),
            Tok::Placeholder(p) => {
                self.advance();
                return Ok(ValueExpr::Placeholder(p));
            }
            Tok::Ident(s) if s.eq_ignore_ascii_case("true") => PropertyValue::Bool(true),
            Tok::Ident(s) if s.eq_ignore_ascii_case("false") => PropertyValue::Bool(false),
            Tok::Dash => {
                self.advance();
                return match self.peek().clone() {
                    Tok::Int(i) => {
                        self.advance();
                        Ok(ValueExpr::Literal(PropertyValue::Int(-i)))
                    }
                    Tok::Float(f) => {
                        self.advance();
                        Ok(ValueExpr::Literal(PropertyValue::Float(-f)))
                    }
                    other => self.error(format!("expected a number, found {}", describe(&other))),
                };
            }
            other => return self.error(format!("expected a value, found {}", describe(&other))),
        };
        self.advance();
        Ok(ValueExpr::Literal(v))
    }
}

fn is_kw(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Placeholder(s) => format!("`${s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Float(f) => format!("`{f}`"),
        Tok::Str(_) => "a string".into(),
        Tok::Eof => "end of input".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::DotDot => "`..`".into(),
        Tok::Star => "`*`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Dash => "`-`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::LArrow => "`<-`".into(),
        Tok::Semicolon => "`;`".into(),
    }
}

/// Every variable used by WHERE, WITH, RETURN or DELETE must already be
/// bound by a pattern. WITH narrows the scope to the projected names.
fn check_scopes(q: &Query) -> Result<(), LangError> {
    let mut scope: HashSet<&str> = HashSet::new();
    let unbound = |v: &str| LangError::UnboundVariable { name: v.to_string() };
    for clause in &q.clauses {
        match clause {
            Clause::Match { paths, predicates } => {
                let mut vars = Vec::new();
                for p in paths {
                    collect_path_vars(p, &mut vars);
                }
                scope.extend(vars);
                for pred in predicates {
                    if !scope.contains(pred.var()) {
                        return Err(unbound(pred.var()));
                    }
                }
            }
            Clause::Create { paths } => {
                let mut vars = Vec::new();
                for p in paths {
                    collect_path_vars(p, &mut vars);
                }
                scope.extend(vars);
            }
            Clause::With { vars } => {
                for v in vars {
                    if !scope.contains(v.as_str()) {
                        return Err(unbound(v));
                    }
                }
                scope = vars.iter().map(String::as_str).collect();
            }
            Clause::Delete { vars, .. } => {
                for v in vars {
                    if !scope.contains(v.as_str()) {
                        return Err(unbound(v));
                    }
                }
            }
            Clause::Return { items } => {
                for item in items {
                    if let ReturnItem::Var(v) = item {
                        if !scope.contains(v.as_str()) {
                            return Err(unbound(v));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
