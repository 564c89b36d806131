//! Line-oriented interactive shell.

use std::io::{self, BufRead, Write};

use pgview_core::exec::QueryResult;
use pgview_core::{Database, Outcome};

const HELP: &str = "\
statements end at the end of the line; a trailing `;` is optional
:views               list views with edge and template counts
:templates <view>    print the maintenance templates of a view
:explain <stmt>      show the rewritten statement and cost estimates
:profile <stmt>      run a statement and print its operator profile
:verify              check every view against a full recomputation
:quit                leave";

/// Rows printed per result before the listing is cut short.
const ROW_LIMIT: usize = 20;

pub struct Repl {
    pub db: Database,
    pub prompt: bool,
}

/// One line per view: `NAME, edges=N, templates=a/b/c`.
pub fn view_lines(db: &Database) -> Vec<String> {
    db.catalog()
        .iter()
        .map(|v| {
            let (a, b, c) = v.templates.counts();
            format!("{}, edges={}, templates={a}/{b}/{c}", v.name(), v.edge_count(db.graph()))
        })
        .collect()
}

fn print_result(out: &mut impl Write, r: &QueryResult) -> io::Result<()> {
    if !r.columns.is_empty() {
        writeln!(out, "{}", r.columns.join(" | "))?;
        for row in r.rows.iter().take(ROW_LIMIT) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", cells.join(" | "))?;
        }
        if r.rows.len() > ROW_LIMIT {
            writeln!(out, "... {} more", r.rows.len() - ROW_LIMIT)?;
        }
        writeln!(out, "{} rows", r.rows.len())?;
    }
    if !r.summary.is_empty() {
        writeln!(out, "{}", r.summary)?;
    }
    Ok(())
}

fn print_outcome(out: &mut impl Write, o: &Outcome) -> io::Result<()> {
    match o {
        Outcome::Rows(r) => print_result(out, r),
        Outcome::ViewCreated(c) => writeln!(
            out,
            "view {} created, {} edges, templates {}/{}/{}",
            c.name, c.edges, c.templates.0, c.templates.1, c.templates.2
        ),
        Outcome::ViewDropped { name, edges } => writeln!(out, "view {name} dropped, {edges} edges removed"),
    }
}

impl Repl {
    pub fn new(db: Database) -> Self {
        Repl { db, prompt: true }
    }

    /// Reads commands until `:quit` or end of input. Errors in statements are
    /// printed and the loop continues.
    pub fn run(&mut self, input: impl BufRead, out: &mut impl Write) -> io::Result<()> {
        let mut lines = input.lines();
        loop {
            if self.prompt {
                write!(out, "pgview> ")?;
                out.flush()?;
            }
            let Some(line) = lines.next() else { break };
            let line = line?;
            if !self.handle(line.trim(), out)? {
                break;
            }
        }
        Ok(())
    }

    /// Handles one input line; returns false when the session should end.
    pub fn handle(&mut self, line: &str, out: &mut impl Write) -> io::Result<bool> {
        let line = line.strip_suffix(';').unwrap_or(line).trim();
        if line.is_empty() {
            return Ok(true);
        }
        let Some(meta) = line.strip_prefix(':') else {
            match self.db.execute(line) {
                Ok(o) => print_outcome(out, &o)?,
                Err(e) => writeln!(out, "error: {e}")?,
            }
            return Ok(true);
        };
        let (cmd, arg) = meta.split_once(char::is_whitespace).unwrap_or((meta, ""));
        let arg = arg.trim();
        match cmd {
            "quit" | "q" | "exit" => return Ok(false),
            "help" | "h" => writeln!(out, "{HELP}")?,
            "views" => {
                let lines = view_lines(&self.db);
                if lines.is_empty() {
                    writeln!(out, "no views")?;
                }
                for l in lines {
                    writeln!(out, "{l}")?;
                }
            }
            "templates" => match self.db.catalog().get(arg) {
                Some(v) => {
                    let t = &v.templates;
                    for (title, list) in [
                        ("delete node", &t.delete_node),
                        ("create edge", &t.create_edge),
                        ("delete edge", &t.delete_edge),
                    ] {
                        writeln!(out, "{title}:")?;
                        for s in list.iter() {
                            writeln!(out, "  {}", s.statement)?;
                        }
                    }
                }
                None => writeln!(out, "error: no view named `{arg}`")?,
            },
            "explain" => match self.db.explain(arg) {
                Ok(e) => writeln!(out, "{e}")?,
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "profile" => match self.db.profile(arg) {
                Ok((o, p)) => {
                    print_outcome(out, &o)?;
                    writeln!(out, "{p}")?;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "verify" => match self.db.check_all() {
                Ok(reports) if reports.is_empty() => writeln!(out, "no views")?,
                Ok(reports) => {
                    for r in reports {
                        writeln!(out, "{r}")?;
                    }
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            other => writeln!(out, "error: unknown command `:{other}`, try :help")?,
        }
        Ok(true)
    }
}
