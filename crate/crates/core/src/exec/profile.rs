use std::fmt;

use super::plan::CompiledQuery;
use super::OpCounter;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorStats {
    pub name: String,
    pub detail: String,
    pub rows: u64,
    pub db_hits: u64,
    /// Nesting depth in the operator tree.
    pub depth: usize,
}

/// Per-operator row and storage-access counts for one statement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfileReport {
    pub operators: Vec<OperatorStats>,
}

impl ProfileReport {
    pub(crate) fn from_plan(plan: &CompiledQuery, counters: &[OpCounter]) -> Self {
        let operators = plan
            .ops
            .iter()
            .zip(counters)
            .map(|(op, c)| OperatorStats {
                name: op.name.to_string(),
                detail: op.detail.clone(),
                rows: c.rows,
                db_hits: c.db_hits,
                depth: 0,
            })
            .collect();
        ProfileReport { operators }
    }

    pub(crate) fn push(&mut self, name: &str, detail: String, c: OpCounter, depth: usize) {
        self.operators.push(OperatorStats {
            name: name.to_string(),
            detail,
            rows: c.rows,
            db_hits: c.db_hits,
            depth,
        });
    }

    pub(crate) fn append_child(&mut self, child: ProfileReport) {
        self.operators.extend(child.operators.into_iter().map(|mut o| {
            o.depth += 1;
            o
        }));
    }

    pub fn total_rows(&self) -> u64 {
        self.operators.iter().map(|o| o.rows).sum()
    }

    pub fn total_db_hits(&self) -> u64 {
        self.operators.iter().map(|o| o.db_hits).sum()
    }

    /// `operator,rows,dbhits` lines with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("operator,rows,dbhits\n");
        for o in &self.operators {
            let label = if o.detail.is_empty() {
                o.name.clone()
            } else {
                format!("{} {}", o.name, o.detail)
            };
            let field = if label.contains([',', '"', '\n']) {
                format!("\"{}\"", label.replace('"', "\"\""))
            } else {
                label
            };
            out.push_str(&format!("{field},{},{}\n", o.rows, o.db_hits));
        }
        out
    }
}

impl fmt::Display for ProfileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self
            .operators
            .iter()
            .map(|o| {
                let pad = "  ".repeat(o.depth);
                if o.detail.is_empty() {
                    format!("{pad}+{}", o.name)
                } else {
                    format!("{pad}+{} {}", o.name, o.detail)
                }
            })
            .collect();
        let width = labels.iter().map(String::len).max().unwrap_or(0).max(8);
        writeln!(f, "{:<width$} | {:>10} | {:>10}", "Operator", "Rows", "DB Hits")?;
        for (label, o) in labels.iter().zip(&self.operators) {
            writeln!(f, "{label:<width$} | {:>10} | {:>10}", o.rows, o.db_hits)?;
        }
        write!(
            f,
            "{:<width$} | {:>10} | {:>10}",
            "Total",
            self.total_rows(),
            self.total_db_hits()
        )
    }
}
