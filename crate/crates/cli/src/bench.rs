//! Original-versus-optimized workload benchmark.
//!
//! The original side runs every statement as written on a database without
//! views. The optimized side creates the script's views (timed as MV), then
//! rewrites and runs each statement, paying for view maintenance on writes.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Context;
use pgview_core::Database;

use crate::workload::{recover, timed, Kind, Recover, WorkloadScript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub reps: u32,
    pub warmup: u32,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { reps: 5, warmup: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub kind: Kind,
    pub ori_time_ms: f64,
    pub opt_time_ms: f64,
    pub opt_vpg_time_ms: f64,
    pub ori_db_hit: u64,
    pub opt_db_hit: u64,
    pub rewrites: usize,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.ori_time_ms / self.opt_time_ms
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Creation time per view.
    pub views: Vec<(String, f64)>,
}

impl BenchReport {
    pub fn w_ori(&self) -> f64 {
        self.rows.iter().map(|r| r.ori_time_ms).sum()
    }

    /// Optimized execution plus rewrite time.
    pub fn w_opt(&self) -> f64 {
        self.rows.iter().map(|r| r.opt_time_ms + r.opt_vpg_time_ms).sum()
    }

    pub fn mv(&self) -> f64 {
        self.views.iter().map(|v| v.1).sum()
    }

    pub fn ratio(&self) -> f64 {
        self.w_ori() / self.w_opt()
    }

    pub fn ratio_with_mv(&self) -> f64 {
        self.w_ori() / (self.mv() + self.w_opt())
    }

    pub fn row(&self, name: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("statement,kind,oriTimeMs,optTimeMs,optVpgTimeMs,oriDbHit,optDbHit,speedup,rewrites\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{:.4},{},{},{:.3},{}",
                r.name,
                r.kind.as_str(),
                r.ori_time_ms,
                r.opt_time_ms,
                r.opt_vpg_time_ms,
                r.ori_db_hit,
                r.opt_db_hit,
                r.speedup(),
                r.rewrites
            );
        }
        let _ = writeln!(out, "Wori,,{:.4},,,,,,", self.w_ori());
        let _ = writeln!(out, "Wopt,,,{:.4},,,,,", self.w_opt());
        let _ = writeln!(out, "MV,,,{:.4},,,,,", self.mv());
        let _ = writeln!(out, "Wori/Wopt,,,,,,,{:.3},", self.ratio());
        let _ = writeln!(out, "Wori/(MV+Wopt),,,,,,,{:.3},", self.ratio_with_mv());
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:<5} {:>12} {:>12} {:>10} {:>12} {:>12} {:>8} {:>3}",
            "statement", "kind", "ori ms", "opt ms", "vpg ms", "ori dbhit", "opt dbhit", "speedup", "rw"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:<5} {:>12.3} {:>12.3} {:>10.4} {:>12} {:>12} {:>7.2}x {:>3}",
                r.name,
                r.kind.as_str(),
                r.ori_time_ms,
                r.opt_time_ms,
                r.opt_vpg_time_ms,
                r.ori_db_hit,
                r.opt_db_hit,
                r.speedup(),
                r.rewrites
            );
        }
        for (v, t) in &self.views {
            let _ = writeln!(out, "view {v}: created in {t:.3} ms");
        }
        let _ = writeln!(
            out,
            "Wori {:.3} ms, Wopt {:.3} ms, MV {:.3} ms, Wori/Wopt {:.3}, Wori/(MV+Wopt) {:.3}",
            self.w_ori(),
            self.w_opt(),
            self.mv(),
            self.ratio(),
            self.ratio_with_mv()
        );
        out
    }
}

struct Sample {
    time_ms: f64,
    vpg_ms: f64,
    db_hit: u64,
    rewrites: usize,
}

fn measure(db: &mut Database, e: &crate::workload::Entry, optimize: bool) -> anyhow::Result<Sample> {
    let snapshot = matches!(e.recover, Some(Recover::Snapshot)).then(|| db.clone());
    let t = timed(db, &e.statement, optimize)?;
    recover(db, snapshot, &e.recover)?;
    Ok(Sample {
        time_ms: t.time_ms,
        vpg_ms: t.vpg_ms,
        db_hit: t.db_hit,
        rewrites: t.rewrites,
    })
}

/// Benchmarks `script` on `base`, which must not have views yet.
pub fn bench(script: &WorkloadScript, base: &Database, opts: BenchOptions) -> anyhow::Result<BenchReport> {
    let reps = opts.reps.max(1);
    let mut ori = base.clone();
    ori.config.optimize = false;
    let mut opt = base.clone();
    opt.config.optimize = true;
    let mut report = BenchReport::default();
    for e in &script.entries {
        if e.kind == Kind::View {
            let t = Instant::now();
            let outcome = opt.execute_statement(&e.statement).with_context(|| e.name.clone())?;
            let name = match outcome {
                pgview_core::Outcome::ViewCreated(c) => c.name,
                _ => e.name.clone(),
            };
            report.views.push((name, t.elapsed().as_secs_f64() * 1e3));
            continue;
        }
        let mut row = BenchRow {
            name: e.name.clone(),
            kind: e.kind,
            ori_time_ms: 0.0,
            opt_time_ms: 0.0,
            opt_vpg_time_ms: 0.0,
            ori_db_hit: 0,
            opt_db_hit: 0,
            rewrites: 0,
        };
        for i in 0..opts.warmup + reps {
            let a = measure(&mut ori, e, false).with_context(|| e.name.clone())?;
            let b = measure(&mut opt, e, true).with_context(|| e.name.clone())?;
            if i < opts.warmup {
                continue;
            }
            if i == opts.warmup {
                row.ori_db_hit = a.db_hit;
                row.opt_db_hit = b.db_hit;
                row.rewrites = b.rewrites;
            }
            row.ori_time_ms += a.time_ms;
            row.opt_time_ms += b.time_ms;
            row.opt_vpg_time_ms += b.vpg_ms;
        }
        row.ori_time_ms /= reps as f64;
        row.opt_time_ms /= reps as f64;
        row.opt_vpg_time_ms /= reps as f64;
        report.rows.push(row);
    }
    Ok(report)
}
