//! Maintenance cost as a function of the number of deleted edges.

use std::fmt::Write as _;
use std::time::Instant;

use pgview_core::store::EdgeId;
use pgview_core::Database;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum ScalingError {
    #[error("cannot delete {wanted} edges, the graph has only {available} base edges")]
    InsufficientEdges { wanted: usize, available: usize },
    #[error(transparent)]
    Db(#[from] pgview_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub count: usize,
    pub maintenance_db_hit: u64,
    pub wall_ms: f64,
}

/// For each count, deletes that many randomly chosen base edges from a fresh
/// copy of `db` and records the maintenance cost.
pub fn maintenance_scaling(db: &Database, counts: &[usize], seed: u64) -> Result<Vec<ScalingRow>, ScalingError> {
    let edges: Vec<EdgeId> = db.graph().edges().filter(|e| !e.is_view).map(|e| e.id).collect();
    if let Some(&wanted) = counts.iter().max() {
        if wanted > edges.len() {
            return Err(ScalingError::InsufficientEdges {
                wanted,
                available: edges.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(counts.len());
    for &count in counts {
        let chosen: Vec<EdgeId> = sample(&mut rng, edges.len(), count).into_iter().map(|i| edges[i]).collect();
        let mut copy = db.clone();
        let mut hits = 0;
        let t = Instant::now();
        for e in chosen {
            hits += copy.delete_edge(e)?.maintenance.db_hits;
        }
        rows.push(ScalingRow {
            count,
            maintenance_db_hit: hits,
            wall_ms: t.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

/// Least-squares line through `points`: (slope, intercept, R²). R² is 1 when
/// the y values are all equal.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

pub fn r_squared(rows: &[ScalingRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.count as f64, r.maintenance_db_hit as f64)).collect();
    linear_fit(&pts).2
}

pub fn to_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("count,maintenanceDbHit,wallMs\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.4}", r.count, r.maintenance_db_hit, r.wall_ms);
    }
    out
}

pub fn to_text(rows: &[ScalingRow]) -> String {
    let mut out = format!("{:>8} {:>16} {:>12}\n", "count", "maint dbhit", "wall ms");
    for r in rows {
        let _ = writeln!(out, "{:>8} {:>16} {:>12.3}", r.count, r.maintenance_db_hit, r.wall_ms);
    }
    let _ = writeln!(out, "R^2 {:.5}", r_squared(rows));
    out
}
