/// Counters behind a view's cost estimate.
///
/// `opt_rate` is fixed when the view is created; the two counts follow the
/// live graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewStats {
    /// Live nodes carrying the view edge's source label.
    pub n_start_label: u64,
    /// Live view edges.
    pub e_view_label: u64,
    pub opt_rate: f64,
    pub initial_db_hit: u64,
}

impl ViewStats {
    /// Stats at creation: the rate is the measured cost of matching the view
    /// path divided by the cost of scanning the materialized view.
    pub fn at_creation(initial_db_hit: u64, n_start_label: u64, e_view_label: u64) -> Self {
        let scan = n_start_label + 2 * e_view_label;
        let opt_rate = if scan == 0 { 1.0 } else { initial_db_hit as f64 / scan as f64 };
        ViewStats {
            n_start_label,
            e_view_label,
            opt_rate,
            initial_db_hit,
        }
    }

    /// Same rate, different live counts.
    pub fn with_counts(&self, n_start_label: u64, e_view_label: u64) -> Self {
        ViewStats {
            n_start_label,
            e_view_label,
            ..*self
        }
    }

    /// Cost of scanning the start label and every view edge.
    pub fn view_scan_cost(&self) -> u64 {
        self.n_start_label + 2 * self.e_view_label
    }
}

/// Estimated cost of answering the view path without the view.
pub fn estimate_dbhit(stats: &ViewStats) -> u64 {
    (stats.view_scan_cost() as f64 * stats.opt_rate).round() as u64
}

/// Estimated saving from answering the path through the view.
pub fn view_opt_eff(stats: &ViewStats) -> i64 {
    estimate_dbhit(stats) as i64 - stats.view_scan_cost() as i64
}

/// Orders views by descending saving, ties by ascending name.
pub fn sort_by_opt_eff<'a>(views: impl IntoIterator<Item = (&'a str, ViewStats)>) -> Vec<(&'a str, i64)> {
    let mut out: Vec<(&str, i64)> = views.into_iter().map(|(n, s)| (n, view_opt_eff(&s))).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    out
}
