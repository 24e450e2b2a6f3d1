//! Per-set timing summaries in the column order
//! `Set | Files | Min | Mean ± std | Max | Total | it/s`.

use std::fmt::Write as _;

pub const STATS_CSV_HEADER: &str = "set,files,min_s,mean_s,std_s,max_s,total_s,it_per_s";

/// Summary of per-file processing times, in seconds.
///
/// All statistics are `None` for an empty set; `std_s` (sample, n−1
/// denominator) is also `None` for a single file.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingStats {
    pub n_files: usize,
    pub min_s: Option<f64>,
    pub mean_s: Option<f64>,
    pub std_s: Option<f64>,
    pub max_s: Option<f64>,
    pub total_s: Option<f64>,
    pub it_per_s: Option<f64>,
}

impl TimingStats {
    pub fn from_durations(durations: &[f64]) -> Self {
        let n = durations.len();
        if n == 0 {
            return TimingStats {
                n_files: 0,
                min_s: None,
                mean_s: None,
                std_s: None,
                max_s: None,
                total_s: None,
                it_per_s: None,
            };
        }
        let total: f64 = durations.iter().sum();
        let mean = total / n as f64;
        let std = (n > 1).then(|| {
            let ss: f64 = durations.iter().map(|d| (d - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        let min = durations.iter().copied().fold(f64::INFINITY, f64::min);
        let max = durations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        TimingStats {
            n_files: n,
            min_s: Some(min),
            mean_s: Some(mean),
            std_s: std,
            max_s: Some(max),
            total_s: Some(total),
            it_per_s: (total > 0.0).then(|| n as f64 / total),
        }
    }

    pub fn csv_row(&self, set: &str) -> String {
        let f = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        format!(
            "{set},{},{},{},{},{},{},{}",
            self.n_files,
            f(self.min_s),
            f(self.mean_s),
            f(self.std_s),
            f(self.max_s),
            f(self.total_s),
            f(self.it_per_s)
        )
    }
}

/// Renders a fixed-width table with four decimals, one row per set.
pub fn format_table(rows: &[(String, TimingStats)]) -> String {
    let f = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    let set_w = rows.iter().map(|(s, _)| s.len()).max().unwrap_or(0).max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<set_w$}  {:>6}  {:>8}  {:>19}  {:>8}  {:>10}  {:>10}",
        "Set", "Files", "Min", "Mean ± std", "Max", "Total", "it/s"
    );
    for (set, s) in rows {
        let mean = match (s.mean_s, s.std_s) {
            (Some(m), Some(sd)) => format!("{m:.4} ± {sd:.4}"),
            (Some(m), None) => format!("{m:.4} ± n/a"),
            _ => "n/a".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<set_w$}  {:>6}  {:>8}  {:>19}  {:>8}  {:>10}  {:>10}",
            set,
            s.n_files,
            f(s.min_s),
            mean,
            f(s.max_s),
            f(s.total_s),
            f(s.it_per_s)
        );
    }
    out
}
