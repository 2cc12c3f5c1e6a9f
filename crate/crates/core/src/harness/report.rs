use crate::harness::run::TrajectoryRecord;
use crate::projection::SolverStats;

/// Solver and defect aggregates over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IterationReport {
    pub solves: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_update_norm: f64,
    pub max_defect: f64,
    /// Solves that stopped at the iteration cap. Their capped counts are
    /// included in the mean.
    pub failures: usize,
}

impl IterationReport {
    pub fn push(&mut self, stats: &SolverStats) {
        self.solves += 1;
        self.total_iterations += stats.iterations;
        self.max_iterations = self.max_iterations.max(stats.iterations);
        self.max_update_norm = self.max_update_norm.max(stats.final_update_norm);
        if !stats.converged {
            self.failures += 1;
        }
    }

    pub fn push_defect(&mut self, defect: f64) {
        self.max_defect = self.max_defect.max(defect);
    }

    /// Mean iterations per solve; zero for an empty run.
    pub fn mean_iterations(&self) -> f64 {
        if self.solves == 0 {
            0.0
        } else {
            self.total_iterations as f64 / self.solves as f64
        }
    }
}

/// Aggregates solver stats over sampled rows (the initial row carries none).
pub fn iteration_report<'a>(records: impl IntoIterator<Item = &'a TrajectoryRecord>) -> IterationReport {
    let mut report = IterationReport::default();
    for r in records {
        if let Some(s) = &r.stats {
            report.push(s);
        }
        if let Some(d) = r.defect_norm {
            report.push_defect(d);
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantDrift {
    pub name: String,
    pub max_abs_error: f64,
    /// Least-squares slope of relative error against time.
    pub slope: f64,
}

/// Least-squares line `y = a + b x`; returns `b`, or 0 for a degenerate abscissa.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Max `|relative error|` and fitted linear drift per invariant.
pub fn invariant_drift_report(records: &[TrajectoryRecord]) -> Vec<InvariantDrift> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let times: Vec<f64> = records.iter().map(|r| r.time).collect();
    first
        .invariant_errors
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let errs: Vec<f64> = records.iter().map(|r| r.invariant_errors[k].1).collect();
            InvariantDrift {
                name: name.to_string(),
                max_abs_error: errs.iter().fold(0.0f64, |m, e| m.max(e.abs())),
                slope: linear_slope(&times, &errs),
            }
        })
        .collect()
}

/// Aligned text table with a header row and a rule underneath.
pub fn format_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
