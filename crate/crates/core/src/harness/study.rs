//! Convergence-order studies: max relative energy error over a grid of step sizes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::harness::report::linear_slope;
use crate::harness::run::{run_summary, HAMILTONIAN};

#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub label: String,
    pub dt: f64,
    pub max_h_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub label: String,
    pub slope: f64,
    /// Grid points above the floor that entered the fit.
    pub points: usize,
}

/// Runs every template at every step size. Rows come back grouped by
/// template, in grid order; runs execute in parallel.
pub fn order_study(templates: &[RunConfig], dts: &[f64]) -> Result<Vec<OrderRow>> {
    check_grid(dts)?;
    let jobs: Vec<(usize, f64)> = (0..templates.len()).flat_map(|i| dts.iter().map(move |&dt| (i, dt))).collect();
    jobs.par_iter()
        .map(|&(i, dt)| {
            let mut cfg = templates[i].clone();
            cfg.dt = dt;
            cfg.out = None;
            let summary = run_summary(&cfg)?;
            Ok(OrderRow { label: summary.label.clone(), dt, max_h_error: summary.max_error(HAMILTONIAN).unwrap_or(0.0) })
        })
        .collect()
}

fn check_grid(dts: &[f64]) -> Result<()> {
    if dts.len() < 4 {
        return Err(Error::Config(format!("order study needs at least 4 step sizes, got {}", dts.len())));
    }
    if dts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Config("order study step sizes must be positive".into()));
    }
    let lo = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dts.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Config(format!("order study grid must span a decade, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Least-squares slope of `log err` against `log dt` for each label.
///
/// Errors at or below `floor` are dominated by rounding and are left out.
/// A label keeps a fit only if at least two points survive.
pub fn fit_slopes(rows: &[OrderRow], floor: f64) -> Vec<OrderFit> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }
    labels
        .into_iter()
        .filter_map(|label| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.label == label && r.max_h_error > floor && r.max_h_error.is_finite())
                .map(|r| (r.dt.ln(), r.max_h_error.ln()))
                .unzip();
            (x.len() >= 2).then(|| OrderFit { label: label.to_string(), slope: linear_slope(&x, &y), points: x.len() })
        })
        .collect()
}

pub fn order_rows_csv(rows: &[OrderRow]) -> String {
    let mut out = String::from("method,dt,max_rel_h_error\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{:e}\n", r.label, r.dt, r.max_h_error));
    }
    out
}
