//! Wide-format trajectory CSV.
//!
//! Columns, in order: `time`, `q1..qd`, `p1..pd`, `defect_norm`,
//! `inv_<name>_relerr` per invariant (Hamiltonian first), `solver_iters`,
//! `solver_converged`. Cells that do not apply to a method are left empty.

use std::borrow::Cow;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::harness::run::TrajectoryRecord;
use crate::projection::SolverStats;

pub struct CsvWriter<W: Write> {
    out: W,
    header_written: bool,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

impl<W: Write> CsvWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out, header_written: false }
    }

    pub fn write(&mut self, rec: &TrajectoryRecord) -> Result<()> {
        if !self.header_written {
            writeln!(self.out, "{}", header(rec).join(",")).map_err(io_err)?;
            self.header_written = true;
        }
        let mut cells = vec![format!("{:e}", rec.time)];
        cells.extend(rec.q.iter().chain(&rec.p).map(|v| format!("{v:e}")));
        cells.push(rec.defect_norm.map(|d| format!("{d:e}")).unwrap_or_default());
        cells.extend(rec.invariant_errors.iter().map(|(_, e)| format!("{e:e}")));
        match &rec.stats {
            Some(s) => {
                cells.push(s.iterations.to_string());
                cells.push(u8::from(s.converged).to_string());
            }
            None => cells.extend([String::new(), String::new()]),
        }
        writeln!(self.out, "{}", cells.join(",")).map_err(io_err)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(io_err)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

fn header(rec: &TrajectoryRecord) -> Vec<String> {
    let d = rec.q.len();
    let mut cols = vec!["time".to_string()];
    cols.extend((1..=d).map(|i| format!("q{i}")));
    cols.extend((1..=d).map(|i| format!("p{i}")));
    cols.push("defect_norm".into());
    cols.extend(rec.invariant_errors.iter().map(|(n, _)| format!("inv_{n}_relerr")));
    cols.push("solver_iters".into());
    cols.push("solver_converged".into());
    cols
}

/// Reads a file produced by [`CsvWriter`] back into records.
/// The update norm is not stored, so it reads back as zero.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<TrajectoryRecord>> {
    let mut lines = input.lines();
    let head = match lines.next() {
        Some(line) => line.map_err(io_err)?,
        None => return Ok(Vec::new()),
    };
    let cols: Vec<&str> = head.split(',').collect();
    let d = cols.iter().filter(|c| c.starts_with('q') && c[1..].parse::<usize>().is_ok()).count();
    let names: Vec<String> = cols
        .iter()
        .filter_map(|c| c.strip_prefix("inv_").and_then(|c| c.strip_suffix("_relerr")))
        .map(str::to_string)
        .collect();
    if cols.len() != 2 * d + names.len() + 4 || cols.first() != Some(&"time") {
        return Err(Error::Config(format!("unrecognized csv header {head:?}")));
    }

    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Config(format!("row {}: expected {} cells, found {}", k + 1, cols.len(), cells.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Config(format!("row {}: bad number {s:?}", k + 1)))
        };
        let opt = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { num(s).map(Some) } };
        let q = cells[1..=d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let p = cells[d + 1..=2 * d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let defect_norm = opt(cells[2 * d + 1])?;
        let inv_start = 2 * d + 2;
        let invariant_errors = names
            .iter()
            .zip(&cells[inv_start..inv_start + names.len()])
            .map(|(n, s)| Ok((Cow::Owned(n.clone()), num(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let iters = cells[cells.len() - 2];
        let stats = if iters.is_empty() {
            None
        } else {
            Some(SolverStats {
                iterations: iters.parse().map_err(|_| Error::Config(format!("row {}: bad iteration count", k + 1)))?,
                final_update_norm: 0.0,
                converged: cells[cells.len() - 1] == "1",
            })
        };
        out.push(TrajectoryRecord { step: k, time: num(cells[0])?, q, p, invariant_errors, defect_norm, stats });
    }
    Ok(out)
}
