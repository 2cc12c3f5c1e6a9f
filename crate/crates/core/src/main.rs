use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use semiexplicit::harness::report::format_table;
use semiexplicit::harness::study::order_rows_csv;
use semiexplicit::harness::{
    fit_slopes, invariant_drift_report, iteration_report, order_study, read_records, run_trajectory, CsvWriter,
    RunConfig, RunSummary,
};

#[derive(Parser)]
#[command(name = "semiexplicit", version, about = "Run and compare symplectic integrators on benchmark Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its trajectory as CSV.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Fit convergence orders over a grid of step sizes.
    OrderStudy {
        /// One template per method; flags override every template.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.002,0.005,0.01,0.02,0.05")]
        dts: Vec<f64>,
        /// Errors at or below this are excluded from the slope fit.
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
    },
    /// Run several configurations in parallel, one CSV per run.
    Sweep {
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Directory for runs whose config has no `out`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Summarize trajectory CSV files.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Default)]
struct Overrides {
    /// quartic, nls or vortex.
    #[arg(long)]
    model: Option<String>,
    /// pihajoki, tao, semiexplicit, midpoint or irk4.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    order: Option<String>,
    /// none, triple_jump, suzuki or yoshida6.
    #[arg(long)]
    composition: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "T")]
    t_end: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// simplified_newton or broyden.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Further `key=value` settings, as in a config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let pairs = [
            ("model", &self.model),
            ("composition", &self.composition),
            ("method", &self.method),
            ("order", &self.order),
            ("dt", &self.dt),
            ("T", &self.t_end),
            ("omega", &self.omega),
            ("eps", &self.eps),
            ("solver", &self.solver),
            ("max_iterations", &self.max_iterations),
            ("stride", &self.stride),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.extra {
            let (k, v) = kv.split_once('=').with_context(|| format!("expected KEY=VALUE, got {kv:?}"))?;
            cfg.set(k, v)?;
        }
        Ok(())
    }
}

fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs `cfg`, streaming rows to `out` or discarding them when `out` is `None`.
fn execute(cfg: &RunConfig, out: Option<&Path>) -> Result<RunSummary> {
    let summary = match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut writer = CsvWriter::new(BufWriter::new(file));
            let summary = run_trajectory(cfg, |rec| writer.write(rec))?;
            writer.flush()?;
            summary
        }
        None => run_trajectory(cfg, |_| Ok(()))?,
    };
    Ok(summary)
}

fn fmt_sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn summary_table(summaries: &[RunSummary]) -> String {
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            let it = &s.iterations;
            vec![
                s.label.clone(),
                s.steps.to_string(),
                if it.solves > 0 { format!("{:.2}", it.mean_iterations()) } else { "-".into() },
                fmt_sci(s.max_error("H").unwrap_or(0.0)),
                if s.tracks_defect { fmt_sci(it.max_defect) } else { "-".into() },
                it.failures.to_string(),
                format!("{:.2}", s.wall_clock_seconds),
            ]
        })
        .collect();
    format_table(&["method", "steps", "NW_itr", "Max_Error", "Max_Defect", "failures", "seconds"], &rows)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { cfg } => {
            let run = load(cfg.config.as_deref(), &cfg.overrides)?;
            let summary = execute(&run, run.out.as_deref())?;
            print!("{}", summary_table(std::slice::from_ref(&summary)));
            for (name, err) in &summary.max_invariant_errors {
                println!("max |rel err| {name}: {err:e}");
            }
        }
        Command::OrderStudy { configs, overrides, dts, floor } => {
            let templates: Vec<RunConfig> = if configs.is_empty() {
                vec![load(None, &overrides)?]
            } else {
                configs.iter().map(|p| load(Some(p), &overrides)).collect::<Result<_>>()?
            };
            let rows = order_study(&templates, &dts)?;
            let table: Vec<Vec<String>> =
                rows.iter().map(|r| vec![r.label.clone(), format!("{:e}", r.dt), fmt_sci(r.max_h_error)]).collect();
            print!("{}", format_table(&["method", "dt", "max_rel_H_error"], &table));
            println!();
            let fits: Vec<Vec<String>> = fit_slopes(&rows, floor)
                .iter()
                .map(|f| vec![f.label.clone(), format!("{:.3}", f.slope), f.points.to_string()])
                .collect();
            print!("{}", format_table(&["method", "slope", "points"], &fits));
            if let Some(out) = &overrides.out {
                std::fs::write(out, order_rows_csv(&rows)).with_context(|| format!("writing {out}"))?;
            }
        }
        Command::Sweep { configs, out_dir } => {
            let runs: Vec<RunConfig> =
                configs.iter().map(|p| load(Some(p), &Overrides::default())).collect::<Result<_>>()?;
            let summaries: Vec<RunSummary> = runs
                .par_iter()
                .enumerate()
                .map(|(i, cfg)| {
                    let path = cfg.out.clone().unwrap_or_else(|| {
                        let stem = configs[i].file_stem().and_then(|s| s.to_str()).unwrap_or("run");
                        out_dir.join(format!("{i:03}_{stem}.csv"))
                    });
                    execute(cfg, Some(&path)).with_context(|| format!("run {}", configs[i].display()))
                })
                .collect::<Result<_>>()?;
            print!("{}", summary_table(&summaries));
        }
        Command::Report { files } => {
            for path in files {
                let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                let records = read_records(BufReader::new(file))?;
                if records.len() < 10 {
                    bail!("{}: drift report needs at least 10 rows, found {}", path.display(), records.len());
                }
                println!("{}", path.display());
                let drift: Vec<Vec<String>> = invariant_drift_report(&records)
                    .iter()
                    .map(|d| vec![d.name.clone(), fmt_sci(d.max_abs_error), fmt_sci(d.slope)])
                    .collect();
                print!("{}", format_table(&["invariant", "max_abs_relerr", "drift_slope"], &drift));
                let it = iteration_report(&records);
                if it.solves > 0 || it.max_defect > 0.0 {
                    let row = vec![vec![
                        format!("{:.2}", it.mean_iterations()),
                        it.max_iterations.to_string(),
                        fmt_sci(it.max_defect),
                        it.failures.to_string(),
                    ]];
                    print!("{}", format_table(&["NW_itr", "max_itr", "Max_Defect", "failures"], &row));
                }
                println!();
            }
        }
    }
    Ok(())
}
