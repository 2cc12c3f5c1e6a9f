//! Benchmark harness: run configuration, trajectory runs, reports and studies.

pub mod config;
pub mod csv;
pub mod oracle;
pub mod properties;
pub mod report;
pub mod run;
pub mod study;

pub use config::{MethodKind, ModelSpec, RunConfig, VortexIc};
pub use csv::{read_records, CsvWriter};
pub use oracle::{reference_oracle, rk4, rk4_extended, rk4_phase};
pub use properties::{fd_jacobian, random_states, symmetry_error, symplecticity_error};
pub use report::{invariant_drift_report, iteration_report, InvariantDrift, IterationReport};
pub use run::{run_collect, run_from, run_summary, run_trajectory, Integrator, RunSummary, State, TrajectoryRecord};
pub use study::{fit_slopes, order_study, OrderFit, OrderRow};
