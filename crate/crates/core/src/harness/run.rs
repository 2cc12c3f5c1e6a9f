use std::borrow::Cow;
use std::time::Instant;

use crate::composition::compose;
use crate::error::{Error, Result};
use crate::extended::{embed, ExtendedPoint, ExtendedStep, StrangStep, TaoStep};
use crate::harness::config::{MethodKind, RunConfig};
use crate::harness::report::IterationReport;
use crate::irk::{gauss_legendre4_tableau, irk_step, midpoint_tableau, IrkTableau};
use crate::models::{HamiltonianModel, PhasePoint};
use crate::projection::{semiexplicit_step, SolverConfig, SolverStats};

/// Name of the Hamiltonian column among the invariant errors.
pub const HAMILTONIAN: &str = "H";

/// A method ready to step a particular model.
pub enum Integrator<'a> {
    /// Extended phase space stepping with no projection; the state carries both copies.
    Extended(Box<dyn ExtendedStep + 'a>),
    Semiexplicit { step: Box<dyn ExtendedStep + 'a>, solver: SolverConfig },
    Irk { model: &'a dyn HamiltonianModel, tableau: IrkTableau, solver: SolverConfig },
}

/// Current state of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Phase(PhasePoint),
    Extended(ExtendedPoint),
}

impl State {
    /// The `(q, p)` pair used for invariants; for extended states, the raw first copy.
    pub fn phase(&self) -> PhasePoint {
        match self {
            Self::Phase(z) => z.clone(),
            Self::Extended(e) => e.restrict(),
        }
    }

    fn q(&self) -> &[f64] {
        match self {
            Self::Phase(z) => &z.q,
            Self::Extended(e) => &e.q,
        }
    }

    fn p(&self) -> &[f64] {
        match self {
            Self::Phase(z) => &z.p,
            Self::Extended(e) => &e.p,
        }
    }
}

/// What one step reports besides the new state.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepInfo {
    pub defect_norm: Option<f64>,
    pub stats: Option<SolverStats>,
}

fn extended_step<'a>(model: &'a dyn HamiltonianModel, cfg: &RunConfig) -> Result<Box<dyn ExtendedStep + 'a>> {
    let scheme = cfg.scheme()?;
    let step: Box<dyn ExtendedStep + 'a> = match cfg.method {
        MethodKind::Tao => {
            let omega = cfg.omega.ok_or_else(|| Error::Config("method tao requires omega".into()))?;
            Box::new(compose(TaoStep::new(model, omega), scheme))
        }
        _ => Box::new(compose(StrangStep::new(model), scheme)),
    };
    Ok(step)
}

impl<'a> Integrator<'a> {
    pub fn new(model: &'a dyn HamiltonianModel, cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(match cfg.method {
            MethodKind::Pihajoki | MethodKind::Tao => Self::Extended(extended_step(model, cfg)?),
            MethodKind::Semiexplicit => Self::Semiexplicit { step: extended_step(model, cfg)?, solver: cfg.solver },
            MethodKind::Midpoint => Self::Irk { model, tableau: midpoint_tableau(), solver: cfg.solver },
            MethodKind::Irk4 => Self::Irk { model, tableau: gauss_legendre4_tableau(), solver: cfg.solver },
        })
    }

    pub fn initial_state(&self, z0: &PhasePoint) -> State {
        match self {
            Self::Extended(_) => State::Extended(embed(z0)),
            _ => State::Phase(z0.clone()),
        }
    }

    pub fn advance(&self, dt: f64, state: &mut State) -> Result<StepInfo> {
        match (self, state) {
            (Self::Extended(step), State::Extended(zeta)) => {
                step.apply(dt, zeta)?;
                if !zeta.is_finite() {
                    return Err(Error::NumericalFailure("non-finite extended state".into()));
                }
                Ok(StepInfo { defect_norm: Some(zeta.defect_norm()), stats: None })
            }
            (Self::Semiexplicit { step, solver }, State::Phase(z)) => {
                let out = semiexplicit_step(step.as_ref(), dt, z, solver)?;
                *z = out.z;
                Ok(StepInfo { defect_norm: Some(out.defect_norm), stats: Some(out.stats) })
            }
            (Self::Irk { model, tableau, solver }, State::Phase(z)) => {
                let (next, stats) = irk_step(*model, tableau, dt, z, solver)?;
                *z = next;
                Ok(StepInfo { defect_norm: None, stats: Some(stats) })
            }
            _ => Err(Error::Config("state kind does not match the integrator".into())),
        }
    }

    /// Maps `z` through one step as a map on the original phase space.
    /// For unprojected extended methods this embeds, steps and averages.
    pub fn phase_map(&self, dt: f64, z: &PhasePoint) -> Result<PhasePoint> {
        let mut state = self.initial_state(z);
        self.advance(dt, &mut state)?;
        Ok(match state {
            State::Phase(z) => z,
            State::Extended(e) => crate::extended::average_restrict(&e),
        })
    }
}

/// One sampled row of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub time: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// `(name, (value - value0) / |value0|)`, Hamiltonian first.
    pub invariant_errors: Vec<(Cow<'static, str>, f64)>,
    pub defect_norm: Option<f64>,
    pub stats: Option<SolverStats>,
}

impl TrajectoryRecord {
    pub fn invariant(&self, name: &str) -> Option<f64> {
        self.invariant_errors.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

/// Aggregates over every step of a run, not only the sampled rows.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub label: String,
    pub steps: usize,
    pub records: usize,
    /// `(name, max |relative error|)`, Hamiltonian first.
    pub max_invariant_errors: Vec<(&'static str, f64)>,
    pub iterations: IterationReport,
    /// Whether the method has a copy defect at all.
    pub tracks_defect: bool,
    pub final_state: PhasePoint,
    pub wall_clock_seconds: f64,
}

impl RunSummary {
    pub fn max_error(&self, name: &str) -> Option<f64> {
        self.max_invariant_errors.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

fn relative_error(value: f64, initial: f64) -> f64 {
    if initial == 0.0 {
        value - initial
    } else {
        (value - initial) / initial.abs()
    }
}

struct InvariantProbe<'a> {
    model: &'a dyn HamiltonianModel,
    initial: Vec<(&'static str, f64)>,
}

impl<'a> InvariantProbe<'a> {
    fn new(model: &'a dyn HamiltonianModel, q: &[f64], p: &[f64]) -> Result<Self> {
        let mut initial = vec![(HAMILTONIAN, model.energy(q, p)?)];
        initial.extend(model.invariants(q, p));
        Ok(Self { model, initial })
    }

    fn errors(&self, q: &[f64], p: &[f64]) -> Result<Vec<(&'static str, f64)>> {
        let mut values = vec![(HAMILTONIAN, self.model.energy(q, p)?)];
        values.extend(self.model.invariants(q, p));
        Ok(values.into_iter().zip(&self.initial).map(|((name, v), (_, v0))| (name, relative_error(v, *v0))).collect())
    }
}

fn named(errors: Vec<(&'static str, f64)>) -> Vec<(Cow<'static, str>, f64)> {
    errors.into_iter().map(|(n, e)| (Cow::Borrowed(n), e)).collect()
}

/// Steps the configured method from the model's initial condition, handing
/// every `stride`-th row (and the initial row) to `sink`.
pub fn run_trajectory<F>(cfg: &RunConfig, mut sink: F) -> Result<RunSummary>
where
    F: FnMut(&TrajectoryRecord) -> Result<()>,
{
    cfg.validate()?;
    let model = cfg.model.build()?;
    let z0 = cfg.model.initial_condition()?;
    run_from(model.as_ref(), &z0, cfg, &mut sink)
}

/// As [`run_trajectory`], for an explicit model and initial state.
pub fn run_from<F>(model: &dyn HamiltonianModel, z0: &PhasePoint, cfg: &RunConfig, sink: &mut F) -> Result<RunSummary>
where
    F: FnMut(&TrajectoryRecord) -> Result<()>,
{
    let started = Instant::now();
    let integrator = Integrator::new(model, cfg)?;
    let mut state = integrator.initial_state(z0);
    let probe = InvariantProbe::new(model, &z0.q, &z0.p)?;
    let steps = cfg.steps();

    let mut max_err: Vec<(&'static str, f64)> = probe.initial.iter().map(|(n, _)| (*n, 0.0)).collect();
    let mut iterations = IterationReport::default();
    let mut records = 0;

    let initial_defect = (cfg.method.is_extended() || cfg.method == MethodKind::Semiexplicit).then_some(0.0);
    let first = TrajectoryRecord {
        step: 0,
        time: 0.0,
        q: z0.q.clone(),
        p: z0.p.clone(),
        invariant_errors: named(probe.errors(&z0.q, &z0.p)?),
        defect_norm: initial_defect,
        stats: None,
    };
    sink(&first)?;
    records += 1;

    for n in 1..=steps {
        let info = integrator
            .advance(cfg.dt, &mut state)
            .map_err(|e| Error::StepFailed { step: n, source: Box::new(e) })?;
        let errors = probe.errors(state.q(), state.p()).map_err(|e| Error::StepFailed { step: n, source: Box::new(e) })?;
        for ((_, worst), (_, e)) in max_err.iter_mut().zip(&errors) {
            *worst = worst.max(e.abs());
        }
        if let Some(stats) = info.stats {
            iterations.push(&stats);
        }
        if let Some(d) = info.defect_norm {
            iterations.push_defect(d);
        }
        if n % cfg.stride == 0 {
            let rec = TrajectoryRecord {
                step: n,
                time: n as f64 * cfg.dt,
                q: state.q().to_vec(),
                p: state.p().to_vec(),
                invariant_errors: named(errors),
                defect_norm: info.defect_norm,
                stats: info.stats,
            };
            sink(&rec)?;
            records += 1;
        }
    }

    Ok(RunSummary {
        label: cfg.label(),
        steps,
        records,
        max_invariant_errors: max_err,
        iterations,
        tracks_defect: initial_defect.is_some(),
        final_state: state.phase(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs without keeping any rows.
pub fn run_summary(cfg: &RunConfig) -> Result<RunSummary> {
    run_trajectory(cfg, |_| Ok(()))
}

/// Runs and collects all sampled rows in memory.
pub fn run_collect(cfg: &RunConfig) -> Result<(Vec<TrajectoryRecord>, RunSummary)> {
    let mut rows = Vec::new();
    let summary = run_trajectory(cfg, |r| {
        rows.push(r.clone());
        Ok(())
    })?;
    Ok((rows, summary))
}
