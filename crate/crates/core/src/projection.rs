//! Symmetric projection onto the diagonal `q = x`, `p = y`.
//!
//! One step of the semiexplicit method solves `f(mu) = A(step(zeta_n + A^T mu) + A^T mu) = 0`
//! for `mu`, then returns the restriction of `step(zeta_n + A^T mu) + A^T mu`.
//! Both solvers start from `mu = 0` and stop after `N` residual evaluations
//! once `|mu^(N+1) - mu^(N)| < eps`, keeping `mu^(N)` so that the already
//! computed step `step(zeta_n + A^T mu^(N))` is reused for the final state.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extended::{
    average_restrict, defect, embed, norm, rounding_scale, shift, shift_in_place, DefectVector, ExtendedPoint,
    ExtendedStep,
};
use crate::models::PhasePoint;

/// Sherman-Morrison denominators below this magnitude skip the Broyden update.
pub const BROYDEN_DENOMINATOR_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    SimplifiedNewton,
    Broyden,
}

impl FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplified_newton" | "simplified" | "newton" => Ok(Self::SimplifiedNewton),
            "broyden" => Ok(Self::Broyden),
            other => Err(Error::Config(format!("unknown solver {other:?}"))),
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SimplifiedNewton => "simplified_newton",
            Self::Broyden => "broyden",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: SolverMethod,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 100, method: SolverMethod::SimplifiedNewton }
    }
}

impl SolverConfig {
    pub fn new(tolerance: f64, method: SolverMethod) -> Self {
        Self { tolerance, method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("solver tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-step telemetry of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    /// Residual evaluations performed.
    pub iterations: usize,
    /// `|mu^(N+1) - mu^(N)|` at exit.
    pub final_update_norm: f64,
    pub converged: bool,
}

/// `f(mu) = defect(step(dt, shift(zeta_n, mu))) + 2 mu`, using `A A^T = 2 I`.
pub fn residual<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    mu: &DefectVector,
) -> Result<DefectVector> {
    Ok(residual_and_image(base_step, dt, zeta_n, mu)?.0)
}

/// Residual together with `step(dt, shift(zeta_n, mu))`.
fn residual_and_image<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    mu: &DefectVector,
) -> Result<(DefectVector, ExtendedPoint)> {
    let mut image = shift(zeta_n, mu);
    base_step.apply(dt, &mut image)?;
    let mut f = defect(&image);
    for (fi, mi) in f.0.iter_mut().zip(&mu.0) {
        *fi += 2.0 * mi;
    }
    if !f.is_finite() {
        return Err(Error::NumericalFailure("non-finite projection residual".into()));
    }
    Ok((f, image))
}

/// Result of a projection solve: `mu`, its step image, and telemetry.
#[derive(Debug, Clone)]
pub struct Projection {
    pub mu: DefectVector,
    /// `step(dt, shift(zeta_n, mu))`, reused for the final shift.
    pub image: ExtendedPoint,
    /// `f(mu)`.
    pub residual: DefectVector,
    pub stats: SolverStats,
}

pub fn project<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    cfg: &SolverConfig,
) -> Result<Projection> {
    cfg.validate()?;
    match cfg.method {
        SolverMethod::SimplifiedNewton => solve_simplified(base_step, dt, zeta_n, cfg),
        SolverMethod::Broyden => solve_broyden(base_step, dt, zeta_n, cfg),
    }
}

/// `mu <- mu - f(mu)/4`, the Newton iteration with the frozen `dt = 0` Jacobian `4 I`.
pub fn simplified_newton<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    cfg: &SolverConfig,
) -> Result<(DefectVector, SolverStats)> {
    let cfg = SolverConfig { method: SolverMethod::SimplifiedNewton, ..*cfg };
    project(base_step, dt, zeta_n, &cfg).map(|p| (p.mu, p.stats))
}

/// Good Broyden iteration with Sherman-Morrison updates of the inverse Jacobian, `J_0 = 4 I`.
pub fn broyden<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    cfg: &SolverConfig,
) -> Result<(DefectVector, SolverStats)> {
    let cfg = SolverConfig { method: SolverMethod::Broyden, ..*cfg };
    project(base_step, dt, zeta_n, &cfg).map(|p| (p.mu, p.stats))
}

fn solve_simplified<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    cfg: &SolverConfig,
) -> Result<Projection> {
    let mut mu = DefectVector::zeros(zeta_n.dim());
    let mut iterations = 0;
    loop {
        let (f, image) = residual_and_image(base_step, dt, zeta_n, &mu)?;
        iterations += 1;
        let update = 0.25 * norm(&f.0);
        let converged = update < cfg.tolerance;
        if converged || iterations >= cfg.max_iterations {
            let stats = SolverStats { iterations, final_update_norm: update, converged };
            return Ok(Projection { mu, image, residual: f, stats });
        }
        for (m, fi) in mu.0.iter_mut().zip(&f.0) {
            *m -= 0.25 * fi;
        }
    }
}

fn solve_broyden<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    zeta_n: &ExtendedPoint,
    cfg: &SolverConfig,
) -> Result<Projection> {
    let n = 2 * zeta_n.dim();
    // Dense row-major inverse Jacobian approximation.
    let mut jinv = vec![0.0; n * n];
    for i in 0..n {
        jinv[i * n + i] = 0.25;
    }
    let mut mu = DefectVector::zeros(zeta_n.dim());
    let (mut f, mut image) = residual_and_image(base_step, dt, zeta_n, &mu)?;
    let mut iterations = 1;
    let mut step = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut row = vec![0.0; n];
    loop {
        for i in 0..n {
            step[i] = -(0..n).map(|j| jinv[i * n + j] * f.0[j]).sum::<f64>();
        }
        let update = norm(&step);
        let converged = update < cfg.tolerance;
        if converged || iterations >= cfg.max_iterations {
            let stats = SolverStats { iterations, final_update_norm: update, converged };
            return Ok(Projection { mu, image, residual: f, stats });
        }

        let mut next = mu.clone();
        for (m, s) in next.0.iter_mut().zip(&step) {
            *m += s;
        }
        let (f_next, image_next) = residual_and_image(base_step, dt, zeta_n, &next)?;
        iterations += 1;

        // Sherman-Morrison: Jinv += (dmu - Jinv df) (dmu^T Jinv) / (dmu^T Jinv df).
        let df: Vec<f64> = f_next.0.iter().zip(&f.0).map(|(a, b)| a - b).collect();
        for i in 0..n {
            w[i] = (0..n).map(|j| jinv[i * n + j] * df[j]).sum();
        }
        let denom: f64 = step.iter().zip(&w).map(|(a, b)| a * b).sum();
        if denom.abs() >= BROYDEN_DENOMINATOR_FLOOR {
            for j in 0..n {
                row[j] = (0..n).map(|i| step[i] * jinv[i * n + j]).sum();
            }
            for i in 0..n {
                let c = (step[i] - w[i]) / denom;
                for j in 0..n {
                    jinv[i * n + j] += c * row[j];
                }
            }
            if jinv.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure("non-finite Broyden inverse Jacobian".into()));
            }
        }

        mu = next;
        f = f_next;
        image = image_next;
    }
}

/// Outcome of one semiexplicit step.
#[derive(Debug, Clone)]
pub struct SemiexplicitOutcome {
    pub z: PhasePoint,
    pub stats: SolverStats,
    pub mu: DefectVector,
    /// `|(q, p) - (x, y)|` of the projected extended point before restriction.
    pub defect_norm: f64,
}

/// One step `z_n -> z_{n+1}` of the extended phase space integrator with
/// symmetric projection.
///
/// A non-converged solve still returns the last iterate, flagged in the stats.
pub fn semiexplicit_step<S: ExtendedStep + ?Sized>(
    base_step: &S,
    dt: f64,
    z: &PhasePoint,
    cfg: &SolverConfig,
) -> Result<SemiexplicitOutcome> {
    let zeta_n = embed(z);
    let Projection { mu, mut image, residual, stats } = project(base_step, dt, &zeta_n, cfg)?;
    shift_in_place(&mut image, &mu);
    let defect_norm = defect(&image).norm();
    // In exact arithmetic defect(image) = f(mu), and |f(mu)| = 4 |mu^(N+1) - mu^(N)|
    // for the simplified iteration.
    if (defect_norm - residual.norm()).abs() > rounding_scale(&image) {
        return Err(Error::NumericalFailure(format!(
            "projected defect {defect_norm:e} disagrees with the residual norm {:e}",
            residual.norm()
        )));
    }
    Ok(SemiexplicitOutcome { z: average_restrict(&image), stats, mu, defect_norm })
}
