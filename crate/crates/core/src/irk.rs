//! Gauss-Legendre collocation methods (implicit midpoint, two-stage IRK4)
//! solved with full Newton iterations on the stage derivatives.

use crate::error::{Error, Result};
use crate::extended::norm;
use crate::models::{HamiltonianModel, PhasePoint};
use crate::projection::{SolverConfig, SolverStats};

#[derive(Debug, Clone, PartialEq)]
pub struct IrkTableau {
    /// Row-major `s x s` stage matrix.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub order: u32,
}

impl IrkTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Largest `|b_i a_ij + b_j a_ji - b_i b_j|`.
    pub fn symplecticity_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst = 0.0f64;
        for i in 0..s {
            for j in 0..s {
                let m = self.b[i] * self.a[i * s + j] + self.b[j] * self.a[j * s + i] - self.b[i] * self.b[j];
                worst = worst.max(m.abs());
            }
        }
        worst
    }
}

pub fn midpoint_tableau() -> IrkTableau {
    IrkTableau { a: vec![0.5], b: vec![1.0], c: vec![0.5], order: 2 }
}

pub fn gauss_legendre4_tableau() -> IrkTableau {
    let r = 3f64.sqrt() / 6.0;
    IrkTableau { a: vec![0.25, 0.25 - r, 0.25 + r, 0.25], b: vec![0.5, 0.5], c: vec![0.5 - r, 0.5 + r], order: 4 }
}

/// One step of the collocation method.
///
/// Unknowns are the stage derivatives `K_i = F(z + dt sum_j a_ij K_j)`, started
/// from zero. The Jacobian of `F` comes from central differences of the
/// analytic vector field. Iteration stops after `N` Newton solves once
/// `|dt| |K^(N+1) - K^(N)| < eps`, keeping `K^(N)`.
pub fn irk_step(
    model: &dyn HamiltonianModel,
    tableau: &IrkTableau,
    dt: f64,
    z: &PhasePoint,
    cfg: &SolverConfig,
) -> Result<(PhasePoint, SolverStats)> {
    cfg.validate()?;
    let n = 2 * model.dim();
    let s = tableau.stages();
    let m = n * s;
    let z0 = z.to_flat();

    let mut k = vec![0.0; m];
    let mut stage = vec![0.0; n];
    let mut field = vec![0.0; m];
    let mut jac_f = vec![0.0; s * n * n];
    let mut jac = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let mut iterations = 0;
    let mut update;
    let mut converged;

    loop {
        // Stage values and their vector fields plus Jacobians.
        for i in 0..s {
            for c in 0..n {
                stage[c] = z0[c] + dt * (0..s).map(|j| tableau.a[i * s + j] * k[j * n + c]).sum::<f64>();
            }
            model.vector_field(&stage, &mut field[i * n..(i + 1) * n])?;
            field_jacobian(model, &mut stage, &mut jac_f[i * n * n..(i + 1) * n * n])?;
        }
        // G(K) = K - F(Y), dG/dK = I - dt a_ij DF(Y_i).
        for i in 0..s {
            for r in 0..n {
                rhs[i * n + r] = -(k[i * n + r] - field[i * n + r]);
                for j in 0..s {
                    for c in 0..n {
                        let identity = if i == j && r == c { 1.0 } else { 0.0 };
                        jac[(i * n + r) * m + j * n + c] = identity - dt * tableau.a[i * s + j] * jac_f[i * n * n + r * n + c];
                    }
                }
            }
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite stage residual".into()));
        }
        solve_in_place(&mut jac, &mut rhs, m)?;
        iterations += 1;
        update = dt.abs() * norm(&rhs);
        converged = update < cfg.tolerance;
        if converged || iterations >= cfg.max_iterations {
            break;
        }
        for (ki, di) in k.iter_mut().zip(&rhs) {
            *ki += di;
        }
    }

    let mut next = z0;
    for i in 0..s {
        for c in 0..n {
            next[c] += dt * tableau.b[i] * k[i * n + c];
        }
    }
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite implicit Runge-Kutta update".into()));
    }
    Ok((PhasePoint::from_flat(&next), SolverStats { iterations, final_update_norm: update, converged }))
}

/// Central-difference Jacobian of the canonical vector field, row-major `n x n`.
fn field_jacobian(model: &dyn HamiltonianModel, y: &mut [f64], out: &mut [f64]) -> Result<()> {
    let n = y.len();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for c in 0..n {
        let base = y[c];
        let h = f64::EPSILON.cbrt() * (1.0 + base.abs());
        y[c] = base + h;
        model.vector_field(y, &mut plus)?;
        y[c] = base - h;
        model.vector_field(y, &mut minus)?;
        y[c] = base;
        for r in 0..n {
            out[r * n + c] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting; the solution overwrites `rhs`.
fn solve_in_place(mat: &mut [f64], rhs: &mut [f64], n: usize) -> Result<()> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| mat[a * n + col].abs().total_cmp(&mat[b * n + col].abs()))
            .unwrap_or(col);
        if mat[pivot * n + col] == 0.0 || !mat[pivot * n + col].is_finite() {
            return Err(Error::NumericalFailure("singular Newton matrix".into()));
        }
        if pivot != col {
            for c in 0..n {
                mat.swap(pivot * n + c, col * n + c);
            }
            rhs.swap(pivot, col);
        }
        let d = mat[col * n + col];
        for r in col + 1..n {
            let factor = mat[r * n + col] / d;
            if factor != 0.0 {
                for c in col..n {
                    mat[r * n + c] -= factor * mat[col * n + c];
                }
                rhs[r] -= factor * rhs[col];
            }
        }
    }
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| mat[r * n + c] * rhs[c]).sum();
        rhs[r] = (rhs[r] - tail) / mat[r * n + r];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::SolverMethod;

    struct Oscillator;

    impl HamiltonianModel for Oscillator {
        fn dim(&self) -> usize {
            1
        }
        fn name(&self) -> &str {
            "oscillator"
        }
        fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
            Ok(0.5 * (q[0] * q[0] + p[0] * p[0]))
        }
        fn gradient(&self, q: &[f64], p: &[f64], dq: &mut [f64], dp: &mut [f64]) -> Result<()> {
            dq[0] = q[0];
            dp[0] = p[0];
            Ok(())
        }
    }

    #[test]
    fn tableaux_are_symplectic() {
        for t in [midpoint_tableau(), gauss_legendre4_tableau()] {
            assert!(t.symplecticity_defect() <= 1e-15);
            assert_eq!(t.b.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let z = PhasePoint { q: vec![0.4], p: vec![-1.1] };
        for t in [midpoint_tableau(), gauss_legendre4_tableau()] {
            let (next, stats) = irk_step(&Oscillator, &t, 0.0, &z, &SolverConfig::default()).unwrap();
            assert_eq!(next, z);
            assert_eq!(stats.iterations, 1);
        }
    }

    #[test]
    fn midpoint_is_cayley_rotation_on_oscillator() {
        let (q, p, dt) = (0.8, -0.3, 0.1);
        let cfg = SolverConfig::new(1e-14, SolverMethod::SimplifiedNewton);
        let z = PhasePoint { q: vec![q], p: vec![p] };
        let (next, stats) = irk_step(&Oscillator, &midpoint_tableau(), dt, &z, &cfg).unwrap();
        let h2 = (dt / 2.0) * (dt / 2.0);
        let q1 = ((1.0 - h2) * q + dt * p) / (1.0 + h2);
        let p1 = ((1.0 - h2) * p - dt * q) / (1.0 + h2);
        assert!(stats.converged);
        assert!((next.q[0] - q1).abs() < 1e-13 && (next.p[0] - p1).abs() < 1e-13);
    }

    #[test]
    fn solves_dense_system() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        solve_in_place(&mut a, &mut b, 2).unwrap();
        assert!((b[0] - 0.8).abs() < 1e-15 && (b[1] - 1.4).abs() < 1e-15);
        let mut singular = vec![1.0, 2.0, 2.0, 4.0];
        assert!(solve_in_place(&mut singular, &mut [1.0, 1.0], 2).is_err());
    }
}
