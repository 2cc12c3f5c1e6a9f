use super::{HamiltonianModel, PhasePoint};
use crate::error::Result;

/// `H(q,p) = (q^2 + 1)(p^2 + 1) / 2` on `T*R`, an exactly solvable
/// non-separable test problem.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticModel;

pub fn quartic_exact_model() -> QuarticModel {
    QuarticModel
}

/// The benchmark initial condition `(q, p) = (-3, 0)`.
pub fn quartic_standard_ic() -> PhasePoint {
    PhasePoint { q: vec![-3.0], p: vec![0.0] }
}

impl HamiltonianModel for QuarticModel {
    fn dim(&self) -> usize {
        1
    }

    fn name(&self) -> &str {
        "quartic"
    }

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        Ok(0.5 * (q[0] * q[0] + 1.0) * (p[0] * p[0] + 1.0))
    }

    fn gradient(&self, q: &[f64], p: &[f64], dq: &mut [f64], dp: &mut [f64]) -> Result<()> {
        dq[0] = q[0] * (p[0] * p[0] + 1.0);
        dp[0] = p[0] * (q[0] * q[0] + 1.0);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::check_gradients;

    #[test]
    fn energy_values() {
        let m = quartic_exact_model();
        assert_eq!(m.energy(&[0.0], &[0.0]).unwrap(), 0.5);
        assert_eq!(m.energy(&[-3.0], &[0.0]).unwrap(), 5.0);
    }

    #[test]
    fn gradient_at_initial_condition() {
        let m = quartic_exact_model();
        let z = quartic_standard_ic();
        assert_eq!(m.grad_q(&z).unwrap(), vec![-3.0]);
        assert_eq!(m.grad_p(&z).unwrap(), vec![0.0]);
        assert!(check_gradients(&m, &z, 1e-6).unwrap() < 1e-6);
    }

    #[test]
    fn no_extra_invariants() {
        assert!(quartic_exact_model().invariant_names().is_empty());
    }
}
