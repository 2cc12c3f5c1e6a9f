use super::{HamiltonianModel, PhasePoint};
use crate::error::{Error, Result};

/// Finite-dimensional cubic Schrodinger lattice with `N` sites:
///
/// `H = 1/4 sum_i (q_i^2 + p_i^2)^2
///      - sum_{i>=2} (p_{i-1}^2 p_i^2 + q_{i-1}^2 q_i^2 - q_{i-1}^2 p_i^2
///                    - p_{i-1}^2 q_i^2 + 4 p_{i-1} p_i q_{i-1} q_i)`
///
/// with the total mass `sum_i (q_i^2 + p_i^2)` as an extra invariant.
#[derive(Debug, Clone, Copy)]
pub struct NlsModel {
    sites: usize,
}

pub fn nls_model(sites: usize) -> Result<NlsModel> {
    if sites < 2 {
        return Err(Error::InvalidDimension(format!("NLS lattice needs N >= 2 sites, got {sites}")));
    }
    Ok(NlsModel { sites })
}

/// `q(0) = (3, 0.01, 0.01, 0.01, 0.01)`, `p(0) = (1, 0, 0, 0, 0)` for `N = 5`.
pub fn nls_standard_ic() -> PhasePoint {
    PhasePoint { q: vec![3.0, 0.01, 0.01, 0.01, 0.01], p: vec![1.0, 0.0, 0.0, 0.0, 0.0] }
}

pub fn total_mass(q: &[f64], p: &[f64]) -> f64 {
    q.iter().zip(p).map(|(a, b)| a * a + b * b).sum()
}

impl HamiltonianModel for NlsModel {
    fn dim(&self) -> usize {
        self.sites
    }

    fn name(&self) -> &str {
        "nls"
    }

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        let onsite: f64 = q
            .iter()
            .zip(p)
            .map(|(a, b)| {
                let r = a * a + b * b;
                r * r
            })
            .sum();
        let coupling: f64 = (1..self.sites)
            .map(|i| {
                let (qa, qb, pa, pb) = (q[i - 1], q[i], p[i - 1], p[i]);
                pa * pa * pb * pb + qa * qa * qb * qb - qa * qa * pb * pb - pa * pa * qb * qb
                    + 4.0 * pa * pb * qa * qb
            })
            .sum();
        Ok(0.25 * onsite - coupling)
    }

    fn gradient(&self, q: &[f64], p: &[f64], dq: &mut [f64], dp: &mut [f64]) -> Result<()> {
        for i in 0..self.sites {
            let r = q[i] * q[i] + p[i] * p[i];
            dq[i] = r * q[i];
            dp[i] = r * p[i];
        }
        for i in 1..self.sites {
            let (a, b) = (i - 1, i);
            let (qa, qb, pa, pb) = (q[a], q[b], p[a], p[b]);
            dq[a] -= 2.0 * qa * qb * qb - 2.0 * qa * pb * pb + 4.0 * pa * pb * qb;
            dq[b] -= 2.0 * qa * qa * qb - 2.0 * pa * pa * qb + 4.0 * pa * pb * qa;
            dp[a] -= 2.0 * pa * pb * pb - 2.0 * pa * qb * qb + 4.0 * pb * qa * qb;
            dp[b] -= 2.0 * pa * pa * pb - 2.0 * qa * qa * pb + 4.0 * pa * qa * qb;
        }
        Ok(())
    }

    fn invariants(&self, q: &[f64], p: &[f64]) -> Vec<(&'static str, f64)> {
        vec![("total_mass", total_mass(q, p))]
    }
}
