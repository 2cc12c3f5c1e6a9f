//! Classical RK4 reference integration, independent of the splitting code paths.

use crate::error::{Error, Result};
use crate::extended::ExtendedPoint;
use crate::models::{HamiltonianModel, PhasePoint};

/// Largest number of RK4 steps the oracle tries before giving up.
pub const ORACLE_MAX_STEPS: usize = 1 << 24;

/// Integrates `y' = field(y)` over `[0, t]` with `steps` fixed RK4 steps.
pub fn rk4<F>(mut field: F, y0: &[f64], t: f64, steps: usize) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if steps == 0 || t == 0.0 {
        return Ok(y);
    }
    let h = t / steps as f64;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..steps {
        field(&y, &mut k1)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        field(&tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        field(&tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        field(&tmp, &mut k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(y)
}

/// RK4 on the original system `q' = D2H`, `p' = -D1H`.
pub fn rk4_phase(model: &dyn HamiltonianModel, z0: &PhasePoint, t: f64, steps: usize) -> Result<PhasePoint> {
    let y = rk4(|y, out| model.vector_field(y, out), &z0.to_flat(), t, steps)?;
    Ok(PhasePoint::from_flat(&y))
}

/// The doubled vector field
/// `q' = D2H(x,p)`, `x' = D2H(q,y)`, `p' = -D1H(q,y)`, `y' = -D1H(x,p)`
/// on the flattened `(q, x, p, y)`.
pub fn extended_vector_field(model: &dyn HamiltonianModel, state: &[f64], out: &mut [f64]) -> Result<()> {
    let d = model.dim();
    let (q, x, p, y) = (&state[..d], &state[d..2 * d], &state[2 * d..3 * d], &state[3 * d..]);
    let (mut g1q, mut g1p) = (vec![0.0; d], vec![0.0; d]);
    let (mut g2q, mut g2p) = (vec![0.0; d], vec![0.0; d]);
    model.gradient(q, y, &mut g1q, &mut g1p)?;
    model.gradient(x, p, &mut g2q, &mut g2p)?;
    for i in 0..d {
        out[i] = g2p[i];
        out[d + i] = g1p[i];
        out[2 * d + i] = -g1q[i];
        out[3 * d + i] = -g2q[i];
    }
    Ok(())
}

pub fn rk4_extended(model: &dyn HamiltonianModel, zeta0: &ExtendedPoint, t: f64, steps: usize) -> Result<ExtendedPoint> {
    let y = rk4(|y, out| extended_vector_field(model, y, out), &zeta0.to_flat(), t, steps)?;
    Ok(ExtendedPoint::from_flat(&y))
}

/// RK4 with step halving until two successive resolutions differ by less than `tol`.
pub fn reference_oracle(model: &dyn HamiltonianModel, z0: &PhasePoint, t: f64, tol: f64) -> Result<PhasePoint> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("oracle tolerance must be positive, got {tol}")));
    }
    if t == 0.0 {
        return Ok(z0.clone());
    }
    let mut steps = ((t.abs() / 0.01).ceil() as usize).max(16);
    let mut coarse = rk4_phase(model, z0, t, steps)?;
    while steps <= ORACLE_MAX_STEPS / 2 {
        steps *= 2;
        let fine = rk4_phase(model, z0, t, steps)?;
        let change = fine.distance(&coarse);
        if change < tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::OracleFailure(format!("no convergence to {tol:e} within {ORACLE_MAX_STEPS} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{quartic_exact_model, quartic_standard_ic};

    #[test]
    fn zero_time_is_identity() {
        let m = quartic_exact_model();
        let z = quartic_standard_ic();
        assert_eq!(reference_oracle(&m, &z, 0.0, 1e-10).unwrap(), z);
    }

    #[test]
    fn oracle_conserves_quartic_energy() {
        let m = quartic_exact_model();
        let z = quartic_standard_ic();
        let end = reference_oracle(&m, &z, 1.0, 1e-10).unwrap();
        let h0 = m.energy(&z.q, &z.p).unwrap();
        let h1 = m.energy(&end.q, &end.p).unwrap();
        assert!((h1 - h0).abs() / h0 < 1e-9);
    }

    #[test]
    fn rk4_solves_exponential() {
        let y = rk4(
            |y, out| {
                out[0] = y[0];
                Ok(())
            },
            &[1.0],
            1.0,
            1000,
        )
        .unwrap();
        assert!((y[0] - 1f64.exp()).abs() < 1e-12);
    }
}
