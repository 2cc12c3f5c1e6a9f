//! Model problems: the Hamiltonian interface and the shipped benchmark systems.

mod nls;
mod quartic;
mod vortex;

pub use nls::{nls_model, nls_standard_ic, NlsModel};
pub use quartic::{quartic_exact_model, quartic_standard_ic, QuarticModel};
pub use vortex::{
    canonical_to_vortex, disparate_ten_vortex_config, ten_vortex_config, vortex_model,
    vortex_to_canonical, VortexConfig, VortexModel, NEAR_COLLISION_DISTANCE,
};

use crate::error::{Error, Result};

/// A state `(q, p)` of the original canonical system.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(Error::InvalidDimension(format!(
                "q has length {} and p has length {}",
                q.len(),
                p.len()
            )));
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("phase point has non-finite entries".into()));
        }
        Ok(Self { q, p })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { q: vec![0.0; dim], p: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Flattened `(q, p)` view of length `2d`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.dim());
        out.extend_from_slice(&self.q);
        out.extend_from_slice(&self.p);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let d = flat.len() / 2;
        Self { q: flat[..d].to_vec(), p: flat[d..].to_vec() }
    }

    /// Euclidean distance in `R^{2d}`.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .chain(self.p.iter().zip(&other.p))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A Hamiltonian system `q' = D2H(q,p)`, `p' = -D1H(q,p)` on `T*R^d`.
///
/// Gradients are hand-coded; [`check_gradients`] compares them against
/// central differences of [`HamiltonianModel::energy`].
pub trait HamiltonianModel: Send + Sync {
    /// Dimension `d` of the configuration space.
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64>;

    /// Writes `D1H(q,p)` into `dq` and `D2H(q,p)` into `dp`.
    fn gradient(&self, q: &[f64], p: &[f64], dq: &mut [f64], dp: &mut [f64]) -> Result<()>;

    /// Conserved quantities other than the Hamiltonian, as `(name, value)`.
    fn invariants(&self, _q: &[f64], _p: &[f64]) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn invariant_names(&self) -> Vec<&'static str> {
        let z = PhasePoint::zeros(self.dim());
        self.invariants(&z.q, &z.p).into_iter().map(|(name, _)| name).collect()
    }

    fn grad_q(&self, z: &PhasePoint) -> Result<Vec<f64>> {
        let d = self.dim();
        let (mut dq, mut dp) = (vec![0.0; d], vec![0.0; d]);
        self.gradient(&z.q, &z.p, &mut dq, &mut dp)?;
        Ok(dq)
    }

    fn grad_p(&self, z: &PhasePoint) -> Result<Vec<f64>> {
        let d = self.dim();
        let (mut dq, mut dp) = (vec![0.0; d], vec![0.0; d]);
        self.gradient(&z.q, &z.p, &mut dq, &mut dp)?;
        Ok(dp)
    }

    /// The canonical vector field `(D2H, -D1H)` written into `out` (length `2d`).
    fn vector_field(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        let (q, p) = z.split_at(d);
        let (dq, dp) = out.split_at_mut(d);
        self.gradient(q, p, dp, dq)?;
        for v in dp.iter_mut() {
            *v = -*v;
        }
        Ok(())
    }
}

/// Maximum over components of `|analytic - central difference| / (1 + |analytic|)`.
pub fn check_gradients(model: &dyn HamiltonianModel, z: &PhasePoint, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let d = model.dim();
    let (mut dq, mut dp) = (vec![0.0; d], vec![0.0; d]);
    model.gradient(&z.q, &z.p, &mut dq, &mut dp)?;

    let analytic: Vec<f64> = dq.iter().chain(dp.iter()).copied().collect();
    let mut probe = z.to_flat();
    let mut worst = 0.0f64;
    for (k, exact) in analytic.iter().enumerate() {
        let base = probe[k];
        probe[k] = base + h;
        let plus = model.energy(&probe[..d], &probe[d..])?;
        probe[k] = base - h;
        let minus = model.energy(&probe[..d], &probe[d..])?;
        probe[k] = base;
        let numeric = (plus - minus) / (2.0 * h);
        worst = worst.max((exact - numeric).abs() / (1.0 + exact.abs()));
    }
    Ok(worst)
}
