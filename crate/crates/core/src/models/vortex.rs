use std::f64::consts::PI;

use super::{HamiltonianModel, PhasePoint};
use crate::error::{Error, Result};

/// Pairwise distance below which gradient or energy evaluation fails.
pub const NEAR_COLLISION_DISTANCE: f64 = 1e-12;

/// Point vortices in the plane: centers `(x_i, y_i)` with circulations `gamma_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfig {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl VortexConfig {
    pub fn new(x: Vec<f64>, y: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let cfg = Self { x, y, gamma };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.gamma.len();
        if n == 0 || self.x.len() != n || self.y.len() != n {
            return Err(Error::InvalidDimension(format!(
                "vortex config needs matching non-empty x/y/gamma, got {}/{}/{}",
                self.x.len(),
                self.y.len(),
                n
            )));
        }
        check_circulations(&self.gamma)?;
        for i in 0..n {
            for j in i + 1..n {
                if self.x[i] == self.x[j] && self.y[i] == self.y[j] {
                    return Err(Error::SingularConfiguration { i, j });
                }
            }
        }
        Ok(())
    }
}

fn check_circulations(gamma: &[f64]) -> Result<()> {
    match gamma.iter().position(|g| *g == 0.0 || !g.is_finite()) {
        Some(index) => Err(Error::InvalidCirculation { index }),
        None => Ok(()),
    }
}

/// Ten vortices with circulations in `(-1, 1)`.
pub fn ten_vortex_config() -> VortexConfig {
    VortexConfig {
        x: vec![3.0, -10.0, 6.0, 9.0, 0.0, 7.0, -8.0, 5.0, 9.0, 7.0],
        y: vec![-5.0, -6.0, 0.0, -2.0, 0.0, 10.0, 2.0, 9.0, 0.0, -1.0],
        gamma: [-5.0, 3.0, 6.0, 7.0, -2.0, -8.0, -9.0, -3.0, 7.0, -6.0]
            .iter()
            .map(|g| g / 10.0)
            .collect(),
    }
}

/// Ten vortices with widely spread circulations, a harder projection problem.
pub fn disparate_ten_vortex_config() -> VortexConfig {
    VortexConfig {
        x: vec![0.5, 3.5, -1.5, -0.5, -4.5, -3.5, 1.5, -2.0, 4.0, -4.0],
        y: vec![5.0, 0.5, 2.0, 5.0, -2.0, -1.0, -0.5, 3.0, 3.5, -4.0],
        gamma: vec![-14.8, -18.8, 17.6, -8.0, -8.2, -6.8, -1.4, 6.0, -11.0, 13.8],
    }
}

fn sgn(g: f64) -> f64 {
    if g > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `q_i = sqrt|G_i| x_i`, `p_i = sqrt|G_i| sgn(G_i) y_i`.
pub fn vortex_to_canonical(cfg: &VortexConfig) -> Result<PhasePoint> {
    check_circulations(&cfg.gamma)?;
    let q = cfg.x.iter().zip(&cfg.gamma).map(|(x, g)| g.abs().sqrt() * x).collect();
    let p = cfg.y.iter().zip(&cfg.gamma).map(|(y, g)| g.abs().sqrt() * sgn(*g) * y).collect();
    Ok(PhasePoint { q, p })
}

/// Inverse of [`vortex_to_canonical`], returning vortex centers `(x, y)`.
pub fn canonical_to_vortex(z: &PhasePoint, gamma: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_circulations(gamma)?;
    if z.dim() != gamma.len() {
        return Err(Error::InvalidDimension(format!(
            "state has dimension {} but {} circulations were given",
            z.dim(),
            gamma.len()
        )));
    }
    let x = z.q.iter().zip(gamma).map(|(q, g)| q / g.abs().sqrt()).collect();
    let y = z.p.iter().zip(gamma).map(|(p, g)| sgn(*g) * p / g.abs().sqrt()).collect();
    Ok((x, y))
}

/// Point-vortex interaction energy in canonical coordinates.
///
/// `H = -1/(4 pi) sum_{i != j} G_i G_j log |z_i - z_j|`, summed over ordered pairs.
#[derive(Debug, Clone)]
pub struct VortexModel {
    gamma: Vec<f64>,
    sqrt_abs: Vec<f64>,
    sign: Vec<f64>,
}

pub fn vortex_model(cfg: &VortexConfig) -> Result<VortexModel> {
    cfg.validate()?;
    Ok(VortexModel {
        gamma: cfg.gamma.clone(),
        sqrt_abs: cfg.gamma.iter().map(|g| g.abs().sqrt()).collect(),
        sign: cfg.gamma.iter().map(|g| sgn(*g)).collect(),
    })
}

impl VortexModel {
    pub fn circulations(&self) -> &[f64] {
        &self.gamma
    }

    fn center(&self, q: &[f64], p: &[f64], i: usize) -> (f64, f64) {
        (q[i] / self.sqrt_abs[i], self.sign[i] * p[i] / self.sqrt_abs[i])
    }

    fn separation(&self, q: &[f64], p: &[f64], i: usize, j: usize) -> Result<(f64, f64, f64)> {
        let (xi, yi) = self.center(q, p, i);
        let (xj, yj) = self.center(q, p, j);
        let (dx, dy) = (xi - xj, yi - yj);
        let r2 = dx * dx + dy * dy;
        if !(r2.sqrt() >= NEAR_COLLISION_DISTANCE) {
            return Err(Error::NearCollision { i, j, distance: r2.sqrt() });
        }
        Ok((dx, dy, r2))
    }
}

impl HamiltonianModel for VortexModel {
    fn dim(&self) -> usize {
        self.gamma.len()
    }

    fn name(&self) -> &str {
        "vortex"
    }

    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        let n = self.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let (_, _, r2) = self.separation(q, p, i, j)?;
                // log|z| = log(r^2) / 2, and each unordered pair appears twice.
                sum += self.gamma[i] * self.gamma[j] * r2.ln();
            }
        }
        Ok(-sum / (4.0 * PI))
    }

    fn gradient(&self, q: &[f64], p: &[f64], dq: &mut [f64], dp: &mut [f64]) -> Result<()> {
        let n = self.dim();
        dq.fill(0.0);
        dp.fill(0.0);
        // Accumulate dH/dx and dH/dy first, then map to canonical variables.
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy, r2) = self.separation(q, p, i, j)?;
                let c = -self.gamma[i] * self.gamma[j] / (2.0 * PI * r2);
                dq[i] += c * dx;
                dq[j] -= c * dx;
                dp[i] += c * dy;
                dp[j] -= c * dy;
            }
        }
        for i in 0..n {
            dq[i] /= self.sqrt_abs[i];
            dp[i] *= self.sign[i] / self.sqrt_abs[i];
        }
        Ok(())
    }

    fn invariants(&self, q: &[f64], p: &[f64]) -> Vec<(&'static str, f64)> {
        let (mut lin_q, mut lin_p, mut ang) = (0.0, 0.0, 0.0);
        for (i, g) in self.gamma.iter().enumerate() {
            let (x, y) = self.center(q, p, i);
            lin_q += g * x;
            lin_p += g * y;
            ang += g * (x * x + y * y);
        }
        vec![("Q", lin_q), ("P", lin_p), ("I_angular", ang)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::check_gradients;

    #[test]
    fn unit_separation_has_zero_energy() {
        let cfg = VortexConfig::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let m = vortex_model(&cfg).unwrap();
        let z = vortex_to_canonical(&cfg).unwrap();
        assert_eq!(m.energy(&z.q, &z.p).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_pair_has_zero_linear_impulse() {
        let cfg = VortexConfig::new(vec![0.0, 0.0], vec![1.0, -1.0], vec![1.0, -1.0]).unwrap();
        let m = vortex_model(&cfg).unwrap();
        let z = vortex_to_canonical(&cfg).unwrap();
        let inv = m.invariants(&z.q, &z.p);
        assert_eq!(inv[0], ("Q", 0.0));
    }

    #[test]
    fn ten_vortex_impulses() {
        // Exact rational sums over the initial condition: Q = 38/5, P = -63/5, I = -403/5.
        let cfg = ten_vortex_config();
        let m = vortex_model(&cfg).unwrap();
        let z = vortex_to_canonical(&cfg).unwrap();
        let inv = m.invariants(&z.q, &z.p);
        assert!((inv[0].1 - 7.6).abs() < 1e-13);
        assert!((inv[1].1 + 12.6).abs() < 1e-13);
        assert!((inv[2].1 + 80.6).abs() < 1e-12);
    }

    #[test]
    fn transform_first_vortex() {
        let z = vortex_to_canonical(&ten_vortex_config()).unwrap();
        assert!((z.q[0] - 2.1213203435596424).abs() < 1e-12);
        assert!((z.p[0] - 3.5355339059327378).abs() < 1e-12);
    }

    #[test]
    fn unit_circulation_is_identity() {
        let cfg = VortexConfig::new(vec![0.3, -1.7], vec![2.5, 0.1], vec![1.0, 1.0]).unwrap();
        let z = vortex_to_canonical(&cfg).unwrap();
        assert_eq!(z.q, cfg.x);
        assert_eq!(z.p, cfg.y);
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(
            VortexConfig::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![1.0, 0.0]),
            Err(Error::InvalidCirculation { index: 1 })
        ));
        assert!(matches!(
            VortexConfig::new(vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 2.0]),
            Err(Error::SingularConfiguration { i: 0, j: 1 })
        ));
        let z = PhasePoint { q: vec![1.0], p: vec![1.0] };
        assert!(canonical_to_vortex(&z, &[0.0]).is_err());
    }

    #[test]
    fn near_collision_during_evaluation() {
        let m = vortex_model(&ten_vortex_config()).unwrap();
        let mut z = vortex_to_canonical(&ten_vortex_config()).unwrap();
        // Move vortex 1 onto vortex 0 in physical coordinates.
        let (x, y) = canonical_to_vortex(&z, m.circulations()).unwrap();
        z.q[1] = x[0] * m.circulations()[1].abs().sqrt();
        z.p[1] = y[0] * m.circulations()[1].abs().sqrt() * sgn(m.circulations()[1]);
        let (mut dq, mut dp) = (vec![0.0; 10], vec![0.0; 10]);
        assert!(matches!(
            m.gradient(&z.q, &z.p, &mut dq, &mut dp),
            Err(Error::NearCollision { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn gradients_match_finite_differences() {
        for cfg in [ten_vortex_config(), disparate_ten_vortex_config()] {
            let m = vortex_model(&cfg).unwrap();
            let z = vortex_to_canonical(&cfg).unwrap();
            assert!(check_gradients(&m, &z, 1e-6).unwrap() < 1e-6);
        }
    }
}
