//! Numerical property checks: finite-difference Jacobians, symplecticity,
//! symmetry, and seeded random sampling of test states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::models::PhasePoint;

/// Central-difference Jacobian of `map` at `x`, row-major `n x n`.
pub fn fd_jacobian<F>(mut map: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut jac = vec![0.0; n * n];
    let mut probe = x.to_vec();
    for c in 0..n {
        probe[c] = x[c] + h;
        let plus = map(&probe)?;
        probe[c] = x[c] - h;
        let minus = map(&probe)?;
        probe[c] = x[c];
        for r in 0..n {
            jac[r * n + c] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `max |(M^T J M - J)_ij|` for a `2k x 2k` Jacobian in `(positions, momenta)`
/// block order, with `J = [[0, I], [-I, 0]]`.
///
/// Flattened extended points `(q, x, p, y)` already have this layout with
/// positions `(q, x)` and momenta `(p, y)`.
pub fn symplecticity_error(m: &[f64], n: usize) -> f64 {
    let k = n / 2;
    let j = |r: usize, c: usize| -> f64 {
        if r < k && c == r + k {
            1.0
        } else if r >= k && c + k == r {
            -1.0
        } else {
            0.0
        }
    };
    // JM, then M^T (JM).
    let mut jm = vec![0.0; n * n];
    for r in 0..n {
        let (src, sign) = if r < k { (r + k, 1.0) } else { (r - k, -1.0) };
        for c in 0..n {
            jm[r * n + c] = sign * m[src * n + c];
        }
    }
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let v: f64 = (0..n).map(|s| m[s * n + r] * jm[s * n + c]).sum();
            worst = worst.max((v - j(r, c)).abs());
        }
    }
    worst
}

/// Distance from `z` after a step of `dt` followed by a step of `-dt`.
pub fn symmetry_error<F>(mut step: F, z: &PhasePoint, dt: f64) -> Result<f64>
where
    F: FnMut(f64, &PhasePoint) -> Result<PhasePoint>,
{
    let forward = step(dt, z)?;
    let back = step(-dt, &forward)?;
    Ok(back.distance(z))
}

/// `count` states drawn uniformly from the box of half-width `radius` around `center`.
pub fn random_states(center: &PhasePoint, radius: f64, count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut shifted = |v: &[f64]| -> Vec<f64> { v.iter().map(|c| c + rng.gen_range(-radius..=radius)).collect() };
            let q = shifted(&center.q);
            let p = shifted(&center.p);
            PhasePoint { q, p }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_symplectic_and_scaling_is_not() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = [c, s, -s, c];
        assert!(symplecticity_error(&rot, 2) < 1e-15);
        let scale = [2.0, 0.0, 0.0, 1.0];
        assert_eq!(symplecticity_error(&scale, 2), 1.0);
    }

    #[test]
    fn block_layout_in_four_dimensions() {
        // Shear q1 += p2, q2 += p1 is symplectic; q1 += p1 only shears one pair.
        let mut shear = vec![0.0; 16];
        for i in 0..4 {
            shear[i * 4 + i] = 1.0;
        }
        shear[3] = 1.0;
        shear[4 + 2] = 1.0;
        assert!(symplecticity_error(&shear, 4) < 1e-15);
        shear[3] = 2.0;
        assert!(symplecticity_error(&shear, 4) > 0.5);
    }

    #[test]
    fn jacobian_of_linear_map_is_exact() {
        let jac = fd_jacobian(|x| Ok(vec![2.0 * x[0] + x[1], -x[0]]), &[0.3, 0.7], 1e-4).unwrap();
        for (a, b) in jac.iter().zip([2.0, 1.0, -1.0, 0.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let c = PhasePoint { q: vec![1.0, 2.0], p: vec![0.0, 0.0] };
        let a = random_states(&c, 0.1, 5, 7);
        assert_eq!(a, random_states(&c, 0.1, 5, 7));
        assert_ne!(a, random_states(&c, 0.1, 5, 8));
        assert!(a.iter().all(|z| z.distance(&c) <= 0.1 * 2.0));
    }
}
