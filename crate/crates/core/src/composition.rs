//! Palindromic composition schemes raising the order of a symmetric base step.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extended::{ExtendedPoint, ExtendedStep};

/// Yoshida's order-6 solution A. The values solve the order conditions
/// `sum g^3 = 0`, `sum g^5 = 0` and the order-5 coupling condition for the
/// palindrome `(w3, w2, w1, w0, w1, w2, w3)`, computed at 50 digits.
pub const YOSHIDA6_W1: f64 = -1.177_679_984_178_871_006_946_415_680_964_3;
pub const YOSHIDA6_W2: f64 = 0.235_573_213_359_358_133_684_793_182_978_53;
pub const YOSHIDA6_W3: f64 = 0.784_513_610_477_557_263_819_497_633_866_35;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionKind {
    None,
    TripleJump,
    Suzuki,
    Yoshida6,
}

impl FromStr for CompositionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "triple_jump" => Ok(Self::TripleJump),
            "suzuki" => Ok(Self::Suzuki),
            "yoshida6" => Ok(Self::Yoshida6),
            other => Err(Error::Config(format!("unknown composition {other:?}"))),
        }
    }
}

impl fmt::Display for CompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::TripleJump => "triple_jump",
            Self::Suzuki => "suzuki",
            Self::Yoshida6 => "yoshida6",
        })
    }
}

/// Flattened stage coefficients `gamma_1, ..., gamma_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionScheme {
    pub kind: CompositionKind,
    pub coefficients: Vec<f64>,
    pub claimed_order: u32,
}

impl CompositionScheme {
    /// The trivial scheme `[1]`: the base step itself.
    pub fn identity() -> Self {
        Self { kind: CompositionKind::None, coefficients: vec![1.0], claimed_order: 2 }
    }

    pub fn build(kind: CompositionKind, order: u32) -> Result<Self> {
        match kind {
            CompositionKind::None if order == 2 => Ok(Self::identity()),
            CompositionKind::None => Err(Error::Config(format!(
                "composition \"none\" gives order 2, but order {order} was requested"
            ))),
            CompositionKind::TripleJump => triple_jump(order),
            CompositionKind::Suzuki => suzuki(order),
            CompositionKind::Yoshida6 if order == 6 => Ok(yoshida6()),
            CompositionKind::Yoshida6 => Err(Error::InvalidOrder(order)),
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_palindromic(&self) -> bool {
        let c = &self.coefficients;
        (0..c.len()).all(|i| c[i] == c[c.len() - 1 - i])
    }

    pub fn sum(&self) -> f64 {
        self.coefficients.iter().sum()
    }
}

fn check_order(order: u32) -> Result<()> {
    if order < 4 || !order.is_multiple_of(2) {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// Builds the order `m` scheme as `stage(m)` applied to the order `m - 2`
/// scheme, starting from the order-2 base `[1]`.
fn fractal(order: u32, stage: impl Fn(u32) -> Vec<f64>) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for m in (4..=order).step_by(2) {
        let inner = coeffs;
        coeffs = stage(m).into_iter().flat_map(|g| inner.iter().map(move |c| g * c)).collect();
    }
    coeffs
}

/// Recursive symmetric Triple Jump, `3^{(n-2)/2}` stages for order `n`.
pub fn triple_jump(order: u32) -> Result<CompositionScheme> {
    check_order(order)?;
    let coefficients = fractal(order, |m| {
        let r = 2f64.powf(1.0 / f64::from(m - 1));
        let g1 = 1.0 / (2.0 - r);
        vec![g1, -r / (2.0 - r), g1]
    });
    Ok(CompositionScheme { kind: CompositionKind::TripleJump, coefficients, claimed_order: order })
}

/// Suzuki's fractal composition, `5^{(n-2)/2}` stages for order `n`.
pub fn suzuki(order: u32) -> Result<CompositionScheme> {
    check_order(order)?;
    let coefficients = fractal(order, |m| {
        let r = 4f64.powf(1.0 / f64::from(m - 1));
        let g1 = 1.0 / (4.0 - r);
        vec![g1, g1, -r / (4.0 - r), g1, g1]
    });
    Ok(CompositionScheme { kind: CompositionKind::Suzuki, coefficients, claimed_order: order })
}

/// Yoshida's seven-stage order-6 composition.
pub fn yoshida6() -> CompositionScheme {
    let w0 = 1.0 - 2.0 * (YOSHIDA6_W1 + YOSHIDA6_W2 + YOSHIDA6_W3);
    CompositionScheme {
        kind: CompositionKind::Yoshida6,
        coefficients: vec![YOSHIDA6_W3, YOSHIDA6_W2, YOSHIDA6_W1, w0, YOSHIDA6_W1, YOSHIDA6_W2, YOSHIDA6_W3],
        claimed_order: 6,
    }
}

/// `base(gamma_k dt) o ... o base(gamma_1 dt)`.
#[derive(Clone)]
pub struct Composed<S> {
    pub base: S,
    pub scheme: CompositionScheme,
}

pub fn compose<S: ExtendedStep>(base: S, scheme: CompositionScheme) -> Composed<S> {
    Composed { base, scheme }
}

impl<S: ExtendedStep> ExtendedStep for Composed<S> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, dt: f64, zeta: &mut ExtendedPoint) -> Result<()> {
        for g in &self.scheme.coefficients {
            self.base.apply(g * dt, zeta)?;
        }
        Ok(())
    }

    fn stages(&self) -> usize {
        self.base.stages() * self.scheme.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_jump_order4_coefficients() {
        let s = triple_jump(4).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.coefficients[0] - 1.3512071919596578).abs() < 1e-15);
        assert!((s.coefficients[1] + 1.7024143839193153).abs() < 1e-15);
        assert_eq!(s.coefficients[0], s.coefficients[2]);
    }

    #[test]
    fn suzuki_order4_coefficients() {
        let s = suzuki(4).unwrap();
        assert_eq!(s.len(), 5);
        for i in [0, 1, 3, 4] {
            assert!((s.coefficients[i] - 0.4144907717943757).abs() < 1e-15);
        }
        assert!((s.coefficients[2] + 0.6579630871775028).abs() < 1e-15);
    }

    #[test]
    fn scheme_lengths_and_sums() {
        for n in [4, 6, 8] {
            let k = (n - 2) / 2;
            let tj = triple_jump(n).unwrap();
            let sz = suzuki(n).unwrap();
            assert_eq!(tj.len(), 3usize.pow(k));
            assert_eq!(sz.len(), 5usize.pow(k));
            for s in [tj, sz] {
                assert!(s.is_palindromic());
                assert!((s.sum() - 1.0).abs() <= 1e-13);
            }
        }
        let y = yoshida6();
        assert_eq!(y.len(), 7);
        assert!(y.is_palindromic());
        assert!((y.sum() - 1.0).abs() <= 1e-13);
    }

    fn order6_conditions(g: &[f64]) -> [f64; 3] {
        let c3: f64 = g.iter().map(|v| v.powi(3)).sum();
        let c5: f64 = g.iter().map(|v| v.powi(5)).sum();
        let mut coupled = 0.0;
        let mut prefix = 0.0;
        for v in g {
            let s = prefix + 0.5 * v;
            coupled += v.powi(3) * s * s;
            prefix += v;
        }
        [c3, c5, coupled]
    }

    #[test]
    fn order6_schemes_satisfy_order_conditions() {
        for s in [yoshida6(), triple_jump(6).unwrap(), suzuki(6).unwrap()] {
            let c = order6_conditions(&s.coefficients);
            assert!(c.iter().all(|v| v.abs() < 1e-12), "{:?}: {c:?}", s.kind);
        }
        let c = order6_conditions(&triple_jump(4).unwrap().coefficients);
        assert!(c[0].abs() < 1e-13 && c[1].abs() > 1e-3);
    }

    #[test]
    fn invalid_orders() {
        for n in [0, 2, 3, 5, 7] {
            assert_eq!(triple_jump(n), Err(Error::InvalidOrder(n)));
            assert_eq!(suzuki(n), Err(Error::InvalidOrder(n)));
        }
        assert!(CompositionScheme::build(CompositionKind::Yoshida6, 4).is_err());
        assert!(CompositionScheme::build(CompositionKind::None, 4).is_err());
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for k in ["none", "triple_jump", "suzuki", "yoshida6"] {
            assert_eq!(k.parse::<CompositionKind>().unwrap().to_string(), k);
        }
        assert!("ruth".parse::<CompositionKind>().is_err());
    }
}
