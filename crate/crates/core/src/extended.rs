//! The doubled phase space `T*R^{2d}` with points `(q, x, p, y)`.
//!
//! The extended Hamiltonian `H(q, y) + H(x, p)` splits into two exactly
//! solvable pieces, [`flow_a`] and [`flow_b`]. The binding term
//! `omega/2 (|x - q|^2 + |y - p|^2)` adds a third exact flow, [`flow_c`].
//! The linear map `A(q, x, p, y) = (q - x, p - y)` and its transpose are
//! implemented as index arithmetic ([`defect`], [`shift`]).
//!
//! Every update of a coordinate is a compensated (Kahan) sum. The rounding
//! remainders travel with the point, so the defect `q - x` stays accurate
//! to well below one ulp of the coordinates themselves.

use smallvec::SmallVec;

use crate::error::Result;
use crate::models::{HamiltonianModel, PhasePoint};

type Scratch = SmallVec<[f64; 32]>;

/// A point `(q, x, p, y)` of the extended phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPoint {
    pub q: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
    /// Compensation terms in `(q, x, p, y)` order.
    comp: Vec<f64>,
}

#[inline]
fn kahan_add(hi: &mut f64, lo: &mut f64, inc: f64) {
    let a = inc + *lo;
    let b = *hi;
    *hi = b + a;
    *lo = (b - *hi) + a;
}

impl ExtendedPoint {
    /// # Panics
    /// If the four parts differ in length.
    pub fn new(q: Vec<f64>, x: Vec<f64>, p: Vec<f64>, y: Vec<f64>) -> Self {
        let d = q.len();
        assert!(x.len() == d && p.len() == d && y.len() == d, "extended point parts must share one length");
        Self { q, x, p, y, comp: vec![0.0; 4 * d] }
    }

    /// Split borrows of the coordinates and their compensation terms.
    #[allow(clippy::type_complexity)]
    fn parts_mut(&mut self) -> ([&mut [f64]; 4], [&mut [f64]; 4]) {
        let d = self.q.len();
        let (cq, rest) = self.comp.split_at_mut(d);
        let (cx, rest) = rest.split_at_mut(d);
        let (cp, cy) = rest.split_at_mut(d);
        ([&mut self.q, &mut self.x, &mut self.p, &mut self.y], [cq, cx, cp, cy])
    }

    /// Coordinate `part` (0..4 for q, x, p, y) at index `i`, compensation included.
    fn value(&self, part: usize, i: usize) -> f64 {
        let hi = [&self.q, &self.x, &self.p, &self.y][part][i];
        hi + self.comp[part * self.q.len() + i]
    }

    /// `(q_i - x_i, p_i - y_i)` without cancellation loss.
    fn difference(&self, i: usize) -> (f64, f64) {
        let d = self.q.len();
        let c = &self.comp;
        ((self.q[i] - self.x[i]) + (c[i] - c[d + i]), (self.p[i] - self.y[i]) + (c[2 * d + i] - c[3 * d + i]))
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Flattened `(q, x, p, y)`: positions `(q, x)` first, then momenta `(p, y)`.
    pub fn to_flat(&self) -> Vec<f64> {
        let d = self.dim();
        (0..4).flat_map(|part| (0..d).map(move |i| self.value(part, i))).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let d = flat.len() / 4;
        Self::new(flat[..d].to_vec(), flat[d..2 * d].to_vec(), flat[2 * d..3 * d].to_vec(), flat[3 * d..].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        [&self.q, &self.x, &self.p, &self.y].iter().all(|v| v.iter().all(|e| e.is_finite()))
    }

    /// Euclidean norm of the copy discrepancy `(q, p) - (x, y)`.
    pub fn defect_norm(&self) -> f64 {
        defect(self).norm()
    }

    /// The `(q, p)` copy, without averaging.
    pub fn restrict(&self) -> PhasePoint {
        let d = self.dim();
        PhasePoint { q: (0..d).map(|i| self.value(0, i)).collect(), p: (0..d).map(|i| self.value(2, i)).collect() }
    }

    fn max_abs(&self) -> f64 {
        [&self.q, &self.x, &self.p, &self.y]
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, e| m.max(e.abs()))
    }
}

/// An element `mu` of `R^{2d}`, stored flat: the first `d` entries pair with
/// positions and the last `d` with momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectVector(pub Vec<f64>);

impl DefectVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; 2 * dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn first(&self) -> &[f64] {
        &self.0[..self.dim()]
    }

    pub fn second(&self) -> &[f64] {
        &self.0[self.dim()..]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|e| e * e).sum::<f64>().sqrt()
}

/// `(q, p) -> (q, q, p, p)`, the inclusion of the original phase space.
pub fn embed(z: &PhasePoint) -> ExtendedPoint {
    ExtendedPoint::new(z.q.clone(), z.q.clone(), z.p.clone(), z.p.clone())
}

/// `A zeta = (q - x, p - y)`.
pub fn defect(zeta: &ExtendedPoint) -> DefectVector {
    let d = zeta.dim();
    let mut out = vec![0.0; 2 * d];
    for i in 0..d {
        (out[i], out[d + i]) = zeta.difference(i);
    }
    DefectVector(out)
}

/// `zeta + A^T mu = (q + mu1, x - mu1, p + mu2, y - mu2)`.
pub fn shift(zeta: &ExtendedPoint, mu: &DefectVector) -> ExtendedPoint {
    let mut out = zeta.clone();
    shift_in_place(&mut out, mu);
    out
}

pub fn shift_in_place(zeta: &mut ExtendedPoint, mu: &DefectVector) {
    let d = zeta.dim();
    let (m1, m2) = mu.0.split_at(d);
    let ([q, x, p, y], [cq, cx, cp, cy]) = zeta.parts_mut();
    for i in 0..d {
        kahan_add(&mut q[i], &mut cq[i], m1[i]);
        kahan_add(&mut x[i], &mut cx[i], -m1[i]);
        kahan_add(&mut p[i], &mut cp[i], m2[i]);
        kahan_add(&mut y[i], &mut cy[i], -m2[i]);
    }
}

/// `((q + x)/2, (p + y)/2)`; invariant under [`shift`].
pub fn average_restrict(zeta: &ExtendedPoint) -> PhasePoint {
    let d = zeta.dim();
    let mean = |a: usize, b: usize, i: usize| 0.5 * (zeta.value(a, i) + zeta.value(b, i));
    PhasePoint { q: (0..d).map(|i| mean(0, 1, i)).collect(), p: (0..d).map(|i| mean(2, 3, i)).collect() }
}

fn scratch(d: usize) -> (Scratch, Scratch) {
    (SmallVec::from_elem(0.0, d), SmallVec::from_elem(0.0, d))
}

/// Exact flow of `H(q, y)`: `x += t D2H(q, y)`, `p -= t D1H(q, y)`.
pub fn flow_a_in_place(model: &dyn HamiltonianModel, t: f64, zeta: &mut ExtendedPoint) -> Result<()> {
    let (mut gq, mut gp) = scratch(zeta.dim());
    model.gradient(&zeta.q, &zeta.y, &mut gq, &mut gp)?;
    let ([_, x, p, _], [_, cx, cp, _]) = zeta.parts_mut();
    for i in 0..gq.len() {
        kahan_add(&mut x[i], &mut cx[i], t * gp[i]);
        kahan_add(&mut p[i], &mut cp[i], -t * gq[i]);
    }
    Ok(())
}

/// Exact flow of `H(x, p)`: `q += t D2H(x, p)`, `y -= t D1H(x, p)`.
pub fn flow_b_in_place(model: &dyn HamiltonianModel, t: f64, zeta: &mut ExtendedPoint) -> Result<()> {
    let (mut gq, mut gp) = scratch(zeta.dim());
    model.gradient(&zeta.x, &zeta.p, &mut gq, &mut gp)?;
    let ([q, _, _, y], [cq, _, _, cy]) = zeta.parts_mut();
    for i in 0..gq.len() {
        kahan_add(&mut q[i], &mut cq[i], t * gp[i]);
        kahan_add(&mut y[i], &mut cy[i], -t * gq[i]);
    }
    Ok(())
}

/// Exact flow of the binding Hamiltonian `omega/2 (|x - q|^2 + |y - p|^2)`.
///
/// The sums `q + x`, `p + y` are constant; the differences `u = q - x`,
/// `v = p - y` rotate by `theta = 2 omega t`.
pub fn flow_c_in_place(omega: f64, t: f64, zeta: &mut ExtendedPoint) {
    let theta = 2.0 * omega * t;
    let s = theta.sin();
    // cos(theta) - 1, without cancellation for small angles.
    let cm1 = -2.0 * (0.5 * theta).sin().powi(2);
    for i in 0..zeta.dim() {
        let (u, v) = zeta.difference(i);
        let du = 0.5 * (cm1 * u + s * v);
        let dv = 0.5 * (cm1 * v - s * u);
        let ([q, x, p, y], [cq, cx, cp, cy]) = zeta.parts_mut();
        kahan_add(&mut q[i], &mut cq[i], du);
        kahan_add(&mut x[i], &mut cx[i], -du);
        kahan_add(&mut p[i], &mut cp[i], dv);
        kahan_add(&mut y[i], &mut cy[i], -dv);
    }
}

pub fn flow_a(model: &dyn HamiltonianModel, t: f64, zeta: &ExtendedPoint) -> Result<ExtendedPoint> {
    let mut out = zeta.clone();
    flow_a_in_place(model, t, &mut out)?;
    Ok(out)
}

pub fn flow_b(model: &dyn HamiltonianModel, t: f64, zeta: &ExtendedPoint) -> Result<ExtendedPoint> {
    let mut out = zeta.clone();
    flow_b_in_place(model, t, &mut out)?;
    Ok(out)
}

pub fn flow_c(omega: f64, t: f64, zeta: &ExtendedPoint) -> ExtendedPoint {
    let mut out = zeta.clone();
    flow_c_in_place(omega, t, &mut out);
    out
}

/// A one-step map on the extended phase space, parameterized by the step size.
pub trait ExtendedStep: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, dt: f64, zeta: &mut ExtendedPoint) -> Result<()>;

    /// Number of exact sub-flows evaluated per call.
    fn stages(&self) -> usize;

    fn step(&self, dt: f64, zeta: &ExtendedPoint) -> Result<ExtendedPoint> {
        let mut out = zeta.clone();
        self.apply(dt, &mut out)?;
        Ok(out)
    }
}

impl<S: ExtendedStep + ?Sized> ExtendedStep for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, dt: f64, zeta: &mut ExtendedPoint) -> Result<()> {
        (**self).apply(dt, zeta)
    }
    fn stages(&self) -> usize {
        (**self).stages()
    }
}

/// Strang splitting `A(dt/2) B(dt) A(dt/2)` of the extended system.
#[derive(Clone, Copy)]
pub struct StrangStep<'a> {
    pub model: &'a dyn HamiltonianModel,
}

impl<'a> StrangStep<'a> {
    pub fn new(model: &'a dyn HamiltonianModel) -> Self {
        Self { model }
    }
}

impl ExtendedStep for StrangStep<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn apply(&self, dt: f64, zeta: &mut ExtendedPoint) -> Result<()> {
        flow_a_in_place(self.model, 0.5 * dt, zeta)?;
        flow_b_in_place(self.model, dt, zeta)?;
        flow_a_in_place(self.model, 0.5 * dt, zeta)
    }

    fn stages(&self) -> usize {
        3
    }
}

/// Five-map step `A(dt/2) B(dt/2) C(dt) B(dt/2) A(dt/2)` with binding strength `omega`.
#[derive(Clone, Copy)]
pub struct TaoStep<'a> {
    pub model: &'a dyn HamiltonianModel,
    pub omega: f64,
}

impl<'a> TaoStep<'a> {
    pub fn new(model: &'a dyn HamiltonianModel, omega: f64) -> Self {
        Self { model, omega }
    }
}

impl ExtendedStep for TaoStep<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn apply(&self, dt: f64, zeta: &mut ExtendedPoint) -> Result<()> {
        let half = 0.5 * dt;
        flow_a_in_place(self.model, half, zeta)?;
        flow_b_in_place(self.model, half, zeta)?;
        flow_c_in_place(self.omega, dt, zeta);
        flow_b_in_place(self.model, half, zeta)?;
        flow_a_in_place(self.model, half, zeta)
    }

    fn stages(&self) -> usize {
        5
    }
}

pub fn strang_step(model: &dyn HamiltonianModel, dt: f64, zeta: &ExtendedPoint) -> Result<ExtendedPoint> {
    StrangStep::new(model).step(dt, zeta)
}

pub fn tao_step(model: &dyn HamiltonianModel, omega: f64, dt: f64, zeta: &ExtendedPoint) -> Result<ExtendedPoint> {
    TaoStep::new(model, omega).step(dt, zeta)
}

/// Rounding scale for postcondition checks on a point.
pub(crate) fn rounding_scale(zeta: &ExtendedPoint) -> f64 {
    64.0 * f64::EPSILON * (1.0 + zeta.max_abs()) * ((4 * zeta.dim()) as f64).sqrt()
}
