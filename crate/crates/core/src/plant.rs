//! Plant models in strict-feedback form with disturbances and an unmodeled
//! dynamic `zeta`.

use std::sync::Arc;

use crate::constraint::ConstraintBounds;
use crate::error::{Error, Result};

pub const PAPER_SEC4: &str = "paper_sec4";
pub const TOY_LINEAR_SCALAR: &str = "toy_linear_scalar";

/// Registered plant names accepted by [`plant_by_name`].
pub const REGISTERED_PLANTS: [&str; 2] = [PAPER_SEC4, TOY_LINEAR_SCALAR];

/// A strict-feedback plant
///
/// ```text
/// dzeta/dt = p(zeta, w, t)
/// dw_i/dt  = f_i(w_1..w_i, w_{i+1}) + d_i(zeta, w, t),  i < n
/// dw_n/dt  = f_n(w_1..w_n, u)       + d_n(zeta, w, t)
/// ```
///
/// Implementations hold no mutable state so one instance can back any number of
/// simulations.
pub trait PlantModel: Send + Sync {
    fn name(&self) -> &str;

    fn order(&self) -> usize;

    fn bounds(&self) -> &[ConstraintBounds];

    /// Writes the drift terms `f_i` into `out` (length `order()`).
    fn drift(&self, w: &[f64], u: f64, t: f64, out: &mut [f64]);

    /// Writes the additive disturbances `d_i` into `out` (length `order()`).
    fn disturbance(&self, zeta: f64, w: &[f64], t: f64, out: &mut [f64]);

    fn unmodeled_rate(&self, zeta: f64, w: &[f64], t: f64) -> f64;

    /// Physical reference `(w_r, dw_r/dt)` for the output `y = w_1`.
    fn reference(&self, t: f64) -> (f64, f64);
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub w: Vec<f64>,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantRates {
    pub dw: Vec<f64>,
    pub dzeta: f64,
}

/// Open-loop rates under input `u`. Fails when a state is outside its interval.
pub fn plant_rates(m: &dyn PlantModel, s: &PlantState, u: f64, t: f64) -> Result<PlantRates> {
    let n = m.order();
    if s.w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s.w.len() });
    }
    for (w, b) in s.w.iter().zip(m.bounds()) {
        if !b.contains(*w) {
            return Err(Error::OutOfBounds { value: *w, lower: b.delta_lower(), upper: b.delta_upper() });
        }
    }
    let mut dw = vec![0.0; n];
    let mut d = vec![0.0; n];
    m.drift(&s.w, u, t, &mut dw);
    m.disturbance(s.zeta, &s.w, t, &mut d);
    for (a, b) in dw.iter_mut().zip(&d) {
        *a += b;
    }
    Ok(PlantRates { dw, dzeta: m.unmodeled_rate(s.zeta, &s.w, t) })
}

pub fn plant_by_name(name: &str) -> Result<Arc<dyn PlantModel>> {
    match name {
        PAPER_SEC4 => Ok(Arc::new(PaperSec4::new())),
        TOY_LINEAR_SCALAR => Ok(Arc::new(ToyLinear::new([0.0, 0.0]))),
        other => Err(Error::UnknownPlant(other.to_string())),
    }
}

/// Tracking reference `(3 sin 4t + cos t) / 10` and its derivative.
pub fn example_reference(t: f64) -> (f64, f64) {
    let w_r = (3.0 * (4.0 * t).sin() + t.cos()) / 10.0;
    let w_r_dot = (12.0 * (4.0 * t).cos() - t.sin()) / 10.0;
    (w_r, w_r_dot)
}

/// Two-state benchmark plant
///
/// ```text
/// dzeta/dt = -zeta + w1^2 cos t + 1/5
/// dw1/dt   = w1 + w2/2 + w2^3/3 + d1
/// dw2/dt   = w1 w2 + sin(sin(w1) w2 / 2) u / 5 + (u^3 + 1/10) / 7 + 2 d2
/// d1 = 13 zeta sin(w1) + 1
/// d2 = (3/5) cos(zeta t + w2 - 1) zeta - 1/10
/// ```
///
/// The input enters non-affinely. [`PlantModel::disturbance`] reports the
/// additive terms as they appear in the state equations, so the second entry is
/// `2 d2`.
#[derive(Debug, Clone)]
pub struct PaperSec4 {
    bounds: [ConstraintBounds; 2],
}

impl PaperSec4 {
    pub fn new() -> Self {
        Self {
            bounds: [
                ConstraintBounds::new(2.1, 2.1).expect("valid bounds"),
                ConstraintBounds::new(2.0, 2.4).expect("valid bounds"),
            ],
        }
    }

    pub fn with_bounds(bounds: [ConstraintBounds; 2]) -> Self {
        Self { bounds }
    }
}

impl Default for PaperSec4 {
    fn default() -> Self {
        Self::new()
    }
}

impl PlantModel for PaperSec4 {
    fn name(&self) -> &str {
        PAPER_SEC4
    }

    fn order(&self) -> usize {
        2
    }

    fn bounds(&self) -> &[ConstraintBounds] {
        &self.bounds
    }

    fn drift(&self, w: &[f64], u: f64, _t: f64, out: &mut [f64]) {
        let (x1, x2) = (w[0], w[1]);
        out[0] = x1 + x2 / 2.0 + x2.powi(3) / 3.0;
        out[1] = x1 * x2 + (0.5 * x1.sin() * x2).sin() * u / 5.0 + (u.powi(3) + 0.1) / 7.0;
    }

    fn disturbance(&self, zeta: f64, w: &[f64], t: f64, out: &mut [f64]) {
        let (x1, x2) = (w[0], w[1]);
        out[0] = 13.0 * (zeta * x1.sin()) + 1.0;
        out[1] = 2.0 * (0.6 * (zeta * t + x2 - 1.0).cos() * zeta - 0.1);
    }

    fn unmodeled_rate(&self, zeta: f64, w: &[f64], t: f64) -> f64 {
        -zeta + w[0] * w[0] * t.cos() + 0.2
    }

    fn reference(&self, t: f64) -> (f64, f64) {
        example_reference(t)
    }
}

/// Double integrator `dw1/dt = w2 + c1`, `dw2/dt = u + c2` with constant
/// disturbances, a decaying `zeta` and a zero reference.
#[derive(Debug, Clone)]
pub struct ToyLinear {
    bounds: [ConstraintBounds; 2],
    disturbance: [f64; 2],
}

impl ToyLinear {
    pub fn new(disturbance: [f64; 2]) -> Self {
        let b = ConstraintBounds::new(2.0, 2.0).expect("valid bounds");
        Self { bounds: [b, b], disturbance }
    }
}

impl PlantModel for ToyLinear {
    fn name(&self) -> &str {
        TOY_LINEAR_SCALAR
    }

    fn order(&self) -> usize {
        2
    }

    fn bounds(&self) -> &[ConstraintBounds] {
        &self.bounds
    }

    fn drift(&self, w: &[f64], u: f64, _t: f64, out: &mut [f64]) {
        out[0] = w[1];
        out[1] = u;
    }

    fn disturbance(&self, _zeta: f64, _w: &[f64], _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.disturbance);
    }

    fn unmodeled_rate(&self, zeta: f64, _w: &[f64], _t: f64) -> f64 {
        -zeta
    }

    fn reference(&self, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
}
