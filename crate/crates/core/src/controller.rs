//! Backstepping control laws: tracking errors, virtual controls and the
//! tanh-shaped continuous control signal.

use serde::{Deserialize, Serialize};

use crate::constraint::{to_constrained_coords, transform_gain, ConstraintBounds};
use crate::error::{Error, Result};
use crate::rbf::norm_sq;

/// Smallest transformed gain accepted by [`virtual_control_n`].
pub const MIN_GAIN: f64 = 1e-12;

/// Upper constant in `0 <= |a| - a tanh(a/b) <= 0.2785 b` (b > 0).
pub const TANH_GAP_BOUND: f64 = 0.2785;

/// Design gains for one backstepping step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepGains {
    pub xi: f64,
    pub a: f64,
    pub lambda: f64,
    pub e: f64,
    pub m_gain: f64,
}

/// Shape parameters of the continuous control signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlShape {
    pub upsilon: f64,
    pub big_i: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackingErrors {
    pub z: Vec<f64>,
}

/// Auxiliary first-order signal dominating the unmodeled dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicSignal {
    pub aleph: f64,
    pub wp_bar: f64,
    pub d_bar: f64,
    /// Exponent `k` of the comparison function `s -> s^k`.
    pub growth_exponent: f64,
}

/// Reference in transformed coordinates and its time derivative.
pub fn reference_transform(w_r: f64, w_r_dot: f64, b1: &ConstraintBounds) -> Result<(f64, f64)> {
    let y_r = to_constrained_coords(w_r, b1)?;
    let y_r_dot = transform_gain(w_r, b1)? * w_r_dot;
    Ok((y_r, y_r_dot))
}

pub fn dynamic_signal_rate(s: &DynamicSignal, w1: f64) -> f64 {
    -s.wp_bar * s.aleph + w1.abs().powf(s.growth_exponent) + s.d_bar
}

fn damping_terms(z: f64, phi_hat: f64, p: &[f64], omega: f64, d_hat: f64, g: &StepGains) -> f64 {
    -g.xi * z - z / (2.0 * g.a * g.a) * phi_hat * norm_sq(p) - omega * d_hat
}

/// First virtual control, fed forward by the reference derivative.
pub fn virtual_control_1(
    z1: f64,
    phi_hat: f64,
    p1: &[f64],
    omega1: f64,
    d_hat1: f64,
    y_r_dot: f64,
    g: &StepGains,
) -> f64 {
    damping_terms(z1, phi_hat, p1, omega1, d_hat1, g) + y_r_dot
}

/// Intermediate virtual control, fed forward by the differentiator output.
pub fn virtual_control_mid(
    z_i: f64,
    phi_hat: f64,
    p_i: &[f64],
    omega_i: f64,
    d_hat_i: f64,
    sigma_i: f64,
    g: &StepGains,
) -> f64 {
    damping_terms(z_i, phi_hat, p_i, omega_i, d_hat_i, g) + sigma_i
}

/// Last virtual control, scaled back to physical input units by `1/omega_n`.
pub fn virtual_control_n(
    z_n: f64,
    phi_hat: f64,
    p_n: &[f64],
    omega_n: f64,
    d_hat_n: f64,
    sigma_n: f64,
    g: &StepGains,
) -> Result<f64> {
    if omega_n.is_nan() || omega_n < MIN_GAIN {
        return Err(Error::DegenerateGain(omega_n));
    }
    Ok(virtual_control_mid(z_n, phi_hat, p_n, omega_n, d_hat_n, sigma_n, g) / omega_n)
}

/// `v = -(1 + upsilon)(alpha_n tanh(z_n alpha_n / H) + I tanh(z_n I / H))`.
pub fn continuous_control(z_n: f64, alpha_n: f64, cs: &ControlShape) -> f64 {
    -(1.0 + cs.upsilon)
        * (alpha_n * (z_n * alpha_n / cs.h).tanh() + cs.big_i * (z_n * cs.big_i / cs.h).tanh())
}

/// `|a| - a tanh(a / b)`.
pub fn tanh_gap(a: f64, b: f64) -> f64 {
    a.abs() - a * (a / b).tanh()
}

/// Sufficient-condition check on the step gains. The returned messages are
/// warnings; runs proceed regardless.
pub fn gain_lint(gains: &[StepGains]) -> Vec<String> {
    gains
        .iter()
        .enumerate()
        .filter(|(_, g)| g.xi < 2.5)
        .map(|(i, g)| format!("gains.xi[{i}] = {} is below the 5/2 stability margin", g.xi))
        .collect()
}
