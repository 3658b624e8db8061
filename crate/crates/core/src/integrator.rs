//! Fixed-step explicit integrators.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

/// Scratch buffers for one integrator step.
#[derive(Debug, Clone)]
pub struct Workspace {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        Self { k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }
}

/// Advances `y` by one step of size `dt` from `t`. `k1` must already hold the
/// derivative at `(t, y)`; `f` is called for the remaining stages only.
pub fn step_with_k1<F, E>(
    method: Integrator,
    t: f64,
    dt: f64,
    y: &mut [f64],
    k1: &[f64],
    ws: &mut Workspace,
    mut f: F,
) -> Result<(), E>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
{
    match method {
        Integrator::Euler => {
            for (yi, ki) in y.iter_mut().zip(k1) {
                *yi += dt * ki;
            }
        }
        Integrator::Rk4 => {
            let half = 0.5 * dt;
            let Workspace { k2, k3, k4, tmp } = ws;
            for ((t_, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k1) {
                *t_ = yi + half * ki;
            }
            f(t + half, tmp, k2)?;
            for ((t_, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
                *t_ = yi + half * ki;
            }
            f(t + half, tmp, k3)?;
            for ((t_, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
                *t_ = yi + dt * ki;
            }
            f(t + dt, tmp, k4)?;
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    Ok(())
}

/// Convenience wrapper evaluating `k1` itself.
pub fn step<F, E>(method: Integrator, t: f64, dt: f64, y: &mut [f64], ws: &mut Workspace, mut f: F) -> Result<(), E>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
{
    let mut k1 = vec![0.0; y.len()];
    f(t, y, &mut k1)?;
    step_with_k1(method, t, dt, y, &k1, ws, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), ()> {
        dy[0] = -y[0];
        Ok(())
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |dt: f64| {
            let mut y = [1.0];
            let mut ws = Workspace::new(1);
            let n = (1.0 / dt).round() as usize;
            for k in 0..n {
                step(Integrator::Rk4, k as f64 * dt, dt, &mut y, &mut ws, decay).unwrap();
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn euler_is_first_order() {
        let mut y = [1.0];
        let mut ws = Workspace::new(1);
        step(Integrator::Euler, 0.0, 0.1, &mut y, &mut ws, decay).unwrap();
        assert!((y[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn errors_propagate() {
        let mut y = [1.0];
        let mut ws = Workspace::new(1);
        let r = step(Integrator::Rk4, 0.0, 0.1, &mut y, &mut ws, |t, _y: &[f64], _d: &mut [f64]| {
            if t > 0.0 { Err("boom") } else { Ok(()) }
        });
        assert_eq!(r, Err("boom"));
        assert_eq!(y[0], 1.0);
    }
}
