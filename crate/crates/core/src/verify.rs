//! Built-in numerical verification suites, runnable from the CLI.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{from_constrained_coords, to_constrained_coords, transform_gain, ConstraintBounds};
use crate::controller::{tanh_gap, TANH_GAP_BOUND};
use crate::differentiator::{differentiator_rates, DifferentiatorState};
use crate::error::Result;
use crate::integrator::{step, Integrator, Workspace};
use crate::observer::{disturbance_estimate, observer_update_rate, ObserverState};
use crate::trigger::{apply_event, measurement_error, should_trigger, HetcPolicy, TriggerDecision, TriggerState};

const SEED: u64 = 0x4845_5443;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "[{}] {:<16} {} ({:.2} s)\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.detail,
                s.elapsed_s
            ));
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        out.push_str(&format!("{} suites, {} failed\n", self.suites.len(), failed));
        out
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> SuiteResult {
    let t0 = Instant::now();
    let (passed, detail) = f();
    SuiteResult { name, passed, detail, elapsed_s: t0.elapsed().as_secs_f64() }
}

pub fn run_all() -> VerifyReport {
    VerifyReport {
        suites: vec![
            transform_suite_with(transform_gain),
            tanh_gap_suite(100_000),
            differentiator_suite(),
            observer_suite(),
            trigger_table_suite(),
        ],
    }
}

/// Result of the transform checks on randomly drawn bounds and interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformStats {
    /// Largest `|w' - w| / max(1, |w|)` after a forward and inverse transform.
    pub max_roundtrip: f64,
    /// Largest relative gap between the gain and a central difference.
    pub max_gain_rel: f64,
}

pub fn transform_stats(points: usize, gain: impl Fn(f64, &ConstraintBounds) -> Result<f64>) -> TransformStats {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut st = TransformStats { max_roundtrip: 0.0, max_gain_rel: 0.0 };
    for _ in 0..points {
        let b = ConstraintBounds::new(rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0)).expect("positive bounds");
        let width = b.width();
        let w = -b.delta_lower() + width * rng.gen_range(0.01..0.99);
        let p = to_constrained_coords(w, &b).expect("interior point");
        let back = from_constrained_coords(p, &b);
        st.max_roundtrip = st.max_roundtrip.max((back - w).abs() / w.abs().max(1.0));

        let h = 1e-6 * width;
        let fd = (to_constrained_coords(w + h, &b).expect("interior") - to_constrained_coords(w - h, &b).expect("interior"))
            / (2.0 * h);
        let g = gain(w, &b).unwrap_or(f64::NAN);
        let rel = ((g - fd) / fd).abs();
        st.max_gain_rel = if rel.is_nan() { f64::INFINITY } else { st.max_gain_rel.max(rel) };
    }
    st
}

/// Roundtrip and derivative consistency of the barrier transform, with an
/// injectable gain so a corrupted formula can be shown to fail.
pub fn transform_suite_with(gain: impl Fn(f64, &ConstraintBounds) -> Result<f64>) -> SuiteResult {
    timed("transform", || {
        let st = transform_stats(10_000, gain);
        (
            st.max_roundtrip < 1e-12 && st.max_gain_rel < 1e-5,
            format!("roundtrip {:.2e} (< 1e-12), gain vs finite difference {:.2e} (< 1e-5)", st.max_roundtrip, st.max_gain_rel),
        )
    })
}

/// Smallest and largest `(|a| - a tanh(a/b)) / b` over `samples` random pairs.
pub fn tanh_gap_extremes(samples: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples {
        let b = 10f64.powf(rng.gen_range(-3.0..2.0));
        let a = b * rng.gen_range(-8.0..8.0) * if rng.gen_bool(0.1) { 100.0 } else { 1.0 };
        let r = tanh_gap(a, b) / b;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

pub fn tanh_gap_suite(samples: usize) -> SuiteResult {
    timed("tanh-gap", || {
        let (lo, hi) = tanh_gap_extremes(samples);
        (
            lo >= 0.0 && hi <= TANH_GAP_BOUND,
            format!("{samples} samples, gap/b in [{lo:.3e}, {hi:.6}] (bound {TANH_GAP_BOUND})"),
        )
    })
}

/// Runs the differentiator on `sin t` and returns the largest `|sigma - cos t|`
/// for `t >= settle`.
pub fn differentiator_tracking_error(eps0: f64, eps1: f64, dt: f64, duration: f64, settle: f64) -> f64 {
    let mut y = [0.1, 0.1];
    let mut ws = Workspace::new(2);
    let mut worst = 0.0f64;
    let steps = (duration / dt).round() as usize;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let s = DifferentiatorState { delta0: y[0], delta1: y[1], eps0, eps1 };
        if t >= settle {
            worst = worst.max((differentiator_rates(&s, t.sin()).sigma - t.cos()).abs());
        }
        if k == steps {
            break;
        }
        let _ = step(Integrator::Rk4, t, dt, &mut y, &mut ws, |t, y: &[f64], dy: &mut [f64]| -> std::result::Result<(), ()> {
            let s = DifferentiatorState { delta0: y[0], delta1: y[1], eps0, eps1 };
            let r = differentiator_rates(&s, t.sin());
            dy[0] = r.d_delta0;
            dy[1] = r.d_delta1;
            Ok(())
        });
    }
    worst
}

pub fn differentiator_suite() -> SuiteResult {
    timed("differentiator", || {
        let e = differentiator_tracking_error(2.0, 2.9, 1e-3, 10.0, 1.0);
        (e < 0.05, format!("sin(t), eps = (2, 2.9), step 1e-3: max |sigma - cos t| after 1 s = {e:.4} (< 0.05)"))
    })
}

/// Scalar observer test plant `dvarpi/dt = D(t)` with unit gain and an exact
/// (zero) network term. Returns `(t, D - D_hat)` at every step.
pub fn observer_error_history(m: f64, dt: f64, duration: f64, d: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut y = [0.0, 0.0]; // varpi, mu_hat
    let mut ws = Workspace::new(2);
    let steps = (duration / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        out.push((t, d(t) - disturbance_estimate(&ObserverState { mu_hat: y[1], m_gain: m }, y[0])));
        if k == steps {
            break;
        }
        let _ = step(Integrator::Rk4, t, dt, &mut y, &mut ws, |t, y: &[f64], dy: &mut [f64]| -> std::result::Result<(), ()> {
            let obs = ObserverState { mu_hat: y[1], m_gain: m };
            let d_hat = disturbance_estimate(&obs, y[0]);
            dy[0] = d(t);
            dy[1] = observer_update_rate(&obs, 0.0, 0.0, 1.0, d_hat);
            Ok(())
        });
    }
    out
}

/// `(worst |D - D_hat| after 10/m s for D = 1, worst deviation from the
/// analytic error for D = sin t)`.
pub fn observer_metrics(m: f64) -> (f64, f64) {
    let settle = 10.0 / m;
    let constant = observer_error_history(m, 1e-3, 5.0, |_| 1.0)
        .into_iter()
        .filter(|(t, _)| *t >= settle)
        .fold(0.0f64, |a, (_, e)| a.max(e.abs()));
    // dD~/dt = cos t - m D~, D~(0) = 0
    let c = 1.0 + m * m;
    let analytic = |t: f64| (m * t.cos() + t.sin()) / c - m / c * (-m * t).exp();
    let varying = observer_error_history(m, 1e-3, 5.0, f64::sin)
        .into_iter()
        .fold(0.0f64, |a, (t, e)| a.max((e - analytic(t)).abs()));
    (constant, varying)
}

pub fn observer_suite() -> SuiteResult {
    timed("observer", || {
        let m = 5.0;
        let (constant, varying) = observer_metrics(m);
        (
            constant < 1e-3 && varying < 1e-3,
            format!("m = {m}: |D - D_hat| after 10/m s = {constant:.2e}, deviation from error ODE = {varying:.2e} (both < 1e-3)"),
        )
    })
}

/// One row of the trigger truth table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerCase {
    pub k: f64,
    pub u: f64,
    pub expected: TriggerDecision,
}

/// Boundary cases around both thresholds and the switching boundary, for both
/// signs of `k` and `u`.
pub fn trigger_cases(p: &HetcPolicy) -> Vec<TriggerCase> {
    let t = p.switch_t;
    let mut cases = Vec::new();
    // held inputs strictly below T use the fixed threshold
    for u in [0.0, 0.5 * t, t.next_down()] {
        for su in [1.0, -1.0] {
            for sk in [1.0, -1.0] {
                let thr = p.psi;
                cases.push(TriggerCase { k: sk * thr.next_down(), u: su * u, expected: TriggerDecision::None });
                cases.push(TriggerCase { k: sk * thr, u: su * u, expected: TriggerDecision::Fixed });
                cases.push(TriggerCase { k: sk * thr.next_up(), u: su * u, expected: TriggerDecision::Fixed });
                cases.push(TriggerCase { k: 0.0, u: su * u, expected: TriggerDecision::None });
            }
        }
    }
    // held inputs at or above T use the relative threshold
    for u in [t, t.next_up(), 3.0 * t] {
        for su in [1.0, -1.0] {
            for sk in [1.0, -1.0] {
                let thr = p.upsilon * u + p.phi;
                cases.push(TriggerCase { k: sk * thr.next_down(), u: su * u, expected: TriggerDecision::None });
                cases.push(TriggerCase { k: sk * thr, u: su * u, expected: TriggerDecision::Relative });
                cases.push(TriggerCase { k: sk * thr.next_up(), u: su * u, expected: TriggerDecision::Relative });
                cases.push(TriggerCase { k: 0.0, u: su * u, expected: TriggerDecision::None });
                // an error that clears psi but not the relative threshold
                if p.psi < thr.next_down() {
                    cases.push(TriggerCase { k: sk * p.psi, u: su * u, expected: TriggerDecision::None });
                }
            }
        }
    }
    cases
}

pub fn trigger_table_suite() -> SuiteResult {
    timed("trigger-table", || {
        let p = HetcPolicy { upsilon: 0.3, phi: 1.0, psi: 1.0, switch_t: 1.0 };
        let mut bad = Vec::new();
        let cases = trigger_cases(&p);
        for c in &cases {
            let got = should_trigger(c.k, c.u, &p);
            if got != c.expected {
                bad.push(format!("k={} u={} got {:?}", c.k, c.u, got));
            }
        }
        let ts = apply_event(&TriggerState::default(), 1.7, 0.0, TriggerDecision::Relative).expect("first event");
        if measurement_error(1.7, ts.held_u) != 0.0 {
            bad.push("error not reset after event".into());
        }
        let detail = if bad.is_empty() {
            format!("{} cases", cases.len())
        } else {
            format!("{} of {} cases wrong: {}", bad.len(), cases.len(), bad.join("; "))
        };
        (bad.is_empty(), detail)
    })
}
