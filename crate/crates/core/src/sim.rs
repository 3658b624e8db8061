//! Closed-loop simulation: plant, adaptive backstepping controller, disturbance
//! observers, differentiators and the hybrid event trigger, integrated with a
//! fixed step.
//!
//! The integrated state is laid out as
//!
//! ```text
//! [ w_1..w_n | zeta | mu_hat_1..mu_hat_n | W_1 | .. | W_n | phi_hat |
//!   (delta0, delta1) for steps 2..n | aleph ]
//! ```
//!
//! The held actuator input `u` is an exogenous zero-order-hold signal: it is
//! refreshed only at step boundaries where the trigger fires, and every stage of
//! the step sees the same value.

use serde::{Deserialize, Serialize};

use crate::constraint::{to_constrained_coords, transform_gain, ConstraintBounds};
use crate::controller::{
    continuous_control, dynamic_signal_rate, reference_transform, virtual_control_1,
    virtual_control_mid, virtual_control_n, ControlShape, DynamicSignal, StepGains,
};
use crate::differentiator::{differentiator_rates, DifferentiatorRates, DifferentiatorState};
use crate::error::{Error, Result};
use crate::integrator::{step_with_k1, Integrator, Workspace};
use crate::observer::{disturbance_estimate, observer_update_rate, ObserverState};
use crate::plant::{plant_rates, PlantModel, PlantState};
use crate::rbf::{approximate, norm_sq, phi_rate_from_norm, weight_update_rate_into, AdaptiveScalar, RbfBasis};
use crate::trigger::{active_branch, apply_event, measurement_error, should_trigger, HetcPolicy, TriggerDecision, TriggerState};

/// Largest network the engine will build for a single step.
pub const MAX_NODES_PER_NETWORK: usize = 200_000;

/// Grid placement of the Gaussian centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbfLayout {
    pub nodes_per_dim: usize,
    pub varpi_range: (f64, f64),
    pub z_range: (f64, f64),
    pub aleph_range: (f64, f64),
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentiatorGains {
    pub eps0: f64,
    pub eps1: f64,
}

/// Everything the controller needs besides the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// One entry per backstepping step.
    pub gains: Vec<StepGains>,
    pub shape: ControlShape,
    pub tau: f64,
    pub a0: f64,
    /// One entry per differentiator, i.e. for steps `2..=n`.
    pub differentiators: Vec<DifferentiatorGains>,
    pub rbf: RbfLayout,
    /// `aleph` holds the initial value.
    pub dynamic: DynamicSignal,
    pub initial_phi_hat: f64,
    pub initial_mu_hat: Vec<f64>,
    pub initial_delta: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub step_s: f64,
    pub duration_s: f64,
    pub integrator: Integrator,
    /// Start of the window used for post-transient tracking statistics.
    pub transient_s: f64,
}

impl SimConfig {
    pub fn step_count(&self) -> usize {
        (self.duration_s / self.step_s).round() as usize
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { step_s: 1e-3, duration_s: 20.0, integrator: Integrator::Rk4, transient_s: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    n: usize,
    zeta: usize,
    mu: usize,
    weights: Vec<(usize, usize)>,
    phi: usize,
    delta: usize,
    aleph: usize,
    len: usize,
}

impl Layout {
    fn new(n: usize, nodes: &[usize]) -> Self {
        let zeta = n;
        let mu = n + 1;
        let mut off = mu + n;
        let weights = nodes
            .iter()
            .map(|&k| {
                let r = (off, off + k);
                off += k;
                r
            })
            .collect();
        let phi = off;
        let delta = phi + 1;
        let aleph = delta + 2 * (n - 1);
        Self { n, zeta, mu, weights, phi, delta, aleph, len: aleph + 1 }
    }

    fn delta_pair(&self, step: usize) -> usize {
        // step is the zero-based backstepping index, >= 1
        self.delta + 2 * (step - 1)
    }
}

/// Algebraic controller quantities at one instant, in dependency order.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerStep {
    pub y_r: f64,
    pub y_r_dot: f64,
    pub varpi: Vec<f64>,
    pub omega: Vec<f64>,
    pub d_hat: Vec<f64>,
    pub z: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Differentiator outputs for steps `2..=n`.
    pub sigma: Vec<f64>,
    /// `|P_i(C_i)|^2` per step.
    pub c_norm_sq: Vec<f64>,
    /// Basis activations on the transformed states, per step.
    pub drift_p: Vec<Vec<f64>>,
    pub v: f64,
    diff_rates: Vec<DifferentiatorRates>,
    c_buf: Vec<Vec<f64>>,
    input_buf: Vec<f64>,
}

/// Adaptive hybrid event-triggered backstepping controller for an `n`-th order
/// strict-feedback plant.
#[derive(Debug, Clone)]
pub struct Controller {
    cfg: ControllerConfig,
    bounds: Vec<ConstraintBounds>,
    drift_bases: Vec<RbfBasis>,
    c_bases: Vec<RbfBasis>,
    layout: Layout,
}

impl Controller {
    pub fn new(cfg: ControllerConfig, bounds: Vec<ConstraintBounds>) -> Result<Self> {
        let n = bounds.len();
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        if cfg.gains.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: cfg.gains.len() });
        }
        if cfg.differentiators.len() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, got: cfg.differentiators.len() });
        }
        if cfg.initial_mu_hat.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: cfg.initial_mu_hat.len() });
        }
        let l = cfg.rbf;
        let mut drift_bases = Vec::with_capacity(n);
        let mut c_bases = Vec::with_capacity(n);
        for i in 0..n {
            let dims = drift_dims(i, n);
            let nodes = l.nodes_per_dim.checked_pow(dims as u32 + 2).unwrap_or(usize::MAX);
            if nodes > MAX_NODES_PER_NETWORK {
                return Err(Error::InvalidParameter {
                    name: "rbf.nodes_per_dim",
                    reason: "network for C_i would exceed the node limit",
                });
            }
            let mut ranges = vec![l.varpi_range; dims];
            drift_bases.push(RbfBasis::grid(&ranges, l.nodes_per_dim, l.width)?);
            ranges.push(l.z_range);
            ranges.push(l.aleph_range);
            c_bases.push(RbfBasis::grid(&ranges, l.nodes_per_dim, l.width)?);
        }
        let nodes: Vec<usize> = drift_bases.iter().map(RbfBasis::node_count).collect();
        let layout = Layout::new(n, &nodes);
        Ok(Self { cfg, bounds, drift_bases, c_bases, layout })
    }

    pub fn order(&self) -> usize {
        self.layout.n
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn state_len(&self) -> usize {
        self.layout.len
    }

    pub fn drift_basis(&self, step: usize) -> &RbfBasis {
        &self.drift_bases[step]
    }

    pub fn c_basis(&self, step: usize) -> &RbfBasis {
        &self.c_bases[step]
    }

    pub fn new_step(&self) -> ControllerStep {
        let n = self.layout.n;
        ControllerStep {
            y_r: 0.0,
            y_r_dot: 0.0,
            varpi: vec![0.0; n],
            omega: vec![0.0; n],
            d_hat: vec![0.0; n],
            z: vec![0.0; n],
            alpha: vec![0.0; n],
            sigma: vec![0.0; n - 1],
            c_norm_sq: vec![0.0; n],
            drift_p: self.drift_bases.iter().map(|b| vec![0.0; b.node_count()]).collect(),
            v: 0.0,
            diff_rates: vec![DifferentiatorRates { d_delta0: 0.0, d_delta1: 0.0, sigma: 0.0 }; n - 1],
            c_buf: self.c_bases.iter().map(|b| vec![0.0; b.node_count()]).collect(),
            input_buf: Vec::with_capacity(n + 2),
        }
    }

    /// Combined initial state for the given plant state.
    pub fn initial_state(&self, plant: &PlantState) -> Vec<f64> {
        let l = &self.layout;
        let mut x = vec![0.0; l.len];
        x[..l.n].copy_from_slice(&plant.w);
        x[l.zeta] = plant.zeta;
        x[l.mu..l.mu + l.n].copy_from_slice(&self.cfg.initial_mu_hat);
        x[l.phi] = self.cfg.initial_phi_hat;
        for i in 1..l.n {
            let d = l.delta_pair(i);
            x[d] = self.cfg.initial_delta.0;
            x[d + 1] = self.cfg.initial_delta.1;
        }
        x[l.aleph] = self.cfg.dynamic.aleph;
        x
    }

    pub fn phi_hat(&self, x: &[f64]) -> f64 {
        x[self.layout.phi]
    }

    pub fn aleph(&self, x: &[f64]) -> f64 {
        x[self.layout.aleph]
    }

    pub fn mu_hat<'a>(&self, x: &'a [f64]) -> &'a [f64] {
        &x[self.layout.mu..self.layout.mu + self.layout.n]
    }

    pub fn weights<'a>(&self, x: &'a [f64], step: usize) -> &'a [f64] {
        let (a, b) = self.layout.weights[step];
        &x[a..b]
    }

    pub fn differentiator(&self, x: &[f64], step: usize) -> DifferentiatorState {
        let d = self.layout.delta_pair(step);
        let g = self.cfg.differentiators[step - 1];
        DifferentiatorState { delta0: x[d], delta1: x[d + 1], eps0: g.eps0, eps1: g.eps1 }
    }

    /// Computes transformed states, tracking errors, disturbance estimates,
    /// differentiator outputs, virtual controls and the continuous control `v`
    /// from the integrated state `x` at time `t`.
    pub fn evaluate(&self, t: f64, x: &[f64], reference: (f64, f64), out: &mut ControllerStep) -> Result<()> {
        let n = self.layout.n;
        let aleph = x[self.layout.aleph];
        let phi_hat = x[self.layout.phi];
        for i in 0..n {
            let w = x[i];
            let b = &self.bounds[i];
            out.varpi[i] = to_constrained_coords(w, b).map_err(|_| Error::ConstraintViolation { t, state: i })?;
            out.omega[i] = transform_gain(w, b).map_err(|_| Error::ConstraintViolation { t, state: i })?;
            let obs = ObserverState { mu_hat: x[self.layout.mu + i], m_gain: self.cfg.gains[i].m_gain };
            out.d_hat[i] = disturbance_estimate(&obs, out.varpi[i]);
        }
        let (y_r, y_r_dot) = reference_transform(reference.0, reference.1, &self.bounds[0])?;
        out.y_r = y_r;
        out.y_r_dot = y_r_dot;

        for i in 0..n {
            let dims = drift_dims(i, n);
            self.drift_bases[i].evaluate_into(&out.varpi[..dims], &mut out.drift_p[i])?;

            let feedforward = if i == 0 {
                out.z[0] = out.varpi[0] - y_r;
                y_r_dot
            } else {
                let prev = out.alpha[i - 1];
                let r = differentiator_rates(&self.differentiator(x, i), prev);
                out.diff_rates[i - 1] = r;
                out.sigma[i - 1] = r.sigma;
                out.z[i] = out.varpi[i] - prev;
                r.sigma
            };

            out.input_buf.clear();
            out.input_buf.extend_from_slice(&out.varpi[..dims]);
            out.input_buf.push(out.z[i]);
            out.input_buf.push(aleph);
            self.c_bases[i].evaluate_into(&out.input_buf, &mut out.c_buf[i])?;
            out.c_norm_sq[i] = norm_sq(&out.c_buf[i]);

            let g = &self.cfg.gains[i];
            let p = &out.c_buf[i];
            out.alpha[i] = if i == 0 {
                virtual_control_1(out.z[0], phi_hat, p, out.omega[0], out.d_hat[0], feedforward, g)
            } else if i + 1 < n {
                virtual_control_mid(out.z[i], phi_hat, p, out.omega[i], out.d_hat[i], feedforward, g)
            } else {
                virtual_control_n(out.z[i], phi_hat, p, out.omega[i], out.d_hat[i], feedforward, g)?
            };
        }
        out.v = continuous_control(out.z[n - 1], out.alpha[n - 1], &self.cfg.shape);
        if !out.v.is_finite() || out.alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::NumericalDivergence { t });
        }
        Ok(())
    }

    /// Writes the rates of the controller-side states (observers, weights,
    /// `phi_hat`, differentiators, `aleph`) into `dx`, given the held input `u`.
    /// Plant entries of `dx` are left untouched.
    pub fn rates(&self, s: &ControllerStep, x: &[f64], u: f64, dx: &mut [f64]) -> Result<()> {
        let l = &self.layout;
        let n = l.n;
        for i in 0..n {
            let g = &self.cfg.gains[i];
            let (a, b) = l.weights[i];
            let weights = &x[a..b];
            let p = &s.drift_p[i];
            let nn = approximate(weights, p)?;
            weight_update_rate_into(s.z[i], g.m_gain, p, g.lambda, g.e, weights, &mut dx[a..b])?;
            let coupling = if i + 1 < n { s.varpi[i + 1] } else { s.omega[i] * u };
            let obs = ObserverState { mu_hat: x[l.mu + i], m_gain: g.m_gain };
            dx[l.mu + i] = observer_update_rate(&obs, nn, coupling, s.omega[i], s.d_hat[i]);
        }
        let scalar = AdaptiveScalar { phi_hat: x[l.phi], tau: self.cfg.tau, a0: self.cfg.a0 };
        dx[l.phi] = phi_rate_from_norm(s.z[n - 1], s.c_norm_sq[n - 1], &scalar);
        for i in 1..n {
            let d = l.delta_pair(i);
            dx[d] = s.diff_rates[i - 1].d_delta0;
            dx[d + 1] = s.diff_rates[i - 1].d_delta1;
        }
        let mut sig = self.cfg.dynamic;
        sig.aleph = x[l.aleph];
        dx[l.aleph] = dynamic_signal_rate(&sig, x[0]);
        Ok(())
    }
}

/// Number of transformed states feeding step `i` (zero-based): `i + 2`, capped at `n`.
fn drift_dims(i: usize, n: usize) -> usize {
    (i + 2).min(n)
}

/// One row of the trace, sampled at a step boundary after the trigger decision.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub w: Vec<f64>,
    pub zeta: f64,
    pub varpi: Vec<f64>,
    pub z: Vec<f64>,
    pub alpha: Vec<f64>,
    pub v: f64,
    pub u: f64,
    pub trigger: TriggerDecision,
    pub d_hat: Vec<f64>,
    pub d_true: Vec<f64>,
    pub mu_hat: Vec<f64>,
    pub m_gain: Vec<f64>,
    pub phi_hat: f64,
    pub weight_norms: Vec<f64>,
    pub aleph: f64,
    pub w_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub completed: bool,
    pub failure: Option<String>,
    pub steps: usize,
    pub records: usize,
    pub events_total: u64,
    pub events_relative: u64,
    pub events_fixed: u64,
    pub min_dwell_s: Option<f64>,
    pub min_dwell_steps: Option<u64>,
    pub max_abs_z1: f64,
    pub transient_s: f64,
    /// Largest `|w_1 - w_r|` at or after the transient.
    pub max_tracking_error: f64,
    pub rms_tracking_error: f64,
    /// Minimum of `upper_i - w_i` over the run, per state.
    pub min_upper_margin: Vec<f64>,
    /// Minimum of `w_i + lower_i` over the run, per state.
    pub min_lower_margin: Vec<f64>,
    pub max_abs_u: f64,
    pub final_z1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub inter_event_intervals: Vec<f64>,
}

/// A run that stopped early. The partial trace is kept and flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub trace: Box<SimulationTrace>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run aborted after {} records: {}", self.trace.records.len(), self.error)
    }
}

impl std::error::Error for RunFailure {}

struct SummaryBuilder {
    bounds: Vec<ConstraintBounds>,
    transient_s: f64,
    max_abs_z1: f64,
    max_err: f64,
    sq_err: f64,
    err_count: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    max_abs_u: f64,
    last_event_step: Option<usize>,
    min_dwell_steps: Option<u64>,
    intervals: Vec<f64>,
}

impl SummaryBuilder {
    fn new(bounds: &[ConstraintBounds], transient_s: f64) -> Self {
        Self {
            bounds: bounds.to_vec(),
            transient_s,
            max_abs_z1: 0.0,
            max_err: 0.0,
            sq_err: 0.0,
            err_count: 0,
            upper: vec![f64::INFINITY; bounds.len()],
            lower: vec![f64::INFINITY; bounds.len()],
            max_abs_u: 0.0,
            last_event_step: None,
            min_dwell_steps: None,
            intervals: Vec::new(),
        }
    }

    fn observe(&mut self, k: usize, r: &StepRecord, dt: f64) {
        self.max_abs_z1 = self.max_abs_z1.max(r.z[0].abs());
        if r.t >= self.transient_s {
            let e = (r.w[0] - r.w_ref).abs();
            self.max_err = self.max_err.max(e);
            self.sq_err += e * e;
            self.err_count += 1;
        }
        for (i, (w, b)) in r.w.iter().zip(&self.bounds).enumerate() {
            self.upper[i] = self.upper[i].min(b.delta_upper() - w);
            self.lower[i] = self.lower[i].min(w + b.delta_lower());
        }
        self.max_abs_u = self.max_abs_u.max(r.u.abs());
        if r.trigger.is_event() {
            if let Some(prev) = self.last_event_step {
                let steps = (k - prev) as u64;
                self.min_dwell_steps = Some(self.min_dwell_steps.map_or(steps, |m| m.min(steps)));
                self.intervals.push(steps as f64 * dt);
            }
            self.last_event_step = Some(k);
        }
    }

    fn finish(self, records: Vec<StepRecord>, ts: &TriggerState, steps: usize, failure: Option<&Error>) -> SimulationTrace {
        let summary = RunSummary {
            completed: failure.is_none(),
            failure: failure.map(|e| e.to_string()),
            steps,
            records: records.len(),
            events_total: ts.total_events(),
            events_relative: ts.event_count_relative,
            events_fixed: ts.event_count_fixed,
            min_dwell_s: ts.min_dwell,
            min_dwell_steps: self.min_dwell_steps,
            max_abs_z1: self.max_abs_z1,
            transient_s: self.transient_s,
            max_tracking_error: self.max_err,
            rms_tracking_error: if self.err_count > 0 { (self.sq_err / self.err_count as f64).sqrt() } else { 0.0 },
            min_upper_margin: self.upper,
            min_lower_margin: self.lower,
            max_abs_u: self.max_abs_u,
            final_z1: records.last().map_or(0.0, |r| r.z[0]),
        };
        SimulationTrace { records, summary, inter_event_intervals: self.intervals }
    }
}

/// Runs the closed loop from `initial` for `sim.duration_s` seconds.
///
/// At each step boundary the controller is evaluated once, the trigger decides
/// whether `v` is latched into the hold, a record is written, and the combined
/// state is advanced with the held input. The result is a pure function of the
/// inputs.
pub fn run_simulation(
    plant: &dyn PlantModel,
    controller: &ControllerConfig,
    policy: &HetcPolicy,
    sim: &SimConfig,
    initial: &PlantState,
) -> std::result::Result<SimulationTrace, RunFailure> {
    let empty = |error: Error| RunFailure {
        error,
        trace: Box::new(SummaryBuilder::new(plant.bounds(), sim.transient_s).finish(Vec::new(), &TriggerState::default(), 0, None)),
    };
    if !(sim.step_s > 0.0 && sim.duration_s >= sim.step_s) {
        return Err(empty(Error::InvalidParameter { name: "sim.step", reason: "need step > 0 and duration >= step" }));
    }
    if controller.shape.upsilon != policy.upsilon {
        return Err(empty(Error::InvalidParameter {
            name: "trigger.upsilon",
            reason: "control shape and trigger policy must share upsilon",
        }));
    }
    if initial.w.len() != plant.order() {
        return Err(empty(Error::DimensionMismatch { expected: plant.order(), got: initial.w.len() }));
    }
    let ctrl = Controller::new(controller.clone(), plant.bounds().to_vec()).map_err(empty)?;

    let n = plant.order();
    let dt = sim.step_s;
    let steps = sim.step_count();
    let mut x = ctrl.initial_state(initial);
    let mut dx = vec![0.0; x.len()];
    let mut ws = Workspace::new(x.len());
    let mut snap = ctrl.new_step();
    let mut stage = ctrl.new_step();
    let mut d_true = vec![0.0; n];
    let mut ts = TriggerState::default();
    let mut records = Vec::with_capacity(steps + 1);
    let mut summary = SummaryBuilder::new(plant.bounds(), sim.transient_s);

    let plant_part = |t: f64, x: &[f64], u: f64, dx: &mut [f64]| -> Result<()> {
        let s = PlantState { w: x[..n].to_vec(), zeta: x[n] };
        let r = plant_rates(plant, &s, u, t).map_err(|e| match e {
            Error::OutOfBounds { value, .. } => {
                let state = x[..n].iter().position(|w| *w == value).unwrap_or(0);
                Error::ConstraintViolation { t, state }
            }
            other => other,
        })?;
        dx[..n].copy_from_slice(&r.dw);
        dx[n] = r.dzeta;
        Ok(())
    };

    for k in 0..=steps {
        let t = k as f64 * dt;
        let reference = plant.reference(t);
        let outcome = (|| -> Result<()> {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalDivergence { t });
            }
            ctrl.evaluate(t, &x, reference, &mut snap)?;
            let decision = if k == 0 {
                active_branch(snap.v, policy)
            } else {
                should_trigger(measurement_error(snap.v, ts.held_u), ts.held_u, policy)
            };
            if decision.is_event() {
                ts = apply_event(&ts, snap.v, t, decision)?;
            }
            plant.disturbance(x[n], &x[..n], t, &mut d_true);
            let rec = StepRecord {
                t,
                w: x[..n].to_vec(),
                zeta: x[n],
                varpi: snap.varpi.clone(),
                z: snap.z.clone(),
                alpha: snap.alpha.clone(),
                v: snap.v,
                u: ts.held_u,
                trigger: decision,
                d_hat: snap.d_hat.clone(),
                d_true: d_true.clone(),
                mu_hat: ctrl.mu_hat(&x).to_vec(),
                m_gain: controller.gains.iter().map(|g| g.m_gain).collect(),
                phi_hat: ctrl.phi_hat(&x),
                weight_norms: (0..n).map(|i| norm_sq(ctrl.weights(&x, i)).sqrt()).collect(),
                aleph: ctrl.aleph(&x),
                w_ref: reference.0,
            };
            summary.observe(k, &rec, dt);
            records.push(rec);
            if k == steps {
                return Ok(());
            }

            let u = ts.held_u;
            ctrl.rates(&snap, &x, u, &mut dx)?;
            plant_part(t, &x, u, &mut dx)?;
            step_with_k1(sim.integrator, t, dt, &mut x, &dx, &mut ws, |ts_, y, dy| {
                ctrl.evaluate(ts_, y, plant.reference(ts_), &mut stage)?;
                ctrl.rates(&stage, y, u, dy)?;
                plant_part(ts_, y, u, dy)
            })
        })();
        if let Err(error) = outcome {
            let trace = summary.finish(records, &ts, steps, Some(&error));
            return Err(RunFailure { error, trace: Box::new(trace) });
        }
    }
    Ok(summary.finish(records, &ts, steps, None))
}
