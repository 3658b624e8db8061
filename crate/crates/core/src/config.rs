//! Experiment configuration: named presets, TOML overlay files and lints.
//!
//! A config file is TOML with one table per section. Every key is optional;
//! missing keys fall back to the preset named by `preset` (default
//! `paper_sec4`). Dotted keys work as usual:
//!
//! ```toml
//! preset = "paper_sec4"
//! trigger.upsilon = 0.3
//! sim.duration = 5.0
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::controller::{gain_lint, ControlShape, DynamicSignal, StepGains};
use crate::error::{ConfigIssue, Error, Result};
use crate::integrator::Integrator;
use crate::plant::{plant_by_name, PlantModel, PlantState, PAPER_SEC4, TOY_LINEAR_SCALAR};
use crate::sim::{run_simulation, ControllerConfig, DifferentiatorGains, RbfLayout, RunFailure, SimConfig, SimulationTrace};
use crate::trigger::HetcPolicy;

pub const PRESETS: [&str; 2] = [PAPER_SEC4, TOY_LINEAR_SCALAR];

/// Keys accepted by [`ExperimentConfig::with_scalar`] under a short name.
pub const SCALAR_ALIASES: [(&str, &str); 4] = [
    ("T", "trigger.switch_t"),
    ("Psi", "trigger.psi"),
    ("Phi", "trigger.phi"),
    ("Upsilon", "trigger.upsilon"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub xi: Vec<f64>,
    pub a: Vec<f64>,
    pub lambda: Vec<f64>,
    pub e: Vec<f64>,
    pub m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub big_i: f64,
    pub h: f64,
    pub tau: f64,
    pub a0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSection {
    pub upsilon: f64,
    pub phi: f64,
    pub psi: f64,
    pub switch_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentiatorSection {
    /// One per differentiator (steps 2..n).
    pub eps0: Vec<f64>,
    /// Defaults to `eps0` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<Vec<f64>>,
    pub delta0_init: f64,
    pub delta1_init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbfSection {
    pub nodes_per_dim: usize,
    pub varpi_range: [f64; 2],
    pub z_range: [f64; 2],
    pub aleph_range: [f64; 2],
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicSection {
    pub wp_bar: f64,
    pub d_bar: f64,
    pub aleph0: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub w: Vec<f64>,
    pub zeta: f64,
    pub phi_hat: f64,
    pub mu_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub step: f64,
    pub duration: f64,
    pub integrator: Integrator,
    pub transient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub plant: String,
    pub gains: GainsSection,
    pub control: ControlSection,
    pub trigger: TriggerSection,
    pub differentiator: DifferentiatorSection,
    pub rbf: RbfSection,
    pub dynamic: DynamicSection,
    pub initial: InitialSection,
    pub sim: SimSection,
    pub output: OutputSection,
}

/// Everything [`run_simulation`] needs, built from a linted config.
#[derive(Clone)]
pub struct Experiment {
    pub plant: Arc<dyn PlantModel>,
    pub controller: ControllerConfig,
    pub policy: HetcPolicy,
    pub sim: SimConfig,
    pub initial: PlantState,
}

impl Experiment {
    pub fn run(&self) -> std::result::Result<SimulationTrace, RunFailure> {
        run_simulation(self.plant.as_ref(), &self.controller, &self.policy, &self.sim, &self.initial)
    }
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            PAPER_SEC4 => Ok(paper_sec4()),
            TOY_LINEAR_SCALAR => Ok(toy_linear_scalar()),
            other => Err(Error::ConfigInvalid(vec![ConfigIssue::new(
                "preset",
                format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")),
            )])),
        }
    }

    /// Parses TOML text and overlays it on the preset it names.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let overlay: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| invalid("config", e.message().to_string()))?;
        let preset = match overlay.get("preset") {
            None => PAPER_SEC4.to_string(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(invalid("preset", "must be a string")),
        };
        let mut base = to_table(&Self::preset(&preset)?);
        merge(&mut base, overlay);
        from_table(base)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.resolved()).expect("config serializes")
    }

    /// Copy with every defaulted field filled in.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        if c.differentiator.eps1.is_none() {
            c.differentiator.eps1 = Some(c.differentiator.eps0.clone());
        }
        c
    }

    /// Copy with one scalar key replaced, e.g. `trigger.switch_t` or `T`.
    pub fn with_scalar(&self, key: &str, value: f64) -> Result<Self> {
        let key = resolve_key(key);
        let mut table = to_table(self);
        let parts: Vec<&str> = key.split('.').collect();
        set_path(&mut table, &parts, value).map_err(|reason| invalid(key, reason))?;
        from_table(table)
    }

    /// Hard invariants. A config that fails any of these is never run.
    pub fn lint(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &str, reason: &str| {
            if !ok {
                out.push(ConfigIssue::new(field, reason));
            }
        };
        let plant = plant_by_name(&self.plant);
        check(plant.is_ok(), "plant", "unknown plant");
        let n = plant.as_ref().map_or(self.gains.xi.len(), |p| p.order());

        let g = &self.gains;
        for (name, v) in [("gains.xi", &g.xi), ("gains.a", &g.a), ("gains.lambda", &g.lambda), ("gains.e", &g.e), ("gains.m", &g.m)] {
            check(v.len() == n, name, "needs one entry per state");
            check(v.iter().all(|x| *x > 0.0 && x.is_finite()), name, "entries must be positive");
        }

        let c = &self.control;
        check(c.big_i > 0.0, "control.big_i", "must be positive");
        check(c.h > 0.0, "control.h", "must be positive");
        check(c.tau > 0.0, "control.tau", "must be positive");
        check(c.a0 > 0.0, "control.a0", "must be positive");

        let t = &self.trigger;
        check(t.upsilon > 0.0 && t.upsilon < 1.0, "trigger.upsilon", "must lie in (0, 1)");
        check(t.phi > 0.0, "trigger.phi", "must be positive");
        check(t.psi > 0.0, "trigger.psi", "must be positive");
        check(t.switch_t > 0.0, "trigger.switch_t", "must be positive");
        if t.upsilon > 0.0 && t.upsilon < 1.0 {
            check(c.big_i > t.phi / (1.0 - t.upsilon), "control.big_i", "must exceed trigger.phi / (1 - trigger.upsilon)");
        }

        let d = &self.differentiator;
        check(d.eps0.len() + 1 == n, "differentiator.eps0", "needs one entry per state after the first");
        check(d.eps0.iter().all(|x| *x > 0.0), "differentiator.eps0", "entries must be positive");
        if let Some(e1) = &d.eps1 {
            check(e1.len() + 1 == n, "differentiator.eps1", "needs one entry per state after the first");
            check(e1.iter().all(|x| *x > 0.0), "differentiator.eps1", "entries must be positive");
        }
        check(d.delta0_init.is_finite() && d.delta1_init.is_finite(), "differentiator.delta0_init", "must be finite");

        let r = &self.rbf;
        check(r.nodes_per_dim >= 1, "rbf.nodes_per_dim", "must be at least 1");
        check(r.width > 0.0, "rbf.width", "must be positive");
        for (name, rg) in [("rbf.varpi_range", r.varpi_range), ("rbf.z_range", r.z_range), ("rbf.aleph_range", r.aleph_range)] {
            check(rg[0] <= rg[1], name, "lower end exceeds upper end");
        }

        let y = &self.dynamic;
        check(y.wp_bar > 0.0, "dynamic.wp_bar", "must be positive");
        check(y.d_bar >= 0.0, "dynamic.d_bar", "must be non-negative");
        check(y.aleph0 >= 0.0, "dynamic.aleph0", "must be non-negative");
        check(y.exponent > 0.0, "dynamic.exponent", "must be positive");

        let i = &self.initial;
        check(i.w.len() == n, "initial.w", "needs one entry per state");
        check(i.mu_hat.len() == n, "initial.mu_hat", "needs one entry per state");
        if let Ok(p) = &plant {
            let inside = i.w.iter().zip(p.bounds()).all(|(w, b)| b.margin(*w) > b.guard());
            check(inside, "initial.w", "must lie strictly inside the constraint bounds");
        }
        check(i.phi_hat >= 0.0, "initial.phi_hat", "must be non-negative");

        let s = &self.sim;
        check(s.step > 0.0, "sim.step", "must be positive");
        check(s.duration >= s.step, "sim.duration", "must be at least one step");
        check(s.transient >= 0.0 && s.transient <= s.duration, "sim.transient", "must lie in [0, duration]");
        out
    }

    /// Soft checks on sufficient stability conditions.
    pub fn warnings(&self) -> Vec<String> {
        gain_lint(&self.step_gains())
    }

    fn step_gains(&self) -> Vec<StepGains> {
        let g = &self.gains;
        (0..g.xi.len().min(g.a.len()).min(g.lambda.len()).min(g.e.len()).min(g.m.len()))
            .map(|i| StepGains { xi: g.xi[i], a: g.a[i], lambda: g.lambda[i], e: g.e[i], m_gain: g.m[i] })
            .collect()
    }

    pub fn policy(&self) -> HetcPolicy {
        let t = &self.trigger;
        HetcPolicy { upsilon: t.upsilon, phi: t.phi, psi: t.psi, switch_t: t.switch_t }
    }

    pub fn sim_config(&self) -> SimConfig {
        let s = &self.sim;
        SimConfig { step_s: s.step, duration_s: s.duration, integrator: s.integrator, transient_s: s.transient }
    }

    /// Lints the config and assembles the run inputs.
    pub fn build(&self) -> Result<Experiment> {
        let issues = self.lint();
        if !issues.is_empty() {
            return Err(Error::ConfigInvalid(issues));
        }
        let plant = plant_by_name(&self.plant)?;
        let d = &self.differentiator;
        let eps1 = d.eps1.clone().unwrap_or_else(|| d.eps0.clone());
        let r = &self.rbf;
        let controller = ControllerConfig {
            gains: self.step_gains(),
            shape: ControlShape { upsilon: self.trigger.upsilon, big_i: self.control.big_i, h: self.control.h },
            tau: self.control.tau,
            a0: self.control.a0,
            differentiators: d.eps0.iter().zip(&eps1).map(|(&eps0, &eps1)| DifferentiatorGains { eps0, eps1 }).collect(),
            rbf: RbfLayout {
                nodes_per_dim: r.nodes_per_dim,
                varpi_range: (r.varpi_range[0], r.varpi_range[1]),
                z_range: (r.z_range[0], r.z_range[1]),
                aleph_range: (r.aleph_range[0], r.aleph_range[1]),
                width: r.width,
            },
            dynamic: DynamicSignal {
                aleph: self.dynamic.aleph0,
                wp_bar: self.dynamic.wp_bar,
                d_bar: self.dynamic.d_bar,
                growth_exponent: self.dynamic.exponent,
            },
            initial_phi_hat: self.initial.phi_hat,
            initial_mu_hat: self.initial.mu_hat.clone(),
            initial_delta: (d.delta0_init, d.delta1_init),
        };
        Ok(Experiment {
            plant,
            controller,
            policy: self.policy(),
            sim: self.sim_config(),
            initial: PlantState { w: self.initial.w.clone(), zeta: self.initial.zeta },
        })
    }

    /// Values chosen by this implementation where the source design is silent.
    pub fn assumptions(&self) -> Vec<String> {
        vec![
            format!("trigger.switch_t = {} and trigger.psi = {} (not given for the benchmark)", self.trigger.switch_t, self.trigger.psi),
            format!("control.a0 = {} (not given for the benchmark)", self.control.a0),
            format!(
                "differentiator.eps1 = {:?}{}",
                self.resolved().differentiator.eps1.unwrap_or_default(),
                if self.differentiator.eps1.is_none() { " (defaulted to eps0)" } else { "" }
            ),
            format!(
                "rbf grid: {} nodes per dim, width {}",
                self.rbf.nodes_per_dim, self.rbf.width
            ),
            format!("sim: {} s at step {} s with {:?}", self.sim.duration, self.sim.step, self.sim.integrator),
            "u(0) = v(0) with an event logged at t = 0".to_string(),
        ]
    }
}

/// Expands a short alias such as `T` to its dotted key.
pub fn resolve_key(key: &str) -> &str {
    SCALAR_ALIASES
        .iter()
        .find(|(alias, _)| alias.eq_ignore_ascii_case(key))
        .map_or(key, |(_, full)| full)
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::ConfigInvalid(vec![ConfigIssue::new(field, reason)])
}

fn to_table(c: &ExperimentConfig) -> toml::Table {
    toml::Table::try_from(c).expect("config serializes")
}

fn from_table(t: toml::Table) -> Result<ExperimentConfig> {
    toml::Value::Table(t)
        .try_into()
        .map_err(|e: toml::de::Error| invalid("config", e.message().to_string()))
}

fn set_path(t: &mut toml::Table, path: &[&str], value: f64) -> std::result::Result<(), &'static str> {
    let slot = t.get_mut(path[0]).ok_or("no such key")?;
    if path.len() > 1 {
        return set_path(slot.as_table_mut().ok_or("no such key")?, &path[1..], value);
    }
    match slot {
        toml::Value::Float(_) => *slot = toml::Value::Float(value),
        toml::Value::Integer(_) if value.fract() == 0.0 => *slot = toml::Value::Integer(value as i64),
        _ => return Err("not a sweepable scalar"),
    }
    Ok(())
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn paper_sec4() -> ExperimentConfig {
    ExperimentConfig {
        preset: PAPER_SEC4.into(),
        plant: PAPER_SEC4.into(),
        gains: GainsSection {
            xi: vec![150.0, 185.0],
            a: vec![10.0, 60.0],
            lambda: vec![1.0, 1.0],
            e: vec![20.0, 50.0],
            m: vec![15.0, 0.05],
        },
        control: ControlSection { big_i: 3.0, h: 900.0, tau: 1.5, a0: 1.0 },
        trigger: TriggerSection { upsilon: 0.3, phi: 1.0, psi: 1.0, switch_t: 1.0 },
        differentiator: DifferentiatorSection { eps0: vec![2.0], eps1: Some(vec![2.9]), delta0_init: 0.1, delta1_init: 0.1 },
        rbf: RbfSection {
            nodes_per_dim: 5,
            varpi_range: [-3.0, 3.0],
            z_range: [-2.0, 2.0],
            aleph_range: [0.0, 2.0],
            width: 2.0,
        },
        dynamic: DynamicSection { wp_bar: 1.0, d_bar: 0.2, aleph0: 0.0, exponent: 2.0 },
        initial: InitialSection { w: vec![0.1, -0.1], zeta: 0.0, phi_hat: 0.5, mu_hat: vec![0.0, 0.0] },
        sim: SimSection { step: 1e-3, duration: 20.0, integrator: Integrator::Rk4, transient: 2.0 },
        output: OutputSection { dir: "out".into(), plots: false },
    }
}

fn toy_linear_scalar() -> ExperimentConfig {
    let mut c = paper_sec4();
    c.preset = TOY_LINEAR_SCALAR.into();
    c.plant = TOY_LINEAR_SCALAR.into();
    c.differentiator.delta0_init = 0.0;
    c.differentiator.delta1_init = 0.0;
    c.initial.w = vec![0.0, 0.0];
    c.sim.duration = 1.0;
    c.sim.transient = 0.0;
    c
}
