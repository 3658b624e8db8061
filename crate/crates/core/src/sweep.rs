//! One-parameter sweeps over an experiment config.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{resolve_key, ExperimentConfig};
use crate::sim::RunSummary;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub ok: bool,
    pub events_total: u64,
    pub events_relative: u64,
    pub events_fixed: u64,
    pub min_dwell_s: Option<f64>,
    pub max_tracking_error: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_summary(param: &str, value: f64, s: &RunSummary) -> Self {
        Self {
            param: param.to_string(),
            value,
            ok: s.completed,
            events_total: s.events_total,
            events_relative: s.events_relative,
            events_fixed: s.events_fixed,
            min_dwell_s: s.min_dwell_s,
            max_tracking_error: s.max_tracking_error,
            error: s.failure.clone(),
        }
    }

    fn failed(param: &str, value: f64, error: String) -> Self {
        Self {
            param: param.to_string(),
            value,
            ok: false,
            events_total: 0,
            events_relative: 0,
            events_fixed: 0,
            min_dwell_s: None,
            max_tracking_error: f64::NAN,
            error: Some(error),
        }
    }
}

pub fn sweep_row(base: &ExperimentConfig, param: &str, value: f64) -> SweepRow {
    let param = resolve_key(param);
    let exp = match base.with_scalar(param, value).and_then(|c| c.build()) {
        Ok(e) => e,
        Err(e) => return SweepRow::failed(param, value, e.to_string()),
    };
    match exp.run() {
        Ok(trace) => SweepRow::from_summary(param, value, &trace.summary),
        Err(f) => SweepRow::from_summary(param, value, &f.trace.summary),
    }
}

/// Runs one simulation per value, in parallel on at most `threads` workers
/// (all cores when `None`). Rows come back in the order of `values`; a failed
/// row is flagged and the rest still run.
pub fn run_sweep(base: &ExperimentConfig, param: &str, values: &[f64], threads: Option<usize>) -> Vec<SweepRow> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(|| values.par_iter().map(|&v| sweep_row(base, param, v)).collect()),
        Err(_) => values.iter().map(|&v| sweep_row(base, param, v)).collect(),
    }
}

pub const SWEEP_COLUMNS: &str = "param,value,status,events_total,events_relative,events_fixed,min_dwell_s,max_tracking_error,error";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_COLUMNS);
    s.push('\n');
    for r in rows {
        let dwell = r.min_dwell_s.map_or(String::new(), |d| d.to_string());
        let err = r.error.as_deref().unwrap_or("").replace('"', "'");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},\"{}\"",
            r.param,
            r.value,
            if r.ok { "ok" } else { "failed" },
            r.events_total,
            r.events_relative,
            r.events_fixed,
            dwell,
            r.max_tracking_error,
            err
        );
    }
    s
}
