//! Run artifacts: trace and event CSV files, JSON summary, SVG line charts.
//!
//! Trace CSV layout (schema version 1). The first line is
//! `# schema_version=1`, then a header, then one row per step:
//!
//! ```text
//! t, w1..wn, zeta, varpi1..varpin, z1..zn, v, u, trigger,
//! dhat1..dhatn, dtrue1..dtruen, phi_hat, aleph, w_norm1..w_normn
//! ```
//!
//! `trigger` is 0 (no event), 1 (relative threshold) or 2 (fixed threshold).
//! Floats use Rust's shortest round-trip formatting, so traces from identical
//! runs are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::sim::{RunSummary, SimulationTrace};

pub const TRACE_SCHEMA_VERSION: u32 = 1;
pub const TRACE_FILE: &str = "trace.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn trace_columns(n: usize) -> Vec<String> {
    let idx = |p: &'static str| (1..=n).map(move |i| format!("{p}{i}"));
    let mut c = vec!["t".to_string()];
    c.extend(idx("w"));
    c.push("zeta".into());
    c.extend(idx("varpi"));
    c.extend(idx("z"));
    c.extend(["v", "u", "trigger"].map(String::from));
    c.extend(idx("dhat"));
    c.extend(idx("dtrue"));
    c.extend(["phi_hat", "aleph"].map(String::from));
    c.extend(idx("w_norm"));
    c
}

pub fn write_trace_csv<W: Write>(out: W, trace: &SimulationTrace) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    let n = trace.records.first().map_or(0, |r| r.w.len());
    writeln!(out, "# schema_version={TRACE_SCHEMA_VERSION}")?;
    writeln!(out, "{}", trace_columns(n).join(","))?;
    let mut line = String::new();
    for r in &trace.records {
        line.clear();
        let mut push = |v: f64| {
            if !line.is_empty() {
                line.push(',');
            }
            write!(line, "{v}").expect("write to string");
        };
        push(r.t);
        r.w.iter().for_each(|v| push(*v));
        push(r.zeta);
        r.varpi.iter().for_each(|v| push(*v));
        r.z.iter().for_each(|v| push(*v));
        push(r.v);
        push(r.u);
        line.push(',');
        write!(line, "{}", r.trigger.code()).expect("write to string");
        let mut push = |v: f64| write!(line, ",{v}").expect("write to string");
        r.d_hat.iter().for_each(|v| push(*v));
        r.d_true.iter().for_each(|v| push(*v));
        push(r.phi_hat);
        push(r.aleph);
        r.weight_norms.iter().for_each(|v| push(*v));
        writeln!(out, "{line}")?;
    }
    out.flush()
}

/// One row per event: time, branch, `v`, the new held `u`, and the measurement
/// error `k = v - u_prev` that fired it (0 for the initial event).
pub fn write_events_csv<W: Write>(out: W, trace: &SimulationTrace) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "t,branch,v,u,k")?;
    let mut prev_u = None;
    for r in &trace.records {
        if r.trigger.is_event() {
            let k = prev_u.map_or(0.0, |p| r.v - p);
            let branch = if r.trigger.code() == 1 { "relative" } else { "fixed" };
            writeln!(out, "{},{branch},{},{},{k}", r.t, r.v, r.u)?;
        }
        prev_u = Some(r.u);
    }
    out.flush()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<'a> {
    pub schema_version: u32,
    pub status: &'static str,
    pub plant: &'a str,
    pub summary: &'a RunSummary,
    pub config: ExperimentConfig,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
}

impl<'a> RunReport<'a> {
    pub fn new(cfg: &'a ExperimentConfig, summary: &'a RunSummary) -> Self {
        Self {
            schema_version: TRACE_SCHEMA_VERSION,
            status: if summary.completed { "completed" } else { "failed" },
            plant: &cfg.plant,
            summary,
            config: cfg.resolved(),
            assumptions: cfg.assumptions(),
            warnings: cfg.warnings(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes trace, events and summary (and plots if asked) into `dir`.
pub fn write_artifacts(dir: &Path, cfg: &ExperimentConfig, trace: &SimulationTrace, plots: bool) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let p = dir.join(TRACE_FILE);
    write_trace_csv(fs::File::create(&p)?, trace)?;
    written.push(p);
    let p = dir.join(EVENTS_FILE);
    write_events_csv(fs::File::create(&p)?, trace)?;
    written.push(p);
    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, RunReport::new(cfg, &trace.summary).to_json() + "\n")?;
    written.push(p);
    if plots {
        for (name, svg) in plot_set(trace) {
            let p = dir.join(name);
            fs::write(&p, svg)?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Standard figures: output tracking, control signals, inter-event intervals,
/// observer errors.
pub fn plot_set(trace: &SimulationTrace) -> Vec<(&'static str, String)> {
    let r = &trace.records;
    let series = |f: &dyn Fn(&crate::sim::StepRecord) -> f64| r.iter().map(|x| (x.t, f(x))).collect::<Vec<_>>();
    let n = r.first().map_or(0, |x| x.w.len());
    let mut out = vec![
        (
            "tracking.svg",
            line_chart("Output tracking", "t [s]", &[
                Series::line("y = w1", series(&|x| x.w[0])),
                Series::line("y_r", series(&|x| x.w_ref)),
            ]),
        ),
        (
            "control.svg",
            line_chart("Control", "t [s]", &[
                Series::line("v", series(&|x| x.v)),
                Series::line("u (held)", series(&|x| x.u)),
            ]),
        ),
    ];
    let mut event_t = r.iter().filter(|x| x.trigger.is_event()).map(|x| x.t);
    let mut prev = event_t.next();
    let intervals: Vec<(f64, f64)> = event_t
        .map(|t| {
            let p = (t, t - prev.unwrap_or(t));
            prev = Some(t);
            p
        })
        .collect();
    out.push(("intervals.svg", line_chart("Inter-event intervals", "t [s]", &[Series::points("t_{s+1} - t_s", intervals)])));
    let errs: Vec<Series> = (0..n)
        .map(|i| Series::line(&format!("d{} - D_hat{}", i + 1, i + 1), series(&|x| x.d_true[i] - x.d_hat[i])))
        .collect();
    out.push(("observer_errors.svg", line_chart("Disturbance observer errors", "t [s]", &errs)));
    out
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

impl Series {
    pub fn line(name: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points, markers: false }
    }

    pub fn points(name: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points, markers: true }
    }
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MAX_LINE_POINTS: usize = 4000;

/// Self-contained SVG line chart with axes, tick labels and a legend.
pub fn line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let (w, h) = (800.0, 420.0);
    let (l, r, t, b) = (70.0, 20.0, 40.0, 50.0);
    let all = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    let pad = if y1 > y0 { 0.05 * (y1 - y0) } else { 0.5 };
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let sy = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##, w - l - r, h - t - b);
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, sx(fx), h - b + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, sy(fy) + 4.0, tick(fy));
        let _ = writeln!(s, r##"<line x1="{l}" x2="{}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/>"##, w - r, sy(fy), sy(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (l + w - r) / 2.0, h - 12.0, escape(x_label));

    for (k, se) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<&(f64, f64)> = se.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        if se.markers {
            for p in &pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.6" fill="{color}"/>"#, sx(p.0), sy(p.1));
            }
        } else {
            let stride = pts.len().div_ceil(MAX_LINE_POINTS).max(1);
            let mut d = String::new();
            for p in pts.iter().step_by(stride) {
                let _ = write!(d, "{:.2},{:.2} ", sx(p.0), sy(p.1));
            }
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, d.trim_end());
        }
        let ly = t + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="12" height="3" fill="{color}"/>"#, w - r - 150.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, w - r - 132.0, escape(&se.name));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-2 && v.abs() < 1e4) {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
