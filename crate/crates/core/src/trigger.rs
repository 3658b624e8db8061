//! Hybrid event-triggered transmission of the control signal.
//!
//! The actuator holds `u = v(t_s)` from the last event until the measurement
//! error `k = v - u` crosses a threshold. While the held input is large
//! (`|u| >= T`) the threshold is relative, `upsilon |u| + phi`; otherwise it is
//! the fixed value `psi`. Both comparisons are inclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HetcPolicy {
    pub upsilon: f64,
    pub phi: f64,
    pub psi: f64,
    /// Switching boundary `T` between the relative and fixed thresholds.
    pub switch_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriggerDecision {
    None,
    Relative,
    Fixed,
}

impl TriggerDecision {
    /// Trace encoding: 0 none, 1 relative, 2 fixed.
    pub fn code(self) -> u8 {
        match self {
            TriggerDecision::None => 0,
            TriggerDecision::Relative => 1,
            TriggerDecision::Fixed => 2,
        }
    }

    pub fn is_event(self) -> bool {
        self != TriggerDecision::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerState {
    pub held_u: f64,
    pub last_event_time: Option<f64>,
    pub event_count_relative: u64,
    pub event_count_fixed: u64,
    /// Smallest interval between consecutive events; `None` before the second event.
    pub min_dwell: Option<f64>,
}

impl Default for TriggerState {
    fn default() -> Self {
        Self {
            held_u: 0.0,
            last_event_time: None,
            event_count_relative: 0,
            event_count_fixed: 0,
            min_dwell: None,
        }
    }
}

impl TriggerState {
    pub fn total_events(&self) -> u64 {
        self.event_count_relative + self.event_count_fixed
    }
}

pub fn measurement_error(v: f64, u: f64) -> f64 {
    v - u
}

/// Branch selected by the held input alone, regardless of the error.
pub fn active_branch(u: f64, p: &HetcPolicy) -> TriggerDecision {
    if u.abs() >= p.switch_t {
        TriggerDecision::Relative
    } else {
        TriggerDecision::Fixed
    }
}

pub fn should_trigger(k: f64, u: f64, p: &HetcPolicy) -> TriggerDecision {
    match active_branch(u, p) {
        TriggerDecision::Relative if k.abs() >= p.upsilon * u.abs() + p.phi => TriggerDecision::Relative,
        TriggerDecision::Fixed if k.abs() >= p.psi => TriggerDecision::Fixed,
        _ => TriggerDecision::None,
    }
}

/// Latches `v` into the hold and updates the event statistics.
pub fn apply_event(ts: &TriggerState, v: f64, now: f64, decision: TriggerDecision) -> Result<TriggerState> {
    if let Some(last) = ts.last_event_time {
        if now < last {
            return Err(Error::NonMonotonicTime { now, last });
        }
    }
    let mut next = *ts;
    match decision {
        TriggerDecision::None => return Ok(next),
        TriggerDecision::Relative => next.event_count_relative += 1,
        TriggerDecision::Fixed => next.event_count_fixed += 1,
    }
    if let Some(last) = ts.last_event_time {
        let dwell = now - last;
        next.min_dwell = Some(next.min_dwell.map_or(dwell, |d| d.min(dwell)));
    }
    next.held_u = v;
    next.last_event_time = Some(now);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> HetcPolicy {
        HetcPolicy { upsilon: 0.3, phi: 1.0, psi: 1.0, switch_t: 1.0 }
    }

    #[test]
    fn measurement_error_examples() {
        assert_eq!(measurement_error(1.5, 1.5), 0.0);
        assert_eq!(measurement_error(2.0, -1.0), 3.0);
        assert_eq!(measurement_error(0.0, 0.0), 0.0);
    }

    #[test]
    fn trigger_examples() {
        let p = policy();
        let u = p.switch_t;
        assert_eq!(should_trigger(p.upsilon * u + p.phi, u, &p), TriggerDecision::Relative);
        assert_eq!(should_trigger(0.999, 0.0, &p), TriggerDecision::None);
        assert_eq!(should_trigger(1.0, 0.0, &p), TriggerDecision::Fixed);
        assert_eq!(should_trigger(-1.0, 0.0, &p), TriggerDecision::Fixed);
    }

    #[test]
    fn first_event_and_dwell() {
        let p = policy();
        let s0 = TriggerState::default();
        let s1 = apply_event(&s0, 1.0, 0.0, active_branch(1.0, &p)).unwrap();
        assert_eq!(s1.held_u, 1.0);
        assert_eq!(s1.event_count_relative, 1);
        assert_eq!(s1.min_dwell, None);
        assert_eq!(measurement_error(1.0, s1.held_u), 0.0);

        let s = apply_event(&s0, 0.1, 0.001, TriggerDecision::Fixed).unwrap();
        let s = apply_event(&s, 0.4, 0.004, TriggerDecision::Fixed).unwrap();
        assert_eq!(s.event_count_fixed, 2);
        assert!((s.min_dwell.unwrap() - 0.003).abs() < 1e-15);
        assert_eq!(apply_event(&s, 9.0, 0.005, TriggerDecision::None).unwrap(), s);
    }

    #[test]
    fn rejects_time_reversal() {
        let s = apply_event(&TriggerState::default(), 0.1, 1.0, TriggerDecision::Fixed).unwrap();
        assert!(matches!(
            apply_event(&s, 0.2, 0.5, TriggerDecision::Fixed),
            Err(Error::NonMonotonicTime { .. })
        ));
    }
}
