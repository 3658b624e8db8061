use hetc_core::controller::{continuous_control, tanh_gap, ControlShape, TANH_GAP_BOUND};
use hetc_core::differentiator::sign;
use hetc_core::trigger::{active_branch, apply_event, measurement_error, should_trigger, HetcPolicy, TriggerDecision, TriggerState};
use proptest::prelude::*;

fn policy() -> impl Strategy<Value = HetcPolicy> {
    (0.01..0.99f64, 0.01..5.0f64, 0.01..5.0f64, 0.01..5.0f64)
        .prop_map(|(upsilon, phi, psi, switch_t)| HetcPolicy { upsilon, phi, psi, switch_t })
}

proptest! {
    #[test]
    fn tanh_gap_is_bounded(a in -1e3..1e3f64, b in 1e-4..1e2f64) {
        let g = tanh_gap(a, b);
        prop_assert!(g >= 0.0);
        prop_assert!(g <= TANH_GAP_BOUND * b);
    }

    #[test]
    fn events_carry_the_branch_of_the_held_input(k in -20.0..20.0f64, u in -10.0..10.0f64, p in policy()) {
        let d = should_trigger(k, u, &p);
        if d.is_event() {
            prop_assert_eq!(d, active_branch(u, &p));
        }
        let expected = if u.abs() >= p.switch_t { k.abs() >= p.upsilon * u.abs() + p.phi } else { k.abs() >= p.psi };
        prop_assert_eq!(d.is_event(), expected);
    }

    #[test]
    fn event_resets_error_and_counts_grow(v in -10.0..10.0f64, t0 in 0.0..5.0f64, dt in 0.0..1.0f64) {
        let s = apply_event(&TriggerState::default(), v, t0, TriggerDecision::Fixed).unwrap();
        prop_assert_eq!(measurement_error(v, s.held_u), 0.0);
        let s2 = apply_event(&s, -v, t0 + dt, TriggerDecision::Relative).unwrap();
        prop_assert_eq!(s2.total_events(), 2);
        prop_assert!(s2.min_dwell.unwrap() >= 0.0);
    }

    #[test]
    fn control_opposes_the_error(z in -5.0..5.0f64, alpha in -50.0..50.0f64) {
        let cs = ControlShape { upsilon: 0.3, big_i: 3.0, h: 900.0 };
        let v = continuous_control(z, alpha, &cs);
        prop_assert!(z * v <= 0.0);
    }

    #[test]
    fn sign_is_odd(x in -1e6..1e6f64) {
        prop_assert_eq!(sign(-x), -sign(x));
    }
}
