use hetc_core::verify::{observer_error_history, observer_metrics};

#[test]
fn converges_within_ten_time_constants() {
    for m in [2.0, 5.0, 15.0] {
        let (constant, varying) = observer_metrics(m);
        assert!(constant < 1e-3, "m={m}: {constant}");
        assert!(varying < 1e-3, "m={m}: {varying}");
    }
}

#[test]
fn error_is_initial_disturbance_at_start() {
    let h = observer_error_history(4.0, 1e-3, 0.01, |_| 2.5);
    assert_eq!(h[0], (0.0, 2.5));
    // first-order decay e^{-m t}
    let (t, e) = h[10];
    assert!((e - 2.5 * (-4.0 * t).exp()).abs() < 1e-10);
}

#[test]
fn ramp_disturbance_leaves_steady_lag() {
    // dD/dt = 1 gives a steady error of 1/m
    let m = 10.0;
    let h = observer_error_history(m, 1e-3, 3.0, |t| t);
    let (_, e) = *h.last().unwrap();
    assert!((e - 1.0 / m).abs() < 1e-9, "{e}");
}
