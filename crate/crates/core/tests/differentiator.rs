use hetc_core::differentiator::{differentiator_rates, DifferentiatorState};
use hetc_core::verify::differentiator_tracking_error;

#[test]
fn tracks_cosine_after_settling() {
    let e = differentiator_tracking_error(2.0, 2.9, 1e-3, 10.0, 1.0);
    assert!(e < 0.05, "{e}");
}

#[test]
fn larger_gains_still_track() {
    let e = differentiator_tracking_error(4.0, 6.0, 1e-3, 10.0, 1.0);
    assert!(e < 0.05, "{e}");
}

#[test]
fn at_rest_on_a_constant_input() {
    let s = DifferentiatorState { delta0: 0.7, delta1: 0.0, eps0: 2.0, eps1: 2.9 };
    let r = differentiator_rates(&s, 0.7);
    assert_eq!((r.sigma, r.d_delta0, r.d_delta1), (0.0, 0.0, 0.0));
}
