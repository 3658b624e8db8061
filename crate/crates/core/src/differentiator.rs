//! First-order sliding-mode differentiator.
//!
//! Supplies the time derivative of a virtual control to the next backstepping
//! step so that derivative never has to be formed analytically.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentiatorState {
    pub delta0: f64,
    pub delta1: f64,
    pub eps0: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentiatorRates {
    pub d_delta0: f64,
    pub d_delta1: f64,
    /// Derivative estimate of the input.
    pub sigma: f64,
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn differentiator_rates(s: &DifferentiatorState, input: f64) -> DifferentiatorRates {
    let err = s.delta0 - input;
    let sigma = s.delta1 - s.eps0 * err.abs().sqrt() * sign(err);
    DifferentiatorRates { d_delta0: sigma, d_delta1: -s.eps1 * sign(s.delta1 - sigma), sigma }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locked_on_equilibrium() {
        let s = DifferentiatorState { delta0: 0.7, delta1: 0.0, eps0: 2.0, eps1: 2.9 };
        let r = differentiator_rates(&s, 0.7);
        assert_eq!(r.sigma, 0.0);
        assert_eq!(r.d_delta0, 0.0);
        assert_eq!(r.d_delta1, 0.0);
    }

    #[test]
    fn unit_offset() {
        let s = DifferentiatorState { delta0: 1.0, delta1: 0.0, eps0: 2.0, eps1: 2.9 };
        let r = differentiator_rates(&s, 0.0);
        assert_eq!(r.sigma, -2.0);
        assert_eq!(r.d_delta0, -2.0);
        assert_eq!(r.d_delta1, -2.9);
    }

    #[test]
    fn sign_of_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(1e-300), 1.0);
        assert_eq!(sign(-3.0), -1.0);
    }

    #[test]
    fn constant_input_tracked_exactly() {
        let mut s = DifferentiatorState { delta0: 1.25, delta1: 0.0, eps0: 2.0, eps1: 2.9 };
        for _ in 0..10_000 {
            let r = differentiator_rates(&s, 1.25);
            assert_eq!(r.sigma, 0.0);
            s.delta0 += 1e-3 * r.d_delta0;
            s.delta1 += 1e-3 * r.d_delta1;
        }
    }
}
