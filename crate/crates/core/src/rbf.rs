//! Gaussian radial-basis networks and the adaptive laws that tune them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian basis with a shared spread. Centers are stored row-major, one row
/// per node.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfBasis {
    dim: usize,
    centers: Vec<f64>,
    width: f64,
}

impl RbfBasis {
    pub fn new(centers: Vec<Vec<f64>>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter { name: "width", reason: "must be positive and finite" });
        }
        let dim = centers[0].len();
        let mut flat = Vec::with_capacity(dim * centers.len());
        for c in &centers {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.len() });
            }
            flat.extend_from_slice(c);
        }
        Ok(Self { dim, centers: flat, width })
    }

    /// Tensor grid of centers, `nodes_per_dim` evenly spaced points per axis
    /// (the midpoint when `nodes_per_dim == 1`).
    pub fn grid(ranges: &[(f64, f64)], nodes_per_dim: usize, width: f64) -> Result<Self> {
        if ranges.is_empty() || nodes_per_dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let axes: Vec<Vec<f64>> = ranges
            .iter()
            .map(|&(lo, hi)| {
                if nodes_per_dim == 1 {
                    vec![0.5 * (lo + hi)]
                } else {
                    let step = (hi - lo) / (nodes_per_dim - 1) as f64;
                    (0..nodes_per_dim).map(|k| lo + step * k as f64).collect()
                }
            })
            .collect();
        let count = nodes_per_dim.pow(ranges.len() as u32);
        let mut centers = Vec::with_capacity(count);
        for idx in 0..count {
            let mut rem = idx;
            let mut c = vec![0.0; ranges.len()];
            for d in (0..ranges.len()).rev() {
                c[d] = axes[d][rem % nodes_per_dim];
                rem /= nodes_per_dim;
            }
            centers.push(c);
        }
        Self::new(centers, width)
    }

    pub fn node_count(&self) -> usize {
        self.centers.len() / self.dim
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self, j: usize) -> &[f64] {
        &self.centers[j * self.dim..(j + 1) * self.dim]
    }

    /// Writes the basis activations for `x` into `out`.
    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if out.len() != self.node_count() {
            return Err(Error::DimensionMismatch { expected: self.node_count(), got: out.len() });
        }
        let inv_w2 = 1.0 / (self.width * self.width);
        for (o, c) in out.iter_mut().zip(self.centers.chunks_exact(self.dim)) {
            let d2: f64 = c.iter().zip(x).map(|(ci, xi)| (xi - ci) * (xi - ci)).sum();
            *o = (-d2 * inv_w2).exp();
        }
        Ok(())
    }
}

/// Activation vector `exp(-|x - c_j|^2 / width^2)` for every node.
pub fn evaluate_basis(x: &[f64], basis: &RbfBasis) -> Result<Vec<f64>> {
    let mut out = vec![0.0; basis.node_count()];
    basis.evaluate_into(x, &mut out)?;
    Ok(out)
}

pub fn norm_sq(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum()
}

/// Estimated network weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm_sq(&self.0).sqrt()
    }
}

/// Network output `W^T p`.
pub fn approximate(weights: &[f64], p: &[f64]) -> Result<f64> {
    if weights.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: p.len() });
    }
    Ok(weights.iter().zip(p).map(|(w, v)| w * v).sum())
}

/// Weight adaptation `dW/dt = -lambda * z * m * p - e * W`, driven by the step's
/// tracking error and damped by sigma-modification.
pub fn weight_update_rate(
    z: f64,
    m_gain: f64,
    p: &[f64],
    lambda: f64,
    e: f64,
    weights: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; weights.len()];
    weight_update_rate_into(z, m_gain, p, lambda, e, weights, &mut out)?;
    Ok(out)
}

pub fn weight_update_rate_into(
    z: f64,
    m_gain: f64,
    p: &[f64],
    lambda: f64,
    e: f64,
    weights: &[f64],
    out: &mut [f64],
) -> Result<()> {
    if p.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: p.len() });
    }
    if out.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: out.len() });
    }
    let drive = lambda * z * m_gain;
    for ((o, pj), wj) in out.iter_mut().zip(p).zip(weights) {
        *o = -drive * pj - e * wj;
    }
    Ok(())
}

/// Shared scalar adaptive gain and its tuning constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveScalar {
    pub phi_hat: f64,
    pub tau: f64,
    pub a0: f64,
}

/// `z_n^2 |p_n|^2 / (2 a0^2) - tau * phi_hat`.
pub fn phi_update_rate(z_n: f64, p_n: &[f64], s: &AdaptiveScalar) -> f64 {
    phi_rate_from_norm(z_n, norm_sq(p_n), s)
}

pub(crate) fn phi_rate_from_norm(z_n: f64, p_norm_sq: f64, s: &AdaptiveScalar) -> f64 {
    z_n * z_n * p_norm_sq / (2.0 * s.a0 * s.a0) - s.tau * s.phi_hat
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_basis() -> RbfBasis {
        RbfBasis::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap()
    }

    #[test]
    fn activation_at_center_is_one() {
        let p = evaluate_basis(&[1.0, 0.0], &unit_basis()).unwrap();
        assert_eq!(p[1], 1.0);
        assert!((p[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((p[0] - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn far_input_is_negligible() {
        let b = RbfBasis::grid(&[(-1.0, 1.0), (-1.0, 1.0)], 3, 0.5).unwrap();
        let p = evaluate_basis(&[10.0, 10.0], &b).unwrap();
        // nearest center is at distance > 10 widths
        assert!(p.iter().all(|&v| (0.0..1e-43).contains(&v)));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            evaluate_basis(&[0.0], &unit_basis()),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(approximate(&[1.0], &[1.0, 2.0]).is_err());
        assert!(weight_update_rate(1.0, 1.0, &[1.0], 1.0, 1.0, &[0.0, 0.0]).is_err());
        assert!(RbfBasis::new(vec![vec![0.0], vec![0.0, 1.0]], 1.0).is_err());
    }

    #[test]
    fn grid_layout() {
        let b = RbfBasis::grid(&[(-3.0, 3.0), (0.0, 2.0)], 5, 2.0).unwrap();
        assert_eq!(b.node_count(), 25);
        assert_eq!(b.center(0), &[-3.0, 0.0]);
        assert_eq!(b.center(1), &[-3.0, 0.5]);
        assert_eq!(b.center(24), &[3.0, 2.0]);
        let single = RbfBasis::grid(&[(-2.0, 4.0)], 1, 1.0).unwrap();
        assert_eq!(single.center(0), &[1.0]);
        assert!(RbfBasis::grid(&[(0.0, 1.0)], 2, 0.0).is_err());
    }

    #[test]
    fn approximate_examples() {
        assert_eq!(approximate(&[0.0; 3], &[0.3, 0.2, 0.9]).unwrap(), 0.0);
        assert_eq!(approximate(&[0.0, 1.0, 0.0], &[0.3, 0.2, 0.9]).unwrap(), 0.2);
        assert_eq!(approximate(&[1.0, 2.0], &[0.5, 0.25]).unwrap(), 1.0);
    }

    #[test]
    fn weight_rate_examples() {
        assert_eq!(weight_update_rate(0.0, 15.0, &[0.4, 0.1], 1.0, 20.0, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(weight_update_rate(1.0, 1.0, &[0.5], 1.0, 0.0, &[0.0]).unwrap(), vec![-0.5]);
        assert_eq!(weight_update_rate(0.0, 1.0, &[0.5], 1.0, 2.0, &[3.0]).unwrap(), vec![-6.0]);
    }

    #[test]
    fn phi_rate_examples() {
        let mut s = AdaptiveScalar { phi_hat: 0.0, tau: 1.5, a0: 1.0 };
        assert_eq!(phi_update_rate(0.0, &[0.3, 0.7], &s), 0.0);
        s.phi_hat = 2.0;
        assert_eq!(phi_update_rate(0.0, &[0.3, 0.7], &s), -3.0);
        let s = AdaptiveScalar { phi_hat: 123.0, tau: 0.0, a0: 1.0 };
        assert_eq!(phi_update_rate(1.0, &[1.0], &s), 0.5);
    }

    #[test]
    fn weights_decay_exponentially_without_error() {
        // dW/dt = -e W integrated with RK4 against exp(-e t)
        let e = 20.0;
        let dt = 1e-3;
        let p = [0.7, 0.1];
        let mut w = vec![1.0, -2.0];
        let rate = |w: &[f64]| weight_update_rate(0.0, 15.0, &p, 1.0, e, w).unwrap();
        for _ in 0..100 {
            let k1 = rate(&w);
            let y2: Vec<f64> = w.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
            let k2 = rate(&y2);
            let y3: Vec<f64> = w.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
            let k3 = rate(&y3);
            let y4: Vec<f64> = w.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
            let k4 = rate(&y4);
            for j in 0..w.len() {
                w[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        let decay = (-e * 0.1f64).exp();
        assert!((w[0] - decay).abs() < 1e-9);
        assert!((w[1] + 2.0 * decay).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn basis_entries_bounded(x in -10.0f64..10.0, y in -10.0f64..10.0, width in 0.1f64..5.0) {
            let b = RbfBasis::grid(&[(-3.0, 3.0), (-3.0, 3.0)], 4, width).unwrap();
            let p = evaluate_basis(&[x, y], &b).unwrap();
            prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!(norm_sq(&p) <= b.node_count() as f64);
        }

        #[test]
        fn phi_stays_nonnegative(
            phi0 in 0.0f64..5.0,
            amp in 0.0f64..3.0,
            freq in 0.1f64..10.0,
            tau in 0.01f64..5.0,
        ) {
            // Euler and the exact decay both preserve sign as long as tau*dt < 1
            let dt = 1e-3;
            let mut s = AdaptiveScalar { phi_hat: phi0, tau, a0: 1.0 };
            for k in 0..5000 {
                let z = amp * (freq * k as f64 * dt).sin();
                s.phi_hat += dt * phi_update_rate(z, &[0.5, 0.5], &s);
                prop_assert!(s.phi_hat >= -1e-12);
            }
        }
    }
}
