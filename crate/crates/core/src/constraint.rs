//! Log-ratio barrier transform mapping a box-constrained state onto the real line.
//!
//! A state `w` confined to `(-lower, upper)` is mapped to
//! `log((lower + w) / (upper - w))`. Keeping the transformed coordinate bounded
//! keeps the physical state inside its interval, which is how the controller
//! enforces the state constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative guard width used when no explicit guard is supplied.
pub const DEFAULT_GUARD_FRACTION: f64 = 1e-9;

/// Asymmetric open interval `(-lower, upper)` for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds", into = "RawBounds")]
pub struct ConstraintBounds {
    lower: f64,
    upper: f64,
    guard: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBounds {
    lower: f64,
    upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<f64>,
}

impl TryFrom<RawBounds> for ConstraintBounds {
    type Error = Error;

    fn try_from(raw: RawBounds) -> Result<Self> {
        let b = ConstraintBounds::new(raw.lower, raw.upper)?;
        match raw.guard {
            Some(g) => b.with_guard(g),
            None => Ok(b),
        }
    }
}

impl From<ConstraintBounds> for RawBounds {
    fn from(b: ConstraintBounds) -> Self {
        RawBounds { lower: b.lower, upper: b.upper, guard: Some(b.guard) }
    }
}

impl ConstraintBounds {
    /// Bounds for `-lower < w < upper`, with the default guard distance.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && upper > 0.0 && lower.is_finite() && upper.is_finite()) {
            return Err(Error::InvalidBounds { lower, upper });
        }
        Ok(Self { lower, upper, guard: DEFAULT_GUARD_FRACTION * (lower + upper) })
    }

    /// Replaces the guard distance. States closer than `guard` to either limit are
    /// reported as out of bounds.
    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        if !(guard >= 0.0 && guard < 0.5 * (self.lower + self.upper)) {
            return Err(Error::InvalidBounds { lower: self.lower, upper: self.upper });
        }
        self.guard = guard;
        Ok(self)
    }

    pub fn delta_lower(&self) -> f64 {
        self.lower
    }

    pub fn delta_upper(&self) -> f64 {
        self.upper
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn width(&self) -> f64 {
        self.lower + self.upper
    }

    /// Strict membership in the open interval, ignoring the guard.
    pub fn contains(&self, w: f64) -> bool {
        w > -self.lower && w < self.upper
    }

    /// Smallest distance from `w` to either limit; negative when outside.
    pub fn margin(&self, w: f64) -> f64 {
        (self.upper - w).min(w + self.lower)
    }

    fn check(&self, w: f64) -> Result<()> {
        if w.is_finite() && w > -self.lower + self.guard && w < self.upper - self.guard {
            Ok(())
        } else {
            Err(Error::OutOfBounds { value: w, lower: self.lower, upper: self.upper })
        }
    }
}

/// Maps a physical state into unconstrained coordinates.
pub fn to_constrained_coords(w: f64, b: &ConstraintBounds) -> Result<f64> {
    b.check(w)?;
    Ok(((b.lower + w) / (b.upper - w)).ln())
}

/// Inverse of [`to_constrained_coords`]. Total on finite input; the result is
/// clamped to the nearest representable value strictly inside the interval when
/// `|p|` is so large that the exact value rounds onto a limit.
pub fn from_constrained_coords(p: f64, b: &ConstraintBounds) -> f64 {
    let s = b.lower + b.upper;
    let w = if p >= 0.0 {
        b.upper - s / (1.0 + p.exp())
    } else {
        s / (1.0 + (-p).exp()) - b.lower
    };
    if w >= b.upper {
        b.upper.next_down()
    } else if w <= -b.lower {
        (-b.lower).next_up()
    } else {
        w
    }
}

/// Derivative of the transform with respect to the physical state,
/// `(lower + upper) / ((lower + w)(upper - w))`. Multiplies `dw/dt` to give the
/// rate of the transformed coordinate.
pub fn transform_gain(w: f64, b: &ConstraintBounds) -> Result<f64> {
    b.check(w)?;
    Ok((b.lower + b.upper) / ((b.lower + w) * (b.upper - w)))
}
