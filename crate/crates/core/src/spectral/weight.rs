#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Exponential weight `w(x) = exp(-x·α(x))` with `α ≡ α₋` for `x ≤ -1`,
/// `α ≡ α₊` for `x ≥ 1` and a quintic smoothstep blend in between, so that
/// `w'/w` and `w''/w` are continuous.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

/// `(w, w'/w, w''/w)` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightValue {
    pub w: f64,
    pub wp_over_w: f64,
    pub wpp_over_w: f64,
}

impl WeightSpec {
    pub fn new(alpha_minus: f64, alpha_plus: f64) -> Result<Self> {
        if !(alpha_minus > 0.0 && alpha_minus <= 1.0) {
            return Err(Error::Domain(alloc::format!("alpha_minus must lie in (0, 1], got {alpha_minus}")));
        }
        if !(alpha_plus > 0.0 && alpha_plus.is_finite()) {
            return Err(Error::Domain(alloc::format!("alpha_plus must be positive, got {alpha_plus}")));
        }
        Ok(Self { alpha_minus, alpha_plus })
    }

    /// `w(x) = e^{-x}` on the whole line.
    pub fn exponential() -> Self {
        Self { alpha_minus: 1.0, alpha_plus: 1.0 }
    }

    /// Critical-front weight: `α₊ = 1` and the given left exponent.
    pub fn critical(alpha_minus: f64) -> Result<Self> {
        Self::new(alpha_minus, 1.0)
    }

    /// Exponent `α(x)` with its first two derivatives.
    fn exponent(&self, x: f64) -> (f64, f64, f64) {
        let jump = self.alpha_plus - self.alpha_minus;
        if x <= -1.0 || jump == 0.0 {
            return (self.alpha_minus, 0.0, 0.0);
        }
        if x >= 1.0 {
            return (self.alpha_plus, 0.0, 0.0);
        }
        let t = 0.5 * (x + 1.0);
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        let dds = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (self.alpha_minus + jump * s, 0.5 * jump * ds, 0.25 * jump * dds)
    }

    pub fn eval(&self, x: f64) -> WeightValue {
        let (alpha, da, dda) = self.exponent(x);
        let g1 = -alpha - x * da;
        let g2 = -2.0 * da - x * dda;
        WeightValue { w: (-x * alpha).exp(), wp_over_w: g1, wpp_over_w: g2 + g1 * g1 }
    }

    /// Exponent on the given side: `α₋` for `-∞`, `α₊` for `+∞`.
    pub fn alpha(&self, side: super::Side) -> f64 {
        match side {
            super::Side::Minus => self.alpha_minus,
            super::Side::Plus => self.alpha_plus,
        }
    }
}

/// Shorthand for [`WeightSpec::eval`].
pub fn weight_eval(x: f64, spec: &WeightSpec) -> WeightValue {
    spec.eval(x)
}
