use core::f64::consts::{FRAC_PI_2, PI};

use super::contour::arg_step;
use crate::{Error, Result, C64};

/// Steps at or above this are too coarse to attribute unambiguously.
pub const MAX_ARG_JUMP: f64 = FRAC_PI_2;

/// Winding number of the closed polyline through `values` about the origin
/// and the closure residual `|Δarg/2π - winding|`.
///
/// With `closed = false` the last value is joined back to the first.
pub fn winding_number(values: &[C64], closed: bool) -> Result<(i64, f64)> {
    if values.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: values.len() });
    }
    if let Some(k) = values.iter().position(|v| !(v.norm() > 0.0 && v.norm().is_finite())) {
        return Err(Error::Numeric(alloc::format!(
            "winding number needs nonzero finite values, got {} at {k}",
            values[k]
        )));
    }
    let n = values.len();
    let pairs = if closed { n - 1 } else { n };
    let mut total = 0.0;
    for k in 0..pairs {
        let (a, b) = (values[k], values[(k + 1) % n]);
        let step = (b / a).arg();
        if arg_step(a, b) >= MAX_ARG_JUMP {
            return Err(Error::RefinementNeeded { index: k, jump: step });
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let winding = num_traits::Float::round(turns);
    Ok((winding as i64, (turns - winding).abs()))
}
