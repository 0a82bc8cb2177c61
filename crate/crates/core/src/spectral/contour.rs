use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Boundary of `{Re λ ≥ 0, δ ≤ |λ| ≤ R}` traversed counterclockwise.
///
/// The parameter `τ ∈ [0, 4)` runs over four pieces: the big arc from `-iR`
/// to `iR`, the segment `iR → iδ` (log-spaced), the small arc `iδ → -iδ`
/// and the segment `-iδ → -iR`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub radius: f64,
    pub delta: f64,
    pub initial_points: usize,
    /// Refine until consecutive values differ in argument by less than this.
    pub max_arg_step: f64,
    pub max_points: usize,
}

impl ContourSpec {
    pub fn new(radius: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && radius > delta && radius.is_finite()) {
            return Err(Error::Domain(alloc::format!("contour needs 0 < delta < R, got delta {delta}, R {radius}")));
        }
        Ok(Self { radius, delta, initial_points: 256, max_arg_step: FRAC_PI_6, max_points: 16_384 })
    }

    pub fn point(&self, tau: f64) -> C64 {
        let (r, d) = (self.radius, self.delta);
        let piece = (tau.floor() as i64).clamp(0, 3);
        let t = tau - piece as f64;
        match piece {
            0 => C64::from_polar(r, -FRAC_PI_2 + PI * t),
            1 => C64::new(0.0, r * (d / r).powf(t)),
            2 => C64::from_polar(d, FRAC_PI_2 - PI * t),
            _ => C64::new(0.0, -d * (r / d).powf(t)),
        }
    }

    /// Evenly spaced parameters of the initial sampling; the closing point
    /// `τ = 4` is implied.
    pub fn initial_parameters(&self) -> Vec<f64> {
        let n = self.initial_points.max(8);
        (0..n).map(|k| 4.0 * k as f64 / n as f64).collect()
    }
}

/// Initial contour samples, closed (first point repeated at the end).
pub fn evans_contour(spec: &ContourSpec) -> Vec<C64> {
    let mut pts: Vec<C64> = spec.initial_parameters().into_iter().map(|t| spec.point(t)).collect();
    pts.push(pts[0]);
    pts
}

/// Adaptively refined contour with function values.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourTrace {
    /// Parameters in increasing order; the closing sample is implied.
    pub taus: Vec<f64>,
    pub lambdas: Vec<C64>,
    pub values: Vec<C64>,
    /// Whether every argument step ended below the target.
    pub resolved: bool,
}

impl ContourTrace {
    /// Values with the first one appended, ready for [`super::winding_number`].
    pub fn closed_values(&self) -> Vec<C64> {
        let mut v = self.values.clone();
        v.push(self.values[0]);
        v
    }

    pub fn closed_lambdas(&self) -> Vec<C64> {
        let mut v = self.lambdas.clone();
        v.push(self.lambdas[0]);
        v
    }

    pub fn max_arg_step(&self) -> f64 {
        let n = self.values.len();
        (0..n).map(|k| arg_step(self.values[k], self.values[(k + 1) % n])).fold(0.0, f64::max)
    }
}

pub(crate) fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg().abs()
}

/// Samples `f` along the contour, bisecting parameter intervals whose
/// endpoint values differ in argument by `spec.max_arg_step` or more.
///
/// `eval_many` receives batches of points so callers may evaluate in parallel.
pub fn trace_contour<F>(spec: &ContourSpec, mut eval_many: F) -> Result<ContourTrace>
where
    F: FnMut(&[C64]) -> Result<Vec<C64>>,
{
    let mut taus = spec.initial_parameters();
    let lambdas: Vec<C64> = taus.iter().map(|&t| spec.point(t)).collect();
    let mut values = eval_many(&lambdas)?;
    check_batch(&lambdas, &values)?;
    let mut lambdas = lambdas;
    loop {
        let n = taus.len();
        let coarse: Vec<usize> =
            (0..n).filter(|&k| arg_step(values[k], values[(k + 1) % n]) >= spec.max_arg_step).collect();
        if coarse.is_empty() {
            return Ok(ContourTrace { taus, lambdas, values, resolved: true });
        }
        if n + coarse.len() > spec.max_points {
            return Ok(ContourTrace { taus, lambdas, values, resolved: false });
        }
        let mids: Vec<f64> = coarse
            .iter()
            .map(|&k| {
                let next = if k + 1 == n { 4.0 } else { taus[k + 1] };
                0.5 * (taus[k] + next)
            })
            .collect();
        let new_lambdas: Vec<C64> = mids.iter().map(|&t| spec.point(t)).collect();
        let new_values = eval_many(&new_lambdas)?;
        check_batch(&new_lambdas, &new_values)?;
        let mut merged = Vec::with_capacity(n + mids.len());
        let mut j = 0;
        for k in 0..n {
            merged.push((taus[k], lambdas[k], values[k]));
            if j < coarse.len() && coarse[j] == k {
                merged.push((mids[j], new_lambdas[j], new_values[j]));
                j += 1;
            }
        }
        taus = merged.iter().map(|m| m.0).collect();
        lambdas = merged.iter().map(|m| m.1).collect();
        values = merged.iter().map(|m| m.2).collect();
    }
}

fn check_batch(lambdas: &[C64], values: &[C64]) -> Result<()> {
    if values.len() != lambdas.len() {
        return Err(Error::Numeric(alloc::format!(
            "evaluator returned {} values for {} points",
            values.len(),
            lambdas.len()
        )));
    }
    if let Some(k) = values.iter().position(|v| !(v.norm() > 0.0 && v.norm().is_finite())) {
        return Err(Error::Numeric(alloc::format!(
            "value {} at lambda = {} is zero or not finite",
            values[k],
            lambdas[k]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_join_and_close() {
        let spec = ContourSpec::new(17.0, 1e-3).unwrap();
        for k in 1..4 {
            let t = k as f64;
            assert!((spec.point(t - 1e-12) - spec.point(t)).norm() < 1e-9);
        }
        assert!((spec.point(0.0) - spec.point(4.0 - 1e-12)).norm() < 1e-9);
        assert!((spec.point(0.0) - C64::new(0.0, -17.0)).norm() < 1e-12);
        let pts = evans_contour(&spec);
        assert_eq!(pts.first(), pts.last());
        assert!(pts.iter().all(|z| z.re >= -1e-12 && z.norm() >= 1e-3 - 1e-12 && z.norm() <= 17.0 + 1e-9));
    }

    #[test]
    fn counterclockwise_orientation() {
        // Signed area of the closed polygon is positive.
        let pts = evans_contour(&ContourSpec::new(5.0, 0.1).unwrap());
        let area: f64 = pts.windows(2).map(|w| w[0].re * w[1].im - w[1].re * w[0].im).sum();
        assert!(area > 0.0);
    }

    #[test]
    fn refinement_resolves_fast_rotation() {
        let spec = ContourSpec::new(10.0, 1e-3).unwrap();
        // arg(λ^12) turns 12·π over the big arc.
        let trace = trace_contour(&spec, |ls| Ok(ls.iter().map(|l| l.powi(12)).collect())).unwrap();
        assert!(trace.resolved);
        assert!(trace.max_arg_step() < spec.max_arg_step);
        assert!(trace.taus.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_value_is_an_error() {
        let spec = ContourSpec::new(2.0, 0.5).unwrap();
        assert!(trace_contour(&spec, |ls| Ok(ls.iter().map(|l| l - C64::new(0.0, 2.0)).collect())).is_err());
    }
}
