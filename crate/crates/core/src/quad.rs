//! Adaptive Gauss–Kronrod quadrature and uniform-grid rules.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive GK15 on a finite interval: bisects the interval with
/// the largest error estimate until the total meets `abs_tol` or
/// `rel_tol·|value|`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature bounds must be finite; use integrate_semi_infinite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    pieces.push((a, b, v, e));
    let mut evals = 15;
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::Numeric("non-finite integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature { value, error, evaluations: evals });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Numeric(alloc::format!(
                "quadrature did not reach tolerance: estimate {value} ± {error}"
            )));
        }
        let (k, _) = pieces.iter().enumerate().max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap()).unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// `∫_a^∞ f` via the substitution `x = a + s/(1 - s)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    integrate_adaptive(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - s;
            let v = f(a + s / one_minus);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
        2000,
    )
}

/// Composite Simpson rule on uniform samples; an even number of panels is
/// required, otherwise the last panel uses the trapezoid rule.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let panels = n - 1;
    let even = panels - panels % 2;
    let mut s = 0.0;
    let mut k = 0;
    while k + 2 <= even {
        s += values[k] + 4.0 * values[k + 1] + values[k + 2];
        k += 2;
    }
    s *= h / 3.0;
    if even < panels {
        s += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    s
}

/// Trapezoid rule on possibly non-uniform abscissae.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Ordinary least squares fit `y ≈ intercept + slope·x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for k in 0..n {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if sxx == 0.0 {
        return Err(Error::Numeric("degenerate abscissae in linear fit".into()));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Residual sum of squares of a linear fit.
pub fn fit_rss(x: &[f64], y: &[f64], intercept: f64, slope: f64) -> f64 {
    x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate_adaptive(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-13, 1e-13, 10).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        let q = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 1e-12, 500).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((q.value - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let q = integrate_semi_infinite(|x| (-x * x).exp(), 0.0, 1e-13, 1e-12).unwrap();
        assert!((q.value - 0.5 * core::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn simpson_cubic_exact() {
        let h = 0.1;
        let v: Vec<f64> = (0..=20).map(|k| (k as f64 * h).powi(3)).collect();
        assert!((simpson_uniform(&v, h) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (b, m) = linear_fit(&x, &y).unwrap();
        assert!((b - 1.0).abs() < 1e-14 && (m - 2.0).abs() < 1e-14);
        assert!(linear_fit(&x[..1], &y[..1]).is_err());
    }
}
