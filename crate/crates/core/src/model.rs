//! The traveling-wave ODE, its reduced `d = 0` limit and the spectrum of the
//! line of fixed points `(0, 0, K, 0)`.
//!
//! In the moving frame `x = z - c t` a wave `(a, i)` solves
//!
//! ```text
//! a'' = a (a + i) - a - c a'
//! d i'' = -(c i' + r a + a (a + i))
//! ```
//!
//! written here as a first-order system in `(a, a', i, i')`.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Distance to `K = 1` or `K = 1 - c²/4` below which the linearization is
/// treated as degenerate.
pub const BIFURCATION_TOL: f64 = 1e-9;

/// Wave speed `c`, inactive diffusion `d` and branching rate `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub c: f64,
    pub d: f64,
    pub r: f64,
}

impl ModelParams {
    /// Validates `c > 0`, `d ≥ 0`, `r ≥ 0`.
    pub fn new(c: f64, d: f64, r: f64) -> Result<Self> {
        if !(c.is_finite() && d.is_finite() && r.is_finite()) {
            return Err(Error::Domain(format!("non-finite parameters c={c}, d={d}, r={r}")));
        }
        if c <= 0.0 {
            return Err(Error::Domain(format!("wave speed must be positive, got c={c}")));
        }
        if d < 0.0 {
            return Err(Error::Domain(format!("diffusion must be non-negative, got d={d}")));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("branching rate must be non-negative, got r={r}")));
        }
        Ok(Self { c, d, r })
    }

    /// The three upper bounds on `d` under which invading fronts exist.
    pub fn d_bounds(&self) -> [(&'static str, f64); 3] {
        [("1", 1.0), ("3c/2", 1.5 * self.c), ("c^2/(2(r+1))", self.c * self.c / (2.0 * (self.r + 1.0)))]
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }

    /// Like [`is_admissible`](Self::is_admissible) but names the violated bound.
    pub fn check_admissible(&self) -> Result<()> {
        if self.d <= 0.0 {
            return Err(Error::Inadmissible { bound: "0 <", d: self.d, limit: 0.0 });
        }
        for (bound, limit) in self.d_bounds() {
            if self.d >= limit {
                return Err(Error::Inadmissible { bound, d: self.d, limit });
            }
        }
        Ok(())
    }
}

/// Phase-space point `(a, a', i, i')`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct WaveState {
    pub a: f64,
    pub a_prime: f64,
    pub i: f64,
    pub i_prime: f64,
}

impl WaveState {
    pub const fn new(a: f64, a_prime: f64, i: f64, i_prime: f64) -> Self {
        Self { a, a_prime, i, i_prime }
    }

    pub fn fixed_point(k: f64) -> Self {
        Self::new(0.0, 0.0, k, 0.0)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.a_prime, self.i, self.i_prime]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Right-hand side of the full wave system on raw slices; `d > 0` is assumed.
#[inline]
pub fn sd_rhs(p: &ModelParams, y: &[f64], dy: &mut [f64]) {
    let (a, b, i, j) = (y[0], y[1], y[2], y[3]);
    let react = a * (a + i);
    dy[0] = b;
    dy[1] = react - a - p.c * b;
    dy[2] = j;
    dy[3] = -(p.c * j + p.r * a + react) / p.d;
}

/// Right-hand side of the reduced system on `(a, a', i)`.
#[inline]
pub fn s0_rhs(p: &ModelParams, y: &[f64], dy: &mut [f64]) {
    let (a, b, i) = (y[0], y[1], y[2]);
    dy[0] = b;
    dy[1] = a * (a + i) - a - p.c * b;
    dy[2] = -a * (a + i + p.r) / p.c;
}

/// The `i'` value on the slow manifold of the reduced system.
#[inline]
pub fn slow_i_prime(a: f64, i: f64, p: &ModelParams) -> f64 {
    -a * (a + i + p.r) / p.c
}

pub fn vector_field_sd(state: &WaveState, params: &ModelParams) -> Result<WaveState> {
    if params.d <= 0.0 {
        return Err(Error::Unsupported("full wave system needs d > 0; use the reduced system"));
    }
    if !state.is_finite() {
        return Err(Error::Domain(format!("non-finite state {state:?}")));
    }
    let mut dy = [0.0; 4];
    sd_rhs(params, &state.to_array(), &mut dy);
    Ok(WaveState::from_slice(&dy))
}

pub fn vector_field_s0(state: [f64; 3], params: &ModelParams) -> Result<[f64; 3]> {
    if !state.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!("non-finite state {state:?}")));
    }
    let mut dy = [0.0; 3];
    s0_rhs(params, &state, &mut dy);
    Ok(dy)
}

/// Jacobian of the full wave field at `state`.
pub fn jacobian_sd(state: &WaveState, p: &ModelParams) -> [[f64; 4]; 4] {
    let (a, i) = (state.a, state.i);
    [
        [0.0, 1.0, 0.0, 0.0],
        [2.0 * a + i - 1.0, -p.c, a, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-(p.r + 2.0 * a + i) / p.d, 0.0, -a / p.d, -p.c / p.d],
    ]
}

/// Eigenvalues and eigenvectors of the linearization at `(0, 0, K, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointSpectrum {
    pub k: f64,
    /// `λ₁ = 0`, `λ₂ = -c/d`, `λ₃ ≤ λ₄` the roots of `μ² + cμ - (K-1) = 0`.
    pub lambdas: [C64; 4],
    /// Unit eigenvectors, phase fixed so that the largest-index rule in
    /// [`normalize_eigvec`] gives a positive real leading component.
    pub eigvecs: [[C64; 4]; 4],
    /// `λ₃, λ₄` are complex (`K < 1 - c²/4`): trajectories spiral into the fixed point.
    pub spiraling: bool,
}

/// Unit Euclidean norm; the `a`-component is made real positive when it is
/// non-zero, otherwise the largest component is.
pub fn normalize_eigvec(v: [C64; 4]) -> [C64; 4] {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = if v[0].norm() > 1e-14 * norm {
        v[0]
    } else {
        *v.iter().max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap_or(core::cmp::Ordering::Equal)).unwrap()
    };
    let phase = pivot / pivot.norm();
    let scale = phase.conj() / norm;
    v.map(|z| z * scale)
}

pub fn fixed_point_spectrum(k: f64, params: &ModelParams) -> Result<FixedPointSpectrum> {
    let ModelParams { c, d, r } = *params;
    if d <= 0.0 {
        return Err(Error::Unsupported("fixed-point spectrum of the full system needs d > 0"));
    }
    if !k.is_finite() {
        return Err(Error::Domain(format!("non-finite K = {k}")));
    }
    if (k - 1.0).abs() < BIFURCATION_TOL || (k - (1.0 - c * c / 4.0)).abs() < BIFURCATION_TOL {
        return Err(Error::BifurcationPoint { k });
    }
    let disc = C64::new(c * c / 4.0 + k - 1.0, 0.0);
    let root = disc.sqrt();
    let l3 = C64::new(-c / 2.0, 0.0) - root;
    let l4 = C64::new(-c / 2.0, 0.0) + root;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let wave_vec = |l: C64| [-(l * c) - l * l * d, -(l * l * c) - l * l * l * d, C64::new(k + r, 0.0), l * (k + r)];
    let eigvecs = [
        normalize_eigvec([zero, zero, one, zero]),
        normalize_eigvec([zero, zero, C64::new(-d / c, 0.0), one]),
        normalize_eigvec(wave_vec(l3)),
        normalize_eigvec(wave_vec(l4)),
    ];
    Ok(FixedPointSpectrum { k, lambdas: [zero, C64::new(-c / d, 0.0), l3, l4], eigvecs, spiraling: disc.re < 0.0 })
}

/// Unit tangent of the non-negative branch of the one-dimensional unstable
/// manifold of `(0, 0, K, 0)`: positive `a`, decreasing `i`.
pub fn unstable_branch_direction(k: f64, params: &ModelParams) -> Result<[f64; 4]> {
    let ModelParams { c, d, r } = *params;
    if k <= 1.0 {
        return Err(Error::Domain(format!("no unstable direction for K = {k} <= 1")));
    }
    if d <= 0.0 {
        return Err(Error::Unsupported("unstable direction of the full system needs d > 0"));
    }
    if (k - 1.0).abs() < BIFURCATION_TOL {
        return Err(Error::BifurcationPoint { k });
    }
    let l4 = -c / 2.0 + (c * c / 4.0 + k - 1.0).sqrt();
    let v = [c * l4 + d * l4 * l4, c * l4 * l4 + d * l4 * l4 * l4, -(k + r), -l4 * (k + r)];
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(v.map(|x| x / n))
}

/// Unstable rate `λ₄ = -c/2 + √(c²/4 + K - 1)`; also the left decay rate `μ₋∞`
/// of a wave with `i₋∞ = K`.
pub fn unstable_rate(k: f64, c: f64) -> f64 {
    -c / 2.0 + (c * c / 4.0 + k - 1.0).sqrt()
}

/// Unit tangent of the non-negative unstable branch of the reduced system.
pub fn reduced_unstable_direction(k: f64, params: &ModelParams) -> Result<[f64; 3]> {
    if k <= 1.0 {
        return Err(Error::Domain(format!("no unstable direction for K = {k} <= 1")));
    }
    let l4 = unstable_rate(k, params.c);
    let v = [1.0, l4, -(k + params.r) / (params.c * l4)];
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(v.map(|x| x / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(j: &[[f64; 4]; 4], v: &[C64; 4]) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for (row, o) in j.iter().zip(out.iter_mut()) {
            for (m, x) in row.iter().zip(v) {
                *o += *x * *m;
            }
        }
        out
    }

    #[test]
    fn fixed_points_are_stationary() {
        let p = ModelParams::new(2.0, 0.3, 1.0).unwrap();
        for k in [-3.0, 0.0, 1.0, 1.7, 4.2] {
            let f = vector_field_sd(&WaveState::fixed_point(k), &p).unwrap();
            assert_eq!(f, WaveState::default());
            assert_eq!(vector_field_s0([0.0, 0.0, k], &p).unwrap(), [0.0; 3]);
        }
    }

    #[test]
    fn hand_evaluated_fields() {
        let p = ModelParams::new(2.0, 1.0, 0.0).unwrap();
        let f = vector_field_sd(&WaveState::new(1.0, 0.0, 0.0, 0.0), &p).unwrap();
        assert_eq!(f, WaveState::new(0.0, 0.0, 0.0, -1.0));
        let g = vector_field_s0([1.0, 0.0, 1.0], &p).unwrap();
        assert_eq!(g, [0.0, 1.0, -1.0]);
    }

    #[test]
    fn a_zero_kills_reaction() {
        let p = ModelParams::new(2.0, 0.25, 1.0).unwrap();
        let f = vector_field_sd(&WaveState::new(0.0, 0.3, 1.4, -0.2), &p).unwrap();
        assert_eq!(f.a, 0.3);
        assert_eq!(f.a_prime, -2.0 * 0.3);
        assert!((f.i_prime - (2.0 * 0.2 / 0.25)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_state_rejected() {
        let p = ModelParams::new(2.0, 0.25, 1.0).unwrap();
        assert!(vector_field_sd(&WaveState::new(f64::NAN, 0.0, 0.0, 0.0), &p).is_err());
        assert!(vector_field_s0([0.0, f64::INFINITY, 0.0], &p).is_err());
        let p0 = ModelParams::new(2.0, 0.0, 1.0).unwrap();
        assert!(matches!(vector_field_sd(&WaveState::default(), &p0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn admissibility_names_bound() {
        assert!(ModelParams::new(2.0, 0.3, 1.0).unwrap().is_admissible());
        let err = ModelParams::new(2.0, 2.0, 0.0).unwrap().check_admissible().unwrap_err();
        assert!(matches!(err, Error::Inadmissible { bound: "1", .. }));
        let err = ModelParams::new(1.0, 0.6, 0.0).unwrap().check_admissible().unwrap_err();
        assert!(matches!(err, Error::Inadmissible { bound: "c^2/(2(r+1))", .. }));
        assert!(ModelParams::new(-1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn spectrum_example_c2_d05_k2() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let s = fixed_point_spectrum(2.0, &p).unwrap();
        let sq2 = 2f64.sqrt();
        let expect = [0.0, -4.0, -1.0 - sq2, -1.0 + sq2];
        for (l, e) in s.lambdas.iter().zip(expect) {
            assert!((l.re - e).abs() < 1e-14 && l.im == 0.0);
        }
        assert!(!s.spiraling);
        let e2 = s.eigvecs[1];
        let ratio = e2[2] / e2[3];
        assert!((ratio.re + 0.25).abs() < 1e-14);
        assert_eq!(e2[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn eigen_residuals() {
        let p = ModelParams::new(2.3, 0.4, 0.7).unwrap();
        for k in [-2.0, 0.5, 1.3, 1.9] {
            let s = fixed_point_spectrum(k, &p).unwrap();
            let j = jacobian_sd(&WaveState::fixed_point(k), &p);
            for (l, v) in s.lambdas.iter().zip(&s.eigvecs) {
                let jv = mat_vec(&j, v);
                let res: f64 = jv.iter().zip(v).map(|(a, b)| (*a - *b * *l).norm()).sum();
                assert!(res < 1e-10, "K={k} λ={l} residual {res}");
            }
        }
    }

    #[test]
    fn complex_branch_is_flagged() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let s = fixed_point_spectrum(-0.5, &p).unwrap();
        assert!(s.spiraling);
        assert!(s.lambdas[3].im.abs() > 0.0);
        assert!((s.lambdas[2] - s.lambdas[3].conj()).norm() < 1e-14);
    }

    #[test]
    fn bifurcation_points_rejected() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        assert!(matches!(fixed_point_spectrum(1.0, &p), Err(Error::BifurcationPoint { .. })));
        assert!(matches!(fixed_point_spectrum(0.0 + 5e-10, &p), Err(Error::BifurcationPoint { .. })));
        let p0 = ModelParams::new(2.0, 0.0, 0.0).unwrap();
        assert!(matches!(fixed_point_spectrum(1.5, &p0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lambda4_vanishes_at_k_one() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
            let l4 = fixed_point_spectrum(1.0 + eps, &p).unwrap().lambdas[3].re;
            assert!(l4 > 0.0 && l4 < prev);
            prev = l4;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn unstable_direction_sign_pattern() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let v = unstable_branch_direction(2.0, &p).unwrap();
        let l4 = 2f64.sqrt() - 1.0;
        let raw = [2.0 * l4 + 0.5 * l4 * l4, 2.0 * l4 * l4 + 0.5 * l4.powi(3), -2.0, -2.0 * l4];
        let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (x, y) in v.iter().zip(raw) {
            assert!((x - y / n).abs() < 1e-15);
        }
        assert!(unstable_branch_direction(0.9, &p).is_err());
        assert!(unstable_branch_direction(1.0, &p).is_err());
    }
}
