use super::matrix::{EvansSystem, LimitMode};
use super::Side;
use crate::linalg::{det4, inner, mat_vec, qr_frame, Frame, Mat4, ZERO};
use crate::ode::{integrate_complex, IntegratorConfig, Termination};
use crate::{Error, Result, C64};

/// Spatial eigenvalues with `|Re μ|` below this count as purely imaginary.
pub const SPLITTING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvansOptions {
    /// Frames start at `x = ∓half_width`.
    pub half_width: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Length of the pieces between re-orthonormalizations.
    pub segment: f64,
    /// Optional change of basis `G` applied to both initial frames; the
    /// Evans function then scales by `det(G)²`.
    pub basis_rotation: Option<[[C64; 2]; 2]>,
}

impl Default for EvansOptions {
    fn default() -> Self {
        Self { half_width: 50.0, rel_tol: 1e-9, abs_tol: 1e-11, segment: 5.0, basis_rotation: None }
    }
}

/// Dimensions `(k₁, k₂)`: unstable modes at `-∞` and stable modes at `+∞`.
///
/// Errors with [`Error::SpectralRegion`] unless `k₁ + k₂ = 4` with no
/// spatial eigenvalue on the imaginary axis.
pub fn consistent_splitting_dims<S: EvansSystem + ?Sized>(system: &S, lambda: C64) -> Result<(usize, usize)> {
    let minus = system.limit_modes(Side::Minus, lambda)?;
    let plus = system.limit_modes(Side::Plus, lambda)?;
    let k1 = minus.iter().filter(|m| m.mu.re > SPLITTING_TOL).count();
    let k2 = plus.iter().filter(|m| m.mu.re < -SPLITTING_TOL).count();
    let on_axis = minus.iter().chain(&plus).any(|m| m.mu.re.abs() <= SPLITTING_TOL);
    if k1 + k2 != 4 || on_axis {
        return Err(Error::SpectralRegion { lambda, k1, k2 });
    }
    Ok((k1, k2))
}

/// Indices of the decaying modes on `side`, in their original order.
fn decaying_modes(modes: &[LimitMode; 4], side: Side, k: usize) -> alloc::vec::Vec<usize> {
    let growth = |m: &LimitMode| match side {
        Side::Minus => m.mu.re,
        Side::Plus => -m.mu.re,
    };
    let mut idx: alloc::vec::Vec<usize> = (0..4).collect();
    idx.sort_by(|&a, &b| growth(&modes[b]).partial_cmp(&growth(&modes[a])).unwrap());
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

fn rotate(frame: Frame, g: &[[C64; 2]; 2]) -> Frame {
    let mut out = [[ZERO; 4]; 2];
    for (j, col) in out.iter_mut().enumerate() {
        for (k, entry) in col.iter_mut().enumerate() {
            *entry = frame[0][k] * g[0][j] + frame[1][k] * g[1][j];
        }
    }
    out
}

/// Orthonormal frame of the decaying subspace on `side` transported to
/// `x = 0`, together with the log of the analytic normalization.
struct SideFrame {
    frame: Frame,
    log_scale: C64,
}

fn transport<S: EvansSystem + ?Sized>(system: &S, lambda: C64, side: Side, opts: &EvansOptions) -> Result<SideFrame> {
    let modes = system.limit_modes(side, lambda)?;
    let idx = decaying_modes(&modes, side, 2);
    let mut frame: Frame = [modes[idx[0]].vector, modes[idx[1]].vector];
    if let Some(g) = &opts.basis_rotation {
        frame = rotate(frame, g);
    }
    let mu_sum = modes[idx[0]].mu + modes[idx[1]].mu;
    let (mut q, r) = qr_frame(&frame);
    let mut log_scale = (r[0] * r[1]).ln();

    // Integrate in s with x = sign·s from s = -L to 0.
    let sign = match side {
        Side::Minus => 1.0,
        Side::Plus => -1.0,
    };
    let cfg = IntegratorConfig {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_step: opts.segment,
        max_steps: 200_000,
        initial_step: None,
        divergence_radius: 1e12,
    };
    let field = |s: f64, y: &[C64], dy: &mut [C64]| {
        let a: Mat4 = system.matrix(sign * s, lambda);
        let q0: [C64; 4] = [y[0], y[1], y[2], y[3]];
        let q1: [C64; 4] = [y[4], y[5], y[6], y[7]];
        let aq = [mat_vec(&a, &q0), mat_vec(&a, &q1)];
        let cols = [q0, q1];
        let m = [[inner(&q0, &aq[0]), inner(&q0, &aq[1])], [inner(&q1, &aq[0]), inner(&q1, &aq[1])]];
        for j in 0..2 {
            for k in 0..4 {
                dy[4 * j + k] = (aq[j][k] - cols[0][k] * m[0][j] - cols[1][k] * m[1][j]) * sign;
            }
        }
        dy[8] = (m[0][0] + m[1][1] - mu_sum) * sign;
    };
    let mut s = -opts.half_width;
    while s < 0.0 {
        let s_end = (s + opts.segment).min(0.0);
        let mut y0 = [ZERO; 9];
        y0[..4].copy_from_slice(&q[0]);
        y0[4..8].copy_from_slice(&q[1]);
        let traj = integrate_complex(field, &y0, (s, s_end), &cfg, &[])?;
        if traj.termination != Termination::ReachedEnd {
            return Err(Error::Numeric(alloc::format!(
                "frame transport stopped early ({:?}) at lambda = {lambda}",
                traj.termination
            )));
        }
        let y = traj.state_complex(traj.len() - 1);
        let raw: Frame = [[y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]]];
        let (qn, rn) = qr_frame(&raw);
        q = qn;
        log_scale += y[8] + (rn[0] * rn[1]).ln();
        s = s_end;
    }
    Ok(SideFrame { frame: q, log_scale })
}

/// Evans function `det[X₁ X₂ Y₁ Y₂](0)` of the decaying subspaces, with
/// bases fixed by the analytic limit eigenvectors.
pub fn evans_function<S: EvansSystem + ?Sized>(system: &S, lambda: C64, opts: &EvansOptions) -> Result<C64> {
    if !(opts.half_width > 0.0 && opts.segment > 0.0) {
        return Err(Error::Config("Evans half-width and segment must be positive".into()));
    }
    let (k1, k2) = consistent_splitting_dims(system, lambda)?;
    if (k1, k2) != (2, 2) {
        return Err(Error::SpectralRegion { lambda, k1, k2 });
    }
    let minus = transport(system, lambda, Side::Minus, opts)?;
    let plus = transport(system, lambda, Side::Plus, opts)?;
    let cols = [minus.frame[0], minus.frame[1], plus.frame[0], plus.frame[1]];
    let mut m: Mat4 = [[ZERO; 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for (k, &v) in col.iter().enumerate() {
            m[k][j] = v;
        }
    }
    Ok(det4(&m) * (minus.log_scale + plus.log_scale).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::synthetic::PlantedSystem;

    fn planted_exact(lambda: C64) -> C64 {
        let k = lambda.sqrt();
        let q = (lambda + 1.0).sqrt();
        k * q * 4.0 * (C64::new(1.0, 0.0) - k) / (k + 1.0)
    }

    #[test]
    fn planted_system_matches_closed_form() {
        let sys = PlantedSystem;
        let opts = EvansOptions { half_width: 20.0, ..EvansOptions::default() };
        for lambda in [C64::new(0.5, 0.0), C64::new(2.0, 1.0), C64::new(0.01, -3.0), C64::new(6.0, 4.0)] {
            let e = evans_function(&sys, lambda, &opts).unwrap();
            let exact = planted_exact(lambda);
            assert!((e - exact).norm() < 1e-6 * exact.norm(), "{lambda}: {e} vs {exact}");
        }
        assert!(evans_function(&sys, C64::new(1.0, 0.0), &opts).unwrap().norm() < 1e-7);
    }

    #[test]
    fn basis_change_scales_by_det_squared() {
        let sys = PlantedSystem;
        let g = [[C64::new(0.6, 0.8), C64::new(0.3, -0.1)], [C64::new(-0.2, 0.5), C64::new(1.1, 0.0)]];
        let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let base = EvansOptions { half_width: 20.0, ..EvansOptions::default() };
        let rotated = EvansOptions { basis_rotation: Some(g), ..base };
        let lambda = C64::new(0.7, 2.5);
        let e0 = evans_function(&sys, lambda, &base).unwrap();
        let e1 = evans_function(&sys, lambda, &rotated).unwrap();
        assert!((e1 - e0 * det_g * det_g).norm() < 1e-7 * e0.norm());
    }

    #[test]
    fn rejects_lambda_on_essential_spectrum() {
        let err = evans_function(&PlantedSystem, C64::new(-2.0, 0.0), &EvansOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SpectralRegion { .. }));
    }
}
