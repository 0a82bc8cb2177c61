use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::shoot::{is_positive_wave, shoot, ShootOptions, ShotKind, ShotOutcome};
use crate::model::{self, ModelParams};
use crate::ode::integrate;
use crate::{Error, Result};

/// Half-width of the stored profile window.
pub const PROFILE_HALF_WIDTH: f64 = 50.0;
/// Spacing of the stored profile grid.
pub const PROFILE_STEP: f64 = 0.05;
/// Right end of the far-tail continuation.
pub const FAR_TAIL_END: f64 = 150.0;
const FAR_TAIL_STEP: f64 = 0.5;

/// A sampled heteroclinic orbit, centred so that `a'(0) = 0` at the maximum of `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveProfile {
    pub params: ModelParams,
    /// `i₋∞`.
    pub k: f64,
    pub grid: Vec<f64>,
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub i: Vec<f64>,
    pub i_prime: Vec<f64>,
    pub i_plus: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub critical: bool,
    /// Location of the maximum of `a` in the shooting frame.
    pub max_x: f64,
    /// Left end of the integrated part, in profile coordinates; samples to
    /// the left come from the linearized unstable manifold.
    pub integrated_from: f64,
    /// `(x, ln a)` beyond the grid, integrated with relative error control
    /// only. Empty for profiles read back from disk.
    pub far_tail: Vec<[f64; 2]>,
}

impl WaveProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn node(&self, k: usize) -> [f64; 4] {
        [self.a[k], self.a_prime[k], self.i[k], self.i_prime[k]]
    }

    fn node_derivative(&self, k: usize) -> [f64; 4] {
        let mut dy = [0.0; 4];
        if self.params.d > 0.0 {
            model::sd_rhs(&self.params, &self.node(k), &mut dy);
        } else {
            // Reduced profile: i' is slaved, i'' from the chain rule.
            let y = self.node(k);
            model::s0_rhs(&self.params, &y[..3], &mut dy[..3]);
            let (a, ap, i, ip) = (y[0], y[1], y[2], dy[2]);
            dy[3] = -(ap * (2.0 * a + i + self.params.r) + a * ip) / self.params.c;
        }
        dy
    }

    /// Cubic Hermite interpolation of `(a, a', i, i')` using the wave field
    /// for nodal derivatives. Outside the grid the tails are continued with
    /// their exponential rates.
    pub fn sample(&self, x: f64) -> [f64; 4] {
        let n = self.grid.len();
        let (x0, h) = (self.grid[0], self.step());
        if x <= x0 {
            let s = (self.mu_minus * (x - x0)).exp();
            let y = self.node(0);
            return [y[0] * s, y[1] * s, self.k - (self.k - y[2]) * s, y[3] * s];
        }
        if x >= self.grid[n - 1] {
            let s = (-self.mu_plus.max(0.0) * (x - self.grid[n - 1])).exp();
            let y = self.node(n - 1);
            return [y[0] * s, y[1] * s, self.i_plus + (y[2] - self.i_plus) * s, y[3] * s];
        }
        let k = (((x - x0) / h).floor() as usize).min(n - 2);
        let t = (x - self.grid[k]) / h;
        let (y0, y1) = (self.node(k), self.node(k + 1));
        let (f0, f1) = (self.node_derivative(k), self.node_derivative(k + 1));
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let mut out = [0.0; 4];
        for j in 0..4 {
            out[j] = h00 * y0[j] + h10 * h * f0[j] + h01 * y1[j] + h11 * h * f1[j];
        }
        out
    }

    /// Index of the grid node nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let k = ((x - self.grid[0]) / self.step()).round();
        (k.max(0.0) as usize).min(self.grid.len() - 1)
    }
}

/// Resamples a converged (or at least non-negative) shot into a centred
/// profile on `[-half_width, half_width]`.
pub fn build_profile_from_shot(
    shot: &ShotOutcome,
    params: &ModelParams,
    opts: &ShootOptions,
    half_width: f64,
    step: f64,
) -> Result<WaveProfile> {
    let x_peak = shot
        .a_max_x
        .ok_or_else(|| Error::Numeric(alloc::format!("shot at K = {} never reached a maximum of a", shot.k)))?;
    let p = *params;
    let x_end = x_peak + half_width + 1.0;
    let cfg = crate::ode::IntegratorConfig {
        abs_tol: 1e-30,
        max_step: opts.integrator.max_step.min(0.25),
        ..opts.integrator
    };
    let traj = integrate(|_, y, dy| model::sd_rhs(&p, y, dy), &shot.start, (0.0, x_end), &cfg, &[])?;
    if traj.last_time() < x_end {
        return Err(Error::Numeric(alloc::format!(
            "profile integration stopped early at x = {} ({:?})",
            traj.last_time(),
            traj.termination
        )));
    }

    // Refine the peak location on the dense output.
    let x_peak = crate::roots::brent(
        |x| traj.interpolate(x).map(|y| y[1]).unwrap_or(f64::NAN),
        (x_peak - 0.5).max(0.0),
        (x_peak + 0.5).min(x_end),
        1e-13,
        200,
    )
    .unwrap_or(x_peak);

    let n = (2.0 * half_width / step).round() as usize + 1;
    let lambda4 = model::unstable_rate(shot.k, params.c);
    let dir = model::unstable_branch_direction(shot.k, params)?;
    let mut profile = WaveProfile {
        params: *params,
        k: shot.k,
        grid: Vec::with_capacity(n),
        a: Vec::with_capacity(n),
        a_prime: Vec::with_capacity(n),
        i: Vec::with_capacity(n),
        i_prime: Vec::with_capacity(n),
        i_plus: shot.i_plus.unwrap_or(f64::NAN),
        mu_minus: lambda4,
        mu_plus: f64::NAN,
        critical: false,
        max_x: x_peak,
        integrated_from: -x_peak,
        far_tail: Vec::new(),
    };
    let mut buf = [0.0; 4];
    for j in 0..n {
        let x = -half_width + step * j as f64;
        let xs = x + x_peak;
        if xs < 0.0 {
            let s = opts.epsilon * (lambda4 * xs).exp();
            buf = [s * dir[0], s * dir[1], shot.k + s * dir[2], s * dir[3]];
        } else {
            traj.interpolate_into(xs, &mut buf);
        }
        profile.grid.push(x);
        profile.a.push(buf[0]);
        profile.a_prime.push(buf[1]);
        profile.i.push(buf[2]);
        profile.i_prime.push(buf[3]);
    }
    profile.far_tail = far_tail(&traj, x_peak, half_width, &p, &cfg)?;
    if !profile.i_plus.is_finite() {
        profile.i_plus = super::shoot::extrapolate_i_plus(traj.last_state(), params);
    }
    let rates = super::checks::measure_decay_rates(&profile)?;
    profile.mu_minus = rates.mu_minus;
    profile.mu_plus = rates.mu_plus;
    profile.critical = rates.critical;
    Ok(profile)
}

/// Continues the orbit past the grid. Every component keeps its sign there,
/// so the absolute tolerance can be dropped and the tail resolved far below
/// the underflow of an absolute criterion.
fn far_tail(
    traj: &crate::ode::Trajectory,
    x_peak: f64,
    half_width: f64,
    p: &ModelParams,
    cfg: &crate::ode::IntegratorConfig,
) -> Result<Vec<[f64; 2]>> {
    let x0 = x_peak + half_width;
    let Some(y0) = traj.interpolate(x0) else {
        return Ok(Vec::new());
    };
    if y0[0] <= 0.0 || y0[1] >= 0.0 {
        return Ok(Vec::new());
    }
    let cfg = crate::ode::IntegratorConfig { abs_tol: 1e-300, ..*cfg };
    let tail = integrate(|_, y, dy| model::sd_rhs(p, y, dy), &y0, (x0, x_peak + FAR_TAIL_END), &cfg, &[])?;
    let mut out = Vec::new();
    let mut buf = [0.0; 4];
    let mut x = half_width;
    while x <= FAR_TAIL_END && tail.interpolate_into(x + x_peak, &mut buf) {
        if buf[0] <= 0.0 {
            break;
        }
        out.push([x, buf[0].ln()]);
        x += FAR_TAIL_STEP;
    }
    Ok(out)
}

/// Shoots at `K` and builds the centred profile; the shot must converge.
pub fn build_profile(k: f64, params: &ModelParams, opts: &ShootOptions) -> Result<WaveProfile> {
    let shot = shoot(k, params, opts)?;
    if shot.kind != ShotKind::Converged {
        return Err(Error::Numeric(alloc::format!("shot at K = {k} ended as {:?}", shot.kind)));
    }
    build_profile_from_shot(&shot, params, opts, PROFILE_HALF_WIDTH, PROFILE_STEP)
}

/// Bracket and tolerance for [`find_invading_front`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontSearch {
    pub k_lo: f64,
    pub k_hi: f64,
    pub k_tol: f64,
    pub shoot: ShootOptions,
}

impl Default for FrontSearch {
    fn default() -> Self {
        Self { k_lo: 1.5, k_hi: 2.0, k_tol: 1e-6, shoot: ShootOptions::default() }
    }
}

/// Outcome of the bisection, before profile construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontBracket {
    pub k_lo: f64,
    pub k_hi: f64,
    pub i_plus_lo: f64,
    pub shots: usize,
}

impl FrontBracket {
    pub fn k_star(&self) -> f64 {
        0.5 * (self.k_lo + self.k_hi)
    }
}

/// Bisects on `i₋∞ = K` until `i₊∞` vanishes, returning the final bracket.
///
/// `i₊∞` is expected to decrease with `K`; an increase observed at the lower
/// end is reported as [`Error::NonMonotone`].
pub fn bisect_front(params: &ModelParams, search: &FrontSearch) -> Result<FrontBracket> {
    params.check_admissible()?;
    let (mut lo, mut hi) = (search.k_lo, search.k_hi);
    if !(lo > 1.0 && hi > lo) {
        return Err(Error::Domain(alloc::format!("front bracket must satisfy 1 < K_lo < K_hi, got ({lo}, {hi})")));
    }
    let classify = |k: f64| -> Result<(bool, ShotOutcome)> {
        let s = shoot(k, params, &search.shoot)?;
        match is_positive_wave(&s) {
            Some(b) => Ok((b, s)),
            None => Err(Error::Undecided { k, detail: "shot neither converged nor went negative" }),
        }
    };
    let (lo_ok, lo_shot) = classify(lo)?;
    let (hi_ok, hi_shot) = classify(hi)?;
    if !lo_ok || hi_ok {
        let describe = |s: &ShotOutcome| alloc::format!("{:?} (i_plus {:?})", s.kind, s.i_plus);
        return Err(Error::Bracket {
            lo,
            hi,
            detail: alloc::format!("K_lo shot {}, K_hi shot {}", describe(&lo_shot), describe(&hi_shot)),
        });
    }
    let mut i_plus_lo = lo_shot.i_plus.unwrap();
    let mut shots = 2;
    while hi - lo >= search.k_tol {
        let mid = 0.5 * (lo + hi);
        let (ok, s) = classify(mid)?;
        shots += 1;
        if ok {
            let ip = s.i_plus.unwrap();
            if ip > i_plus_lo + 1e-7 {
                return Err(Error::NonMonotone { k_prev: lo, k_next: mid });
            }
            lo = mid;
            i_plus_lo = ip;
        } else {
            hi = mid;
        }
    }
    Ok(FrontBracket { k_lo: lo, k_hi: hi, i_plus_lo, shots })
}

/// Finds the invading front (`i₊∞ = 0`) and returns its centred profile,
/// built from the non-negative end of the final bracket.
pub fn find_invading_front(params: &ModelParams, search: &FrontSearch) -> Result<WaveProfile> {
    let bracket = bisect_front(params, search)?;
    let shot = shoot(bracket.k_lo, params, &search.shoot)?;
    build_profile_from_shot(&shot, params, &search.shoot, PROFILE_HALF_WIDTH, PROFILE_STEP)
}
