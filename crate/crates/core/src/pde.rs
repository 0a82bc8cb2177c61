//! Explicit method-of-lines simulation of the two-species system in the lab
//! frame or in a frame moving with speed `c`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::ModelParams;
use crate::quad::{fit_rss, linear_fit};
use crate::spectral::WeightSpec;
use crate::wave::WaveProfile;
use crate::{Error, Result};

/// Uniform node-centred grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 16 || !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "grid needs n >= 16 and x_max > x_min, got [{x_min}, {x_max}] with n = {n}"
            )));
        }
        Ok(Self { x_min, x_max, n, dx: (x_max - x_min) / (n - 1) as f64 })
    }

    /// Grid with spacing as close to `dx` as divides the interval.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Domain(alloc::format!("grid spacing must be positive, got {dx}")));
        }
        Self::new(x_min, x_max, ((x_max - x_min) / dx).round() as usize + 1)
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.x(k))
    }

    /// Index of the node closest to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        (((x - self.x_min) / self.dx).round().max(0.0) as usize).min(self.n - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdeState {
    pub t: f64,
    pub a: Vec<f64>,
    pub i: Vec<f64>,
}

impl PdeState {
    pub fn from_fn(grid: &Grid1D, mut init: impl FnMut(f64) -> (f64, f64)) -> Self {
        let (a, i) = grid.nodes().map(&mut init).unzip();
        Self { t: 0.0, a, i }
    }

    /// Profile sampled on the grid (profile coordinates = grid coordinates).
    pub fn from_profile(grid: &Grid1D, profile: &WaveProfile) -> Self {
        Self::from_fn(grid, |x| {
            let y = profile.sample(x);
            (y[0], y[2])
        })
    }

    pub fn min_value(&self) -> f64 {
        self.a.iter().chain(&self.i).copied().fold(f64::INFINITY, f64::min)
    }

    fn check(&self, grid: &Grid1D) -> Result<()> {
        if self.a.len() != grid.n || self.i.len() != grid.n {
            return Err(Error::Domain(alloc::format!(
                "state has {}/{} nodes, grid has {}",
                self.a.len(),
                self.i.len(),
                grid.n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame {
    Lab,
    /// Coordinates `z = x - c t`.
    Moving(f64),
}

impl Frame {
    pub fn speed(self) -> f64 {
        match self {
            Frame::Lab => 0.0,
            Frame::Moving(c) => c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt_out: f64,
    /// Fraction of the explicit step limit actually used.
    pub cfl: f64,
    /// Abort once `‖A‖∞` exceeds this.
    pub blow_up: f64,
}

impl SimConfig {
    pub fn new(t_end: f64, dt_out: f64) -> Self {
        Self { t_end, dt_out, cfl: 0.4, blow_up: 1e3 }
    }
}

/// Explicit step limit `min(dx²/(2 max(1, d)), dx/|c|)`.
pub fn step_limit(grid: &Grid1D, params: &ModelParams, frame: Frame) -> f64 {
    let diffusive = grid.dx * grid.dx / (2.0 * params.d.max(1.0));
    let c = frame.speed().abs();
    if c > 0.0 {
        diffusive.min(grid.dx / c)
    } else {
        diffusive
    }
}

/// Advection `c ∂ₓ` for one field: central differences while the cell
/// Péclet number `|c| dx / (2D)` is at most one, upwind otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Advection {
    Central,
    Upwind,
}

pub fn advection_scheme(diffusion: f64, c: f64, dx: f64) -> Advection {
    if c == 0.0 || c.abs() * dx <= 2.0 * diffusion {
        Advection::Central
    } else {
        Advection::Upwind
    }
}

struct Stencil {
    inv_dx2: f64,
    inv_dx: f64,
    c: f64,
}

impl Stencil {
    /// `D u_xx + c u_x` at node `k` with mirrored ghost nodes.
    #[inline]
    fn apply(&self, u: &[f64], k: usize, diffusion: f64, scheme: Advection) -> f64 {
        let n = u.len();
        let left = if k == 0 { u[1] } else { u[k - 1] };
        let right = if k + 1 == n { u[n - 2] } else { u[k + 1] };
        let lap = (left - 2.0 * u[k] + right) * self.inv_dx2;
        let adv = match scheme {
            _ if self.c == 0.0 => 0.0,
            Advection::Central => 0.5 * (right - left) * self.inv_dx,
            Advection::Upwind if self.c > 0.0 => (right - u[k]) * self.inv_dx,
            Advection::Upwind => (u[k] - left) * self.inv_dx,
        };
        diffusion * lap + self.c * adv
    }
}

/// Runs the simulation, handing every output state (including the initial
/// one) to `observe`; returns the final state.
pub fn simulate_with<F>(
    init: &PdeState,
    params: &ModelParams,
    frame: Frame,
    grid: &Grid1D,
    cfg: &SimConfig,
    mut observe: F,
) -> Result<PdeState>
where
    F: FnMut(&PdeState),
{
    init.check(grid)?;
    if !(cfg.t_end > 0.0 && cfg.dt_out > 0.0) {
        return Err(Error::Config(alloc::format!(
            "t_end and dt_out must be positive, got {} and {}",
            cfg.t_end,
            cfg.dt_out
        )));
    }
    let limit = step_limit(grid, params, frame);
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::Cfl { dt: cfg.cfl * limit, limit });
    }
    let outputs = (cfg.t_end / cfg.dt_out - 1e-9).ceil() as usize;

    let c = frame.speed();
    let stencil = Stencil { inv_dx2: 1.0 / (grid.dx * grid.dx), inv_dx: 1.0 / grid.dx, c };
    let scheme_a = advection_scheme(1.0, c, grid.dx);
    let scheme_i = advection_scheme(params.d, c, grid.dx);

    let mut state = init.clone();
    let t0 = state.t;
    let mut next_a = state.a.clone();
    let mut next_i = state.i.clone();
    observe(&state);
    let mut elapsed = 0.0;
    for out in 1..=outputs {
        let target = (out as f64 * cfg.dt_out).min(cfg.t_end);
        let steps = ((target - elapsed) / (cfg.cfl * limit)).ceil().max(1.0) as usize;
        let dt = (target - elapsed) / steps as f64;
        elapsed = target;
        for _ in 0..steps {
            for k in 0..grid.n {
                let (a, i) = (state.a[k], state.i[k]);
                let contact = a * (a + i);
                next_a[k] = a + dt * (stencil.apply(&state.a, k, 1.0, scheme_a) + a - contact);
                next_i[k] = i + dt * (stencil.apply(&state.i, k, params.d, scheme_i) + params.r * a + contact);
            }
            core::mem::swap(&mut state.a, &mut next_a);
            core::mem::swap(&mut state.i, &mut next_i);
        }
        state.t = t0 + target;
        let max_abs = state.a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(max_abs <= cfg.blow_up) || state.i.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: state.t, max_abs });
        }
        observe(&state);
    }
    Ok(state)
}

/// Snapshots at `t = 0, dt_out, 2 dt_out, …, t_end`.
pub fn simulate(
    init: &PdeState,
    params: &ModelParams,
    frame: Frame,
    grid: &Grid1D,
    cfg: &SimConfig,
) -> Result<Vec<PdeState>> {
    let mut out = Vec::new();
    simulate_with(init, params, frame, grid, cfg, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Default level for [`front_position`].
pub const FRONT_LEVEL: f64 = 0.1;

/// Largest `x` with `A(x) ≥ level`, linearly interpolated.
pub fn front_position(state: &PdeState, grid: &Grid1D, level: f64) -> Option<f64> {
    let k = state.a.iter().rposition(|&v| v >= level)?;
    if k + 1 == state.a.len() {
        return Some(grid.x(k));
    }
    let (lo, hi) = (state.a[k], state.a[k + 1]);
    Some(grid.x(k) + grid.dx * (lo - level) / (lo - hi))
}

/// Mean of `I` over the nodes in `window`.
pub fn plateau_value(state: &PdeState, grid: &Grid1D, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo >= grid.x_min && hi <= grid.x_max && hi > lo) {
        return Err(Error::Domain(alloc::format!(
            "plateau window [{lo}, {hi}] is not inside the grid [{}, {}]",
            grid.x_min,
            grid.x_max
        )));
    }
    let (sum, count) = grid
        .nodes()
        .zip(&state.i)
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
    if count == 0 {
        return Err(Error::Domain(alloc::format!("plateau window [{lo}, {hi}] contains no nodes")));
    }
    Ok(sum / count as f64)
}

/// [`plateau_value`] on `[front - 30, front - 20]`.
pub fn plateau_behind_front(state: &PdeState, grid: &Grid1D) -> Result<f64> {
    let front = front_position(state, grid, FRONT_LEVEL)
        .ok_or_else(|| Error::Domain("no front: A is below the front level everywhere".into()))?;
    plateau_value(state, grid, (front - 30.0, front - 20.0))
}

/// Front speed over a time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontSpeed {
    /// Least-squares slope of the front position.
    pub raw: f64,
    /// Slope of `position + (3/2) ln t`, which removes the logarithmic lag
    /// of a pulled front.
    pub log_corrected: f64,
    pub points: usize,
}

/// Fits the speed of `(t, position)` samples with `t` in `window`.
pub fn front_speed(series: &[(f64, f64)], window: (f64, f64)) -> Result<FrontSpeed> {
    let (ts, xs): (Vec<f64>, Vec<f64>) =
        series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1 && *t > 0.0).copied().unzip();
    if ts.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: ts.len() });
    }
    let (_, raw) = linear_fit(&ts, &xs)?;
    let corrected: Vec<f64> = ts.iter().zip(&xs).map(|(t, x)| x + 1.5 * t.ln()).collect();
    let (_, log_corrected) = linear_fit(&ts, &corrected)?;
    Ok(FrontSpeed { raw, log_corrected, points: ts.len() })
}

/// `sup (|A - a| + |I - i|) / (w(x)(1 + |x|))` against reference values.
pub fn weighted_distance(state: &PdeState, reference: &PdeState, grid: &Grid1D, weight: &WeightSpec) -> Result<f64> {
    state.check(grid)?;
    reference.check(grid)?;
    Ok((0..grid.n)
        .map(|k| {
            let x = grid.x(k);
            let diff = (state.a[k] - reference.a[k]).abs() + (state.i[k] - reference.i[k]).abs();
            diff / (weight.eval(x).w * (1.0 + x.abs()))
        })
        .fold(0.0, f64::max))
}

/// [`weighted_distance`] to a wave profile.
pub fn weighted_perturbation_norm(
    state: &PdeState,
    grid: &Grid1D,
    profile: &WaveProfile,
    weight: &WeightSpec,
) -> Result<f64> {
    state.check(grid)?;
    if grid.x_max < profile.x_min() || grid.x_min > profile.x_max() {
        return Err(Error::Domain(alloc::format!(
            "grid [{}, {}] does not overlap the profile range [{}, {}]",
            grid.x_min,
            grid.x_max,
            profile.x_min(),
            profile.x_max()
        )));
    }
    weighted_distance(state, &PdeState::from_profile(grid, profile), grid, weight)
}

/// Power-law fit `norm ≈ C (1 + t)^slope`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    /// An exponential `ln norm ~ t` describes the data markedly better.
    pub super_algebraic: bool,
}

/// Least-squares slope of `ln norm` against `ln(1 + t)` for `t ≥ t_min`.
pub fn decay_exponent_fit(series: &[(f64, f64)], t_min: f64) -> Result<DecayFit> {
    let data: Vec<(f64, f64)> = series.iter().copied().filter(|&(t, v)| t >= t_min && v > 0.0).collect();
    if data.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, got: data.len() });
    }
    let log_t: Vec<f64> = data.iter().map(|p| (1.0 + p.0).ln()).collect();
    let t: Vec<f64> = data.iter().map(|p| p.0).collect();
    let log_v: Vec<f64> = data.iter().map(|p| p.1.ln()).collect();
    let (intercept, slope) = linear_fit(&log_t, &log_v)?;
    let rss_power = fit_rss(&log_t, &log_v, intercept, slope);
    let (ei, es) = linear_fit(&t, &log_v)?;
    let rss_exp = fit_rss(&t, &log_v, ei, es);
    let super_algebraic = slope < -1.5 && es < 0.0 && rss_exp < 0.1 * rss_power;
    Ok(DecayFit { slope, intercept, points: data.len(), super_algebraic })
}

/// Setup of the weighted-decay experiment around a critical front.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayExperiment {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    /// Amplitude `δ` of the perturbation `δ w(x) e^{-x²}` added to `A`.
    pub amplitude: f64,
    pub weight: WeightSpec,
    pub t_end: f64,
    pub dt_out: f64,
    pub fit_from: f64,
    pub cfl: f64,
    /// Centre of the perturbation bump.
    pub bump_centre: f64,
    /// Margin `δ_I` of the left-tail hypothesis `I ≥ 1 + δ_I`, checked left
    /// of the point where the profile has `i = 1 + 2δ_I`.
    pub tail_margin: f64,
}

impl Default for DecayExperiment {
    fn default() -> Self {
        Self {
            x_min: -60.0,
            x_max: 120.0,
            dx: 0.05,
            amplitude: 1e-2,
            weight: WeightSpec { alpha_minus: 0.5, alpha_plus: 1.0 },
            t_end: 60.0,
            dt_out: 0.5,
            fit_from: 5.0,
            cfl: 0.4,
            tail_margin: 0.1,
            bump_centre: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `(t, Θ(t))` with `Θ` measured against an unperturbed run on the same grid.
    pub series: Vec<(f64, f64)>,
    pub fit: DecayFit,
    /// Slope over the second half of the fit window.
    pub late_slope: f64,
    /// `min_t I(t, x_s)`.
    pub min_i_at_origin: f64,
    /// `min I(t, x)` over `t` and `x ≤ x_s`.
    pub min_i_left: f64,
    /// `x_s`: left of it the profile satisfies `i ≥ 1 + 2δ_I`.
    pub shift: f64,
    pub initial_norm: f64,
    /// Output snapshots of the perturbed run.
    pub snapshots: Vec<PdeState>,
    pub grid: Grid1D,
}

impl DecayReport {
    /// `I(t, x) ≥ 1 + δ_I` held for all `x ≤ x_s` and all output times.
    pub fn tail_bound_held(&self, tail_margin: f64) -> bool {
        self.min_i_left >= 1.0 + tail_margin
    }
}

/// Rightmost profile coordinate with `i ≥ level` on everything to its left.
pub fn tail_shift(profile: &WaveProfile, level: f64) -> Result<f64> {
    let k = profile
        .i
        .iter()
        .position(|&v| v < level)
        .ok_or_else(|| Error::Domain(alloc::format!("profile i never drops below {level}")))?;
    if k == 0 {
        return Err(Error::Domain(alloc::format!("profile i starts below {level}")));
    }
    let (lo, hi) = (profile.i[k - 1], profile.i[k]);
    Ok(profile.grid[k - 1] + (profile.grid[k] - profile.grid[k - 1]) * (lo - level) / (lo - hi))
}

/// Perturbs the profile, runs it alongside the unperturbed profile in the
/// co-moving frame and fits the decay of their weighted distance.
pub fn perturbation_decay(profile: &WaveProfile, setup: &DecayExperiment) -> Result<DecayReport> {
    let grid = Grid1D::with_spacing(setup.x_min, setup.x_max, setup.dx)?;
    let shift = tail_shift(profile, 1.0 + 2.0 * setup.tail_margin)?;
    let base = PdeState::from_profile(&grid, profile);
    let mut perturbed = base.clone();
    for k in 0..grid.n {
        let x = grid.x(k);
        let bump = setup.amplitude * setup.weight.eval(x).w * (-(x - setup.bump_centre).powi(2)).exp();
        perturbed.a[k] += bump;
    }
    let frame = Frame::Moving(profile.params.c);
    let cfg = SimConfig { cfl: setup.cfl, ..SimConfig::new(setup.t_end, setup.dt_out) };
    let mut reference = Vec::new();
    simulate_with(&base, &profile.params, frame, &grid, &cfg, |s| reference.push(s.clone()))?;
    let origin = grid.index_of(shift);
    let mut series = Vec::with_capacity(reference.len());
    let mut min_i_at_origin = f64::INFINITY;
    let mut min_i_left = f64::INFINITY;
    let mut failure = None;
    let mut step = 0;
    let mut snapshots = Vec::with_capacity(reference.len());
    simulate_with(&perturbed, &profile.params, frame, &grid, &cfg, |s| {
        snapshots.push(s.clone());
        min_i_at_origin = min_i_at_origin.min(s.i[origin]);
        min_i_left = s.i[..=origin].iter().fold(min_i_left, |m, &v| m.min(v));
        match weighted_distance(s, &reference[step], &grid, &setup.weight) {
            Ok(norm) => series.push((s.t, norm)),
            Err(e) => failure = Some(e),
        }
        step += 1;
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let fit = decay_exponent_fit(&series, setup.fit_from)?;
    let late_slope = decay_exponent_fit(&series, 0.5 * (setup.fit_from + setup.t_end))?.slope;
    Ok(DecayReport {
        initial_norm: series[0].1,
        series,
        fit,
        late_slope,
        min_i_at_origin,
        min_i_left,
        shift,
        snapshots,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat_error(dx: f64) -> f64 {
        let p = ModelParams::new(2.0, 1.0, 0.0).unwrap();
        let grid = Grid1D::with_spacing(-20.0, 20.0, dx).unwrap();
        let init = PdeState::from_fn(&grid, |x| (0.0, (-x * x).exp()));
        let out = simulate(&init, &p, Frame::Lab, &grid, &SimConfig::new(1.0, 1.0)).unwrap();
        let last = out.last().unwrap();
        assert_eq!(last.a.iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
        let s = 1.0 + 4.0 * last.t;
        grid.nodes().zip(&last.i).map(|(x, v)| (v - (-x * x / s).exp() / s.sqrt()).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn heat_kernel_and_order() {
        let coarse = heat_error(0.1);
        let fine = heat_error(0.05);
        assert!(fine < 1e-3, "error {fine}");
        assert!(coarse / fine >= 3.5, "ratio {}", coarse / fine);
    }

    #[test]
    fn moving_frame_advects_exactly() {
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let grid = Grid1D::with_spacing(-20.0, 20.0, 0.05).unwrap();
        let init = PdeState::from_fn(&grid, |x| (0.0, (-x * x).exp()));
        let last = simulate(&init, &p, Frame::Moving(2.0), &grid, &SimConfig::new(1.0, 0.5)).unwrap().pop().unwrap();
        // z = x - 2t, so the Gaussian centre moves to z = -2.
        let s = 1.0 + 2.0 * last.t;
        let err = grid
            .nodes()
            .zip(&last.i)
            .map(|(z, v)| (v - (-(z + 2.0).powi(2) / s).exp() / s.sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "error {err}");
    }

    #[test]
    fn front_speed_of_pulled_front() {
        let series: Vec<(f64, f64)> =
            (1..=40).map(|k| (k as f64, 2.0 * k as f64 - 1.5 * (k as f64).ln() + 3.0)).collect();
        let speed = front_speed(&series, (20.0, 40.0)).unwrap();
        assert!((speed.log_corrected - 2.0).abs() < 1e-12);
        assert!(speed.raw < 2.0 && speed.raw > 1.9);
        assert_eq!(speed.points, 21);
        assert!(front_speed(&series, (50.0, 60.0)).is_err());
    }

    #[test]
    fn cfl_and_blow_up_errors() {
        let p = ModelParams::new(2.0, 0.0, 0.0).unwrap();
        let grid = Grid1D::new(-1.0, 1.0, 32).unwrap();
        let init = PdeState::from_fn(&grid, |_| (0.5, 0.0));
        let cfg = SimConfig { cfl: 1.5, ..SimConfig::new(1.0, 0.1) };
        assert!(matches!(simulate(&init, &p, Frame::Lab, &grid, &cfg), Err(Error::Cfl { .. })));
        let neg = PdeState::from_fn(&grid, |_| (-5.0, 0.0));
        let err = simulate(&neg, &p, Frame::Lab, &grid, &SimConfig::new(5.0, 0.1)).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn front_position_diagnostics() {
        let grid = Grid1D::new(0.0, 10.0, 101).unwrap();
        let zero = PdeState::from_fn(&grid, |_| (0.0, 0.0));
        assert_eq!(front_position(&zero, &grid, FRONT_LEVEL), None);
        let step = PdeState::from_fn(&grid, |x| (if x < 4.0 { 1.0 } else { 0.0 }, 0.0));
        let base = front_position(&step, &grid, 0.5).unwrap();
        let shifted = PdeState::from_fn(&grid, |x| (if x < 4.0 + 10.0 * grid.dx { 1.0 } else { 0.0 }, 0.0));
        assert!((front_position(&shifted, &grid, 0.5).unwrap() - base - 10.0 * grid.dx).abs() < 1e-12);
        let plateau = PdeState::from_fn(&grid, |x| (0.0, x));
        assert!((plateau_value(&plateau, &grid, (2.0, 4.0)).unwrap() - 3.0).abs() < 1e-12);
        assert!(plateau_value(&plateau, &grid, (-1.0, 4.0)).is_err());
    }

    #[test]
    fn decay_fit_classifies() {
        let series: Vec<(f64, f64)> = (0..60).map(|k| k as f64).map(|t| (t, (1.0 + t).powf(-1.5))).collect();
        let fit = decay_exponent_fit(&series, 5.0).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-6);
        assert!(!fit.super_algebraic);
        let series: Vec<(f64, f64)> = (0..60).map(|k| k as f64 * 0.5).map(|t| (t, (-t).exp())).collect();
        let fit = decay_exponent_fit(&series, 5.0).unwrap();
        assert!(fit.slope < -3.0 && fit.super_algebraic);
        assert!(matches!(decay_exponent_fit(&series[..3], 0.0), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn hybrid_advection_choice() {
        assert_eq!(advection_scheme(1.0, 2.0, 0.05), Advection::Central);
        assert_eq!(advection_scheme(0.0, 2.0, 0.05), Advection::Upwind);
        assert_eq!(advection_scheme(0.01, 2.0, 0.05), Advection::Upwind);
        assert_eq!(advection_scheme(0.0, 0.0, 0.05), Advection::Central);
    }
}
