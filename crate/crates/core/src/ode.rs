//! Adaptive Dormand–Prince 5(4) integration with dense output and event
//! location.
//!
//! The stepper follows the classical DOPRI5 layout: FSAL stages, a PI step
//! size controller and the fourth-order continuous extension of the pair.
//! Events are scalar functions of `(x, y)`; a sign change over an accepted
//! step is located by bisection on the dense output.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Tolerances and budgets for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// First trial step; `None` picks one from the local derivative scale.
    pub initial_step: Option<f64>,
    /// Integration stops with [`Termination::Diverged`] once any component exceeds this.
    pub divergence_radius: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 200_000,
            initial_step: None,
            divergence_radius: 1e6,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config(alloc::format!(
                "tolerances must be positive (rel {}, abs {})",
                self.rel_tol,
                self.abs_tol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Config(alloc::format!("max_step must be positive, got {}", self.max_step)));
        }
        if !(self.divergence_radius > 0.0) {
            return Err(Error::Config("divergence radius must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    /// Stopped at a terminal event; the last stored sample is the event point.
    Event,
    Diverged,
    StepBudget,
}

/// Which sign changes of an event function count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

impl Crossing {
    fn matches(self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Either => rising || falling,
        }
    }
}

/// A scalar event function `g(x, y)`.
pub struct Event<'a> {
    pub id: usize,
    pub crossing: Crossing,
    pub terminal: bool,
    pub func: &'a dyn Fn(f64, &[f64]) -> f64,
}

impl<'a> Event<'a> {
    pub fn new(id: usize, crossing: Crossing, terminal: bool, func: &'a dyn Fn(f64, &[f64]) -> f64) -> Self {
        Self { id, crossing, terminal, func }
    }
}

/// A located event.
#[derive(Clone, Debug, PartialEq)]
pub struct EventHit {
    pub id: usize,
    pub x: f64,
    pub state: Vec<f64>,
}

/// Accepted steps of an integration together with their continuous extension.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    /// Row-major `times.len() × dim` samples.
    pub states: Vec<f64>,
    pub events: Vec<EventHit>,
    pub termination: Termination,
    /// Five coefficient blocks of length `dim` per step; step `k` covers
    /// `[times[k], times[k + 1]]`.
    dense: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Complex view of sample `k` for trajectories produced by [`integrate_complex`].
    pub fn state_complex(&self, k: usize) -> Vec<C64> {
        self.state(k).chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect()
    }

    /// Dense-output value at `x`; `None` outside `[times[0], times[last]]`.
    pub fn interpolate(&self, x: f64) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.interpolate_into(x, &mut out).then_some(out)
    }

    /// Writes the dense-output value at `x` into `out`; returns `false` when
    /// `x` lies outside the integrated range.
    pub fn interpolate_into(&self, x: f64, out: &mut [f64]) -> bool {
        let n = self.times.len();
        if n == 0 || !(x >= self.times[0] && x <= self.times[n - 1]) {
            return false;
        }
        if n == 1 {
            out.copy_from_slice(self.state(0));
            return true;
        }
        let k = match self.times.binary_search_by(|t| t.partial_cmp(&x).unwrap()) {
            Ok(k) => {
                out.copy_from_slice(self.state(k));
                return true;
            }
            Err(k) => k - 1,
        };
        let h = self.times[k + 1] - self.times[k];
        let theta = (x - self.times[k]) / h;
        eval_dense(&self.dense[k * 5 * self.dim..(k + 1) * 5 * self.dim], self.dim, theta, out);
        true
    }
}

fn eval_dense(rc: &[f64], dim: usize, theta: f64, out: &mut [f64]) {
    let theta1 = 1.0 - theta;
    for (j, o) in out.iter_mut().enumerate() {
        let r = |m: usize| rc[m * dim + j];
        *o = r(0) + theta * (r(1) + theta1 * (r(2) + theta * (r(3) + theta1 * r(4))));
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const EVENT_TOL: f64 = 1e-10;

/// Integrates `y' = f(x, y)` forward over `span = (x0, x1)`.
///
/// The field writes the derivative into its third argument. Integration
/// halts at the first terminal event, when any component exceeds the
/// divergence radius, or when the step budget is exhausted; these are
/// reported through [`Trajectory::termination`] rather than as errors.
pub fn integrate<F>(
    mut field: F,
    y0: &[f64],
    span: (f64, f64),
    cfg: &IntegratorConfig,
    events: &[Event<'_>],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    let (x0, x1) = span;
    if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
        return Err(Error::Domain(alloc::format!("integration span must satisfy x1 > x0, got ({x0}, {x1})")));
    }
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("initial state is not finite".into()));
    }
    let n = y0.len();
    let mut traj = Trajectory {
        dim: n,
        times: vec![x0],
        states: y0.to_vec(),
        events: Vec::new(),
        termination: Termination::ReachedEnd,
        dense: Vec::new(),
    };

    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut rc = vec![0.0; 5 * n];
    let mut scratch = vec![0.0; n];

    field(x0, &y, &mut k1);
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(x0, &y)).collect();

    let mut x = x0;
    let mut h = match cfg.initial_step {
        Some(h) if h > 0.0 => h,
        _ => initial_step(&mut field, x0, &y, &k1, cfg, &mut ytmp, &mut k2),
    }
    .min(cfg.max_step)
    .min(x1 - x0);
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= cfg.max_steps {
            traj.termination = Termination::StepBudget;
            return Ok(traj);
        }
        steps += 1;
        let last = x + h >= x1 - 1e-14 * x1.abs().max(1.0);
        if last {
            h = x1 - x;
        }

        for j in 0..n {
            ytmp[j] = y[j] + h * A21 * k1[j];
        }
        field(x + C2 * h, &ytmp, &mut k2);
        for j in 0..n {
            ytmp[j] = y[j] + h * (A31 * k1[j] + A32 * k2[j]);
        }
        field(x + C3 * h, &ytmp, &mut k3);
        for j in 0..n {
            ytmp[j] = y[j] + h * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j]);
        }
        field(x + C4 * h, &ytmp, &mut k4);
        for j in 0..n {
            ytmp[j] = y[j] + h * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j]);
        }
        field(x + C5 * h, &ytmp, &mut k5);
        for j in 0..n {
            ytmp[j] = y[j] + h * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j] + A64 * k4[j] + A65 * k5[j]);
        }
        field(x + h, &ytmp, &mut k6);
        for j in 0..n {
            ynew[j] = y[j] + h * (A71 * k1[j] + A73 * k3[j] + A74 * k4[j] + A75 * k5[j] + A76 * k6[j]);
        }
        field(x + h, &ynew, &mut k7);

        let mut err = 0.0;
        for j in 0..n {
            let e = h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);
            let sk = cfg.abs_tol + cfg.rel_tol * y[j].abs().max(ynew[j].abs());
            err += (e / sk) * (e / sk);
        }
        let err = (err / n.max(1) as f64).sqrt();

        if !err.is_finite() {
            h *= FAC_MIN;
            rejected = true;
            if h < 1e-14 * x.abs().max(1.0) {
                return Err(Error::Numeric(alloc::format!("step size underflow at x = {x}")));
            }
            continue;
        }

        let fac11 = err.powf(0.2 - BETA * 0.75);
        if err <= 1.0 {
            let mut fac = fac11 / err_old.powf(BETA);
            fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFETY));
            let mut h_new = h / fac;
            err_old = err.max(1e-4);

            for j in 0..n {
                let dy = ynew[j] - y[j];
                let bspl = h * k1[j] - dy;
                rc[j] = y[j];
                rc[n + j] = dy;
                rc[2 * n + j] = bspl;
                rc[3 * n + j] = dy - h * k7[j] - bspl;
                rc[4 * n + j] = h * (D1 * k1[j] + D3 * k3[j] + D4 * k4[j] + D5 * k5[j] + D6 * k6[j] + D7 * k7[j]);
            }
            let x_new = if last { x1 } else { x + h };

            // Events: collect sign changes, locate each, act on the earliest terminal one.
            let mut terminal_hit: Option<EventHit> = None;
            let mut hits: Vec<EventHit> = Vec::new();
            for (e, gp) in events.iter().zip(g_prev.iter_mut()) {
                let g_new = (e.func)(x_new, &ynew);
                if e.crossing.matches(*gp, g_new) {
                    let xe = locate_event(e, x, h, *gp, &rc, n, &mut scratch);
                    eval_dense(&rc, n, (xe - x) / h, &mut scratch);
                    let hit = EventHit { id: e.id, x: xe, state: scratch.clone() };
                    if e.terminal && terminal_hit.as_ref().is_none_or(|t| xe < t.x) {
                        terminal_hit = Some(hit.clone());
                    }
                    hits.push(hit);
                }
                *gp = g_new;
            }
            if let Some(t) = terminal_hit {
                hits.retain(|hit| hit.x <= t.x);
                hits.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
                traj.events.extend(hits);
                if t.x > x {
                    // The event point closes a shortened step; rescale its dense block.
                    let theta_e = (t.x - x) / h;
                    rescale_dense(&mut rc, n, theta_e, h, &mut field, x, &y, &t.state, &mut ytmp, &mut scratch);
                    traj.dense.extend_from_slice(&rc);
                    traj.times.push(t.x);
                    traj.states.extend_from_slice(&t.state);
                }
                traj.termination = Termination::Event;
                return Ok(traj);
            }
            hits.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
            traj.events.extend(hits);

            traj.dense.extend_from_slice(&rc);
            traj.times.push(x_new);
            traj.states.extend_from_slice(&ynew);
            x = x_new;
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut k1, &mut k7);

            if y.iter().any(|v| !(v.abs() <= cfg.divergence_radius)) {
                traj.termination = Termination::Diverged;
                return Ok(traj);
            }
            if last {
                traj.termination = Termination::ReachedEnd;
                return Ok(traj);
            }
            if rejected {
                h_new = h_new.min(h);
            }
            rejected = false;
            h = h_new.min(cfg.max_step);
        } else {
            h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
            rejected = true;
            if h < 1e-14 * x.abs().max(1.0) {
                return Err(Error::Numeric(alloc::format!("step size underflow at x = {x}")));
            }
        }
    }
}

/// Rebuilds the dense block of the step `[x, x + θh]` from the endpoint
/// values so that a trajectory truncated at an event interpolates correctly.
#[allow(clippy::too_many_arguments)]
fn rescale_dense<F>(
    rc: &mut [f64],
    n: usize,
    theta: f64,
    h: f64,
    field: &mut F,
    x: f64,
    y: &[f64],
    y_end: &[f64],
    f0: &mut [f64],
    f1: &mut [f64],
) where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let he = theta * h;
    field(x, y, f0);
    field(x + he, y_end, f1);
    // Cubic Hermite in the same nested form (last coefficient zero).
    for j in 0..n {
        let dy = y_end[j] - y[j];
        let bspl = he * f0[j] - dy;
        rc[j] = y[j];
        rc[n + j] = dy;
        rc[2 * n + j] = bspl;
        rc[3 * n + j] = dy - he * f1[j] - bspl;
        rc[4 * n + j] = 0.0;
    }
}

fn locate_event(e: &Event<'_>, x: f64, h: f64, g_left: f64, rc: &[f64], n: usize, buf: &mut [f64]) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut g_lo = g_left;
    while (hi - lo) * h.abs() > EVENT_TOL * 0.5 {
        let mid = 0.5 * (lo + hi);
        eval_dense(rc, n, mid, buf);
        let g_mid = (e.func)(x + mid * h, buf);
        let same_side = (g_mid > 0.0 && g_lo > 0.0) || (g_mid < 0.0 && g_lo < 0.0);
        if same_side {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    x + hi * h
}

fn initial_step<F>(
    field: &mut F,
    x0: f64,
    y0: &[f64],
    f0: &[f64],
    cfg: &IntegratorConfig,
    y1: &mut [f64],
    f1: &mut [f64],
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len().max(1) as f64;
    let sk = |j: usize| cfg.abs_tol + cfg.rel_tol * y0[j].abs();
    let dnf = (f0.iter().enumerate().map(|(j, f)| (f / sk(j)).powi(2)).sum::<f64>() / n).sqrt();
    let dny = (y0.iter().enumerate().map(|(j, y)| (y / sk(j)).powi(2)).sum::<f64>() / n).sqrt();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
    h = h.min(cfg.max_step);
    for j in 0..y0.len() {
        y1[j] = y0[j] + h * f0[j];
    }
    field(x0 + h, y1, f1);
    let der2 = (f1.iter().zip(f0).enumerate().map(|(j, (a, b))| ((a - b) / sk(j)).powi(2)).sum::<f64>() / n).sqrt() / h;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    (100.0 * h).min(h1).min(cfg.max_step)
}

/// Complex-valued variant of [`integrate`]; states are stored as interleaved
/// `(re, im)` pairs and event functions see that real layout.
pub fn integrate_complex<F>(
    mut field: F,
    y0: &[C64],
    span: (f64, f64),
    cfg: &IntegratorConfig,
    events: &[Event<'_>],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let m = y0.len();
    let real0: Vec<f64> = y0.iter().flat_map(|z| [z.re, z.im]).collect();
    let mut zin = vec![C64::new(0.0, 0.0); m];
    let mut zout = vec![C64::new(0.0, 0.0); m];
    let real_field = |x: f64, y: &[f64], dy: &mut [f64]| {
        for (z, p) in zin.iter_mut().zip(y.chunks_exact(2)) {
            *z = C64::new(p[0], p[1]);
        }
        field(x, &zin, &mut zout);
        for (z, p) in zout.iter().zip(dy.chunks_exact_mut(2)) {
            p[0] = z.re;
            p[1] = z.im;
        }
    };
    integrate(real_field, &real0, span, cfg, events)
}
