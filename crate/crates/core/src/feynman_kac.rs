//! First-passage Monte Carlo for drifted Brownian motion, the stopped
//! Feynman–Kac representation and the exponential tail check at the back of
//! the wave.
//!
//! Paths follow `W_t = x₀ + c t + B_t` and stop at `T₀ = inf{t : W_t ≥ 0}`.
//! Sampling proceeds in chunks of [`CHUNK`] paths, chunk `k` drawing from
//! ChaCha8 stream `k` of the master seed, so results do not depend on how
//! chunks are scheduled.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::pde::{Grid1D, PdeState};
use crate::quad::{integrate_adaptive, linear_fit};
use crate::{Error, Result};

/// Paths per RNG stream.
pub const CHUNK: usize = 4096;

/// Bridge crossing probabilities below `e^{-40}` are treated as zero.
const BRIDGE_CUTOFF: f64 = -40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathConfig {
    pub x0: f64,
    pub c: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub t_max: f64,
    pub seed: u64,
    /// Detect crossings between grid times with the Brownian-bridge probability.
    pub bridge: bool,
}

impl PathConfig {
    pub fn new(x0: f64, c: f64, dt: f64, n_paths: usize, t_max: f64, seed: u64) -> Self {
        Self { x0, c, dt, n_paths, t_max, seed, bridge: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 < 0.0) {
            return Err(Error::Domain(alloc::format!("paths must start left of 0, got x0 = {}", self.x0)));
        }
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(alloc::format!("need dt > 0 and t_max > 0, got {} and {}", self.dt, self.t_max)));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        Ok(())
    }

    pub fn chunk_count(&self) -> usize {
        self.n_paths.div_ceil(CHUNK)
    }

    fn chunk_len(&self, chunk: usize) -> usize {
        CHUNK.min(self.n_paths.saturating_sub(chunk * CHUNK))
    }
}

/// One sampled path: the passage time, or `None` if censored at `t_max`,
/// and the position where the path stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub t0: Option<f64>,
    pub endpoint: f64,
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn run_path(cfg: &PathConfig, rng: &mut ChaCha8Rng) -> PathSample {
    let sd = cfg.dt.sqrt();
    let mut x = cfg.x0;
    let mut t = 0.0;
    while t < cfg.t_max {
        let h = cfg.dt.min(cfg.t_max - t);
        let step_sd = if h < cfg.dt { h.sqrt() } else { sd };
        let z: f64 = rng.sample(StandardNormal);
        let next = x + cfg.c * h + step_sd * z;
        if next >= 0.0 {
            let frac = -x / (next - x);
            return PathSample { t0: Some(t + frac * h), endpoint: 0.0 };
        }
        let exponent = -2.0 * x * next / h;
        if cfg.bridge && exponent > BRIDGE_CUTOFF {
            let u: f64 = rng.random();
            if u < exponent.exp() {
                return PathSample { t0: Some(t + 0.5 * h), endpoint: 0.0 };
            }
        }
        x = next;
        t += h;
    }
    PathSample { t0: None, endpoint: x }
}

/// Samples the paths of one chunk.
pub fn sample_chunk(cfg: &PathConfig, chunk: usize) -> Vec<PathSample> {
    let mut rng = chunk_rng(cfg.seed, chunk);
    (0..cfg.chunk_len(chunk)).map(|_| run_path(cfg, &mut rng)).collect()
}

/// Sequentially samples every chunk.
pub fn sample_first_passage(cfg: &PathConfig) -> Result<Vec<PathSample>> {
    cfg.validate()?;
    Ok((0..cfg.chunk_count()).flat_map(|k| sample_chunk(cfg, k)).collect())
}

/// Density `|x₀| / √(2π t³) · exp(-(|x₀| - c t)² / (2t))` of `T₀`.
pub fn hitting_time_density(t: f64, x0: f64, c: f64) -> Result<f64> {
    if !(x0 < 0.0) {
        return Err(Error::Domain(alloc::format!("hitting-time density needs x0 < 0, got {x0}")));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    let a = -x0;
    let dev = a - c * t;
    Ok(a / (2.0 * core::f64::consts::PI * t * t * t).sqrt() * (-dev * dev / (2.0 * t)).exp())
}

/// `P(T₀ ≤ t)` by adaptive quadrature of [`hitting_time_density`].
pub fn hitting_time_cdf(t: f64, x0: f64, c: f64) -> Result<f64> {
    hitting_time_density(1.0, x0, c)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(integrate_adaptive(|s| hitting_time_density(s, x0, c).unwrap_or(0.0), 0.0, t, 1e-13, 1e-12, 4000)?.value)
}

/// Kolmogorov–Smirnov comparison of sampled passage times with the density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub threshold: f64,
    pub samples: usize,
    pub censored_fraction: f64,
    pub verdict: KsVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsVerdict {
    Pass,
    Fail,
    /// More than 1% of paths never reached 0.
    Inconclusive,
}

/// Significance level of the KS test.
pub const KS_ALPHA: f64 = 0.01;

/// `3 √(ln(2/α) / (2n))`.
pub fn ks_threshold(n: usize, alpha: f64) -> f64 {
    3.0 * ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// KS distance between sampled passage times and the density with drift
/// `model_c` (normally the sampling drift; a different value gives a
/// negative control).
pub fn ks_against_density(samples: &[PathSample], x0: f64, model_c: f64) -> Result<KsReport> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut times: Vec<f64> = samples.iter().filter_map(|s| s.t0).collect();
    let censored_fraction = 1.0 - times.len() as f64 / n as f64;
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Censored paths count in the denominator; the empirical CDF then never
    // exceeds the hit fraction.
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut statistic: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        if t > prev {
            cdf += integrate_adaptive(
                |s| hitting_time_density(s, x0, model_c).unwrap_or(0.0),
                prev,
                t,
                1e-14,
                1e-10,
                200,
            )?
            .value;
            prev = t;
        }
        let below = k as f64 / n as f64;
        let above = (k + 1) as f64 / n as f64;
        statistic = statistic.max((cdf - below).abs()).max((above - cdf).abs());
    }
    let threshold = ks_threshold(n, KS_ALPHA);
    let verdict = if censored_fraction > 0.01 {
        KsVerdict::Inconclusive
    } else if statistic < threshold {
        KsVerdict::Pass
    } else {
        KsVerdict::Fail
    };
    Ok(KsReport { statistic, threshold, samples: n, censored_fraction, verdict })
}

/// Samples paths and runs [`ks_against_density`] with the sampling drift.
pub fn validate_hitting_density(cfg: &PathConfig) -> Result<KsReport> {
    let samples = sample_first_passage(cfg)?;
    ks_against_density(&samples, cfg.x0, cfg.c)
}

/// `u_t = ½ u_xx + c u_x + L u + M` on `x < 0` with `u(t, 0) = g(t)` and
/// `u(0, x) = f(x)`.
#[derive(Clone, Copy)]
pub struct FkProblem<'a> {
    pub l: f64,
    pub m: f64,
    pub boundary_data: &'a (dyn Fn(f64) -> f64 + Sync),
    pub initial_data: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl FkProblem<'_> {
    /// `∫₀^τ M e^{L s} ds`.
    pub fn source_integral(&self, tau: f64) -> f64 {
        if self.l == 0.0 {
            self.m * tau
        } else {
            self.m * libm::expm1(self.l * tau) / self.l
        }
    }

    /// Contribution of one stopped path to `u(t, x₀)`.
    pub fn path_value(&self, t: f64, sample: &PathSample) -> f64 {
        match sample.t0 {
            Some(t0) if t0 <= t => (self.l * t0).exp() * (self.boundary_data)(t - t0) + self.source_integral(t0),
            _ => (self.l * t).exp() * (self.initial_data)(sample.endpoint) + self.source_integral(t),
        }
    }
}

/// Running sums of one chunk of path values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChunkStats {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
    pub min: f64,
    pub max: f64,
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// Combines chunk sums in the given (fixed) order.
    pub fn from_chunks(chunks: &[ChunkStats]) -> Result<Self> {
        let n: usize = chunks.iter().map(|c| c.n).sum();
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let sum: f64 = chunks.iter().map(|c| c.sum).sum();
        let sum_sq: f64 = chunks.iter().map(|c| c.sum_sq).sum();
        let mean = sum / n as f64;
        let var = ((sum_sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0);
        Ok(Self { mean, std_error: (var / n as f64).sqrt(), n })
    }
}

/// Paths of one chunk for the value at time `t`; `cfg.t_max` is ignored.
pub fn fk_chunk(t: f64, problem: &FkProblem<'_>, cfg: &PathConfig, chunk: usize) -> Result<ChunkStats> {
    let horizon = PathConfig { t_max: t, ..*cfg };
    let mut stats = ChunkStats { min: f64::INFINITY, max: f64::NEG_INFINITY, ..ChunkStats::default() };
    for sample in sample_chunk(&horizon, chunk) {
        let v = problem.path_value(t, &sample);
        if !v.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "Feynman-Kac data are not finite along a path (t0 = {:?}, endpoint = {})",
                sample.t0,
                sample.endpoint
            )));
        }
        stats.n += 1;
        stats.sum += v;
        stats.sum_sq += v * v;
        stats.min = stats.min.min(v);
        stats.max = stats.max.max(v);
    }
    Ok(stats)
}

/// Monte Carlo value of `u(t, x₀)` from the stopped representation.
pub fn fk_solve(t: f64, problem: &FkProblem<'_>, cfg: &PathConfig) -> Result<McEstimate> {
    let horizon = PathConfig { t_max: t, ..*cfg };
    horizon.validate()?;
    let chunks = (0..horizon.chunk_count()).map(|k| fk_chunk(t, problem, &horizon, k)).collect::<Result<Vec<_>>>()?;
    McEstimate::from_chunks(&chunks)
}

/// Grid of the finite-difference reference solution on `[x_left, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    pub x_left: f64,
    pub dx: f64,
    pub dt: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        Self { x_left: -20.0, dx: 2e-3, dt: 1e-3 }
    }
}

/// Backward-Euler half steps before Crank–Nicolson takes over.
const RANNACHER_STEPS: usize = 4;

/// Crank–Nicolson solution of the problem of [`FkProblem`] at `(t, x₀)`,
/// with `u_x = 0` at `x_left` standing in for the unbounded domain.
pub fn fd_reference(t: f64, x0: f64, c: f64, problem: &FkProblem<'_>, grid: &FdGrid) -> Result<f64> {
    if !(x0 < 0.0 && x0 > grid.x_left) {
        return Err(Error::Domain(alloc::format!("x0 = {x0} must lie in ({}, 0)", grid.x_left)));
    }
    if !(t > 0.0 && grid.dx > 0.0 && grid.dt > 0.0) {
        return Err(Error::Config(alloc::format!("need t, dx, dt > 0, got {t}, {}, {}", grid.dx, grid.dt)));
    }
    let n = (-grid.x_left / grid.dx).round() as usize;
    if n < 8 {
        return Err(Error::Config(alloc::format!("finite-difference grid has only {n} cells")));
    }
    let h = -grid.x_left / n as f64;
    let x = |k: usize| grid.x_left + k as f64 * h;
    // Unknowns are nodes 0..n; node n is the boundary x = 0.
    let mut u: Vec<f64> = (0..n).map(|k| (problem.initial_data)(x(k))).collect();
    let lower = 0.5 / (h * h) - 0.5 * c / h;
    let upper = 0.5 / (h * h) + 0.5 * c / h;
    let diag = -1.0 / (h * h) + problem.l;
    let apply = |u: &[f64], boundary: f64, out: &mut Vec<f64>| {
        out.clear();
        for k in 0..n {
            let left = if k == 0 { u[1] } else { u[k - 1] };
            let right = if k + 1 == n { boundary } else { u[k + 1] };
            out.push(lower * left + diag * u[k] + upper * right + problem.m);
        }
    };
    let steps = (t / grid.dt).ceil() as usize;
    let dt = t / steps as f64;
    let mut schedule = Vec::with_capacity(steps + RANNACHER_STEPS);
    for s in 0..steps {
        if s < RANNACHER_STEPS / 2 {
            schedule.extend([(0.5 * dt, 1.0), (0.5 * dt, 1.0)]);
        } else {
            schedule.push((dt, 0.5));
        }
    }
    let mut now = 0.0;
    let mut lu = Vec::with_capacity(n);
    let (mut sub, mut main, mut sup, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (tau, theta) in schedule {
        let g_old = (problem.boundary_data)(now);
        let g_new = (problem.boundary_data)(now + tau);
        apply(&u, g_old, &mut lu);
        for k in 0..n {
            rhs[k] = u[k] + (1.0 - theta) * tau * lu[k] + theta * tau * problem.m;
            main[k] = 1.0 - theta * tau * diag;
            sub[k] = -theta * tau * lower;
            sup[k] = -theta * tau * upper;
        }
        // Mirrored ghost node at the left edge.
        sup[0] -= theta * tau * lower;
        sub[0] = 0.0;
        rhs[n - 1] += theta * tau * upper * g_new;
        sup[n - 1] = 0.0;
        solve_tridiagonal(&sub, &mut main, &sup, &mut rhs);
        u.copy_from_slice(&rhs);
        now += tau;
    }
    let pos = (x0 - grid.x_left) / h;
    let k = (pos.floor() as usize).min(n - 1);
    let frac = pos - k as f64;
    let right = if k + 1 == n { (problem.boundary_data)(t) } else { u[k + 1] };
    Ok(u[k] * (1.0 - frac) + right * frac)
}

/// Thomas algorithm; `main` is overwritten and the solution replaces `rhs`.
fn solve_tridiagonal(sub: &[f64], main: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = main.len();
    for k in 1..n {
        let w = sub[k] / main[k - 1];
        main[k] -= w * sup[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    rhs[n - 1] /= main[n - 1];
    for k in (0..n - 1).rev() {
        rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / main[k];
    }
}

/// Hypotheses of the left-tail estimate, in coordinates of the snapshots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailCheckSpec {
    /// Location of the reference point `x = 0` of the estimate.
    pub origin: f64,
    pub delta: f64,
    pub mu0: f64,
    /// Drift `c` of the moving frame.
    pub c: f64,
}

/// Failed hypothesis of the tail estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum Precondition {
    InitialInactiveTooSmall { x: f64, value: f64 },
    InitialActiveNotBounded { ratio_growth: f64 },
    OriginInactiveTooSmall { t: f64, value: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TailVerdict {
    /// A positive-rate envelope `A ≤ C e^{ζ (x - origin)}` holds on the whole run.
    Pass,
    /// The fitted rate is not positive.
    BoundFailed,
    PreconditionFailed(Precondition),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailBoundReport {
    pub verdict: TailVerdict,
    pub c_fit: f64,
    pub zeta_fit: f64,
    /// `K` with `A(0, x) ≤ K e^{μ₀ (x - origin)}` on the initial snapshot.
    pub k_initial: f64,
    /// Reference exponents `δ/(2c̃ + μ₀)` and `c̃/2` with `c̃ = c/√2`.
    pub reference_rates: [f64; 2],
}

impl TailBoundReport {
    pub fn passed(&self) -> bool {
        self.verdict == TailVerdict::Pass
    }
}

/// Fits the envelope `A(s, x) ≤ C e^{ζ (x - origin)}` over `x ≤ origin` and all
/// snapshots after checking the hypotheses on the data.
pub fn tail_bound_check(snapshots: &[PdeState], grid: &Grid1D, spec: &TailCheckSpec) -> Result<TailBoundReport> {
    let first = snapshots.first().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    let origin = grid.index_of(spec.origin);
    if origin < 8 {
        return Err(Error::Domain(alloc::format!("tail check origin {} is too close to the left edge", spec.origin)));
    }
    let c_tilde = spec.c / core::f64::consts::SQRT_2;
    let reference_rates = [spec.delta / (2.0 * c_tilde + spec.mu0), 0.5 * c_tilde];
    let report =
        |verdict, c_fit, zeta_fit, k_initial| TailBoundReport { verdict, c_fit, zeta_fit, k_initial, reference_rates };

    let floor = 1.0 + spec.delta;
    if let Some(k) = (0..=origin).find(|&k| first.i[k] < floor) {
        let p = Precondition::InitialInactiveTooSmall { x: grid.x(k), value: first.i[k] };
        return Ok(report(TailVerdict::PreconditionFailed(p), f64::NAN, f64::NAN, f64::NAN));
    }
    if let Some(s) = snapshots.iter().find(|s| s.i[origin] < floor) {
        let p = Precondition::OriginInactiveTooSmall { t: s.t, value: s.i[origin] };
        return Ok(report(TailVerdict::PreconditionFailed(p), f64::NAN, f64::NAN, f64::NAN));
    }
    // A(0, x) e^{-μ₀ (x - origin)} must stay bounded: it may not keep growing
    // towards the left edge.
    let ratio = |k: usize| first.a[k].max(0.0) * (-spec.mu0 * (grid.x(k) - spec.origin)).exp();
    let k_initial = (0..=origin).map(ratio).fold(0.0, f64::max);
    let quarter = origin / 4;
    let left_max = (0..quarter).map(ratio).fold(0.0, f64::max);
    let inner_max = (quarter..=origin).map(ratio).fold(0.0, f64::max);
    if !k_initial.is_finite() || left_max > 2.0 * inner_max {
        let p = Precondition::InitialActiveNotBounded { ratio_growth: left_max / inner_max };
        return Ok(report(TailVerdict::PreconditionFailed(p), f64::NAN, k_initial, k_initial));
    }

    let mut xs = Vec::with_capacity(origin + 1);
    let mut envelope = Vec::with_capacity(origin + 1);
    for k in 0..=origin {
        let peak = snapshots.iter().map(|s| s.a[k]).fold(0.0, f64::max);
        if peak > 1e-300 {
            xs.push(grid.x(k) - spec.origin);
            envelope.push(peak.ln());
        }
    }
    let (_, zeta_fit) = linear_fit(&xs, &envelope)?;
    let log_c = xs.iter().zip(&envelope).map(|(x, e)| e - zeta_fit * x).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if zeta_fit > 0.0 { TailVerdict::Pass } else { TailVerdict::BoundFailed };
    Ok(report(verdict, log_c.exp(), zeta_fit, k_initial))
}
