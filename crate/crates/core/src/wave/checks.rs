use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::profile::WaveProfile;
use super::shoot::{is_positive_wave, shoot, shoot_reduced, ShootOptions, ShotKind};
use crate::model::{self, ModelParams};
use crate::quad::{linear_fit, simpson_uniform};
use crate::{Error, Result};

/// Tolerance for `i ≥ i₊∞` and `a + i ≤ 1` at the maximum.
const PROPERTY_TOL: f64 = 1e-6;
/// Samples with `a` below this are treated as numerically zero in sign tests.
const TAIL_FLOOR: f64 = 1e-25;

/// Outcome of the five wave properties on a sampled profile.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    /// `i' < 0` everywhere.
    pub i_decreasing: bool,
    /// `a > 0` everywhere.
    pub a_positive: bool,
    /// `i ≥ i₊∞` everywhere (up to tolerance).
    pub i_above_limit: bool,
    /// `a` has a single local maximum and `a + i ≤ 1` there.
    pub unique_maximum: bool,
    /// There is an `x*` after which `a' < 0` and `i'' > 0`.
    pub tail_monotone: bool,
    pub x_star: Option<f64>,
    pub local_maxima: usize,
    pub sum_at_maximum: f64,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.i_decreasing && self.a_positive && self.i_above_limit && self.unique_maximum && self.tail_monotone
    }
}

fn second_derivative_i(profile: &WaveProfile, k: usize) -> f64 {
    let mut dy = [0.0; 4];
    model::sd_rhs(&profile.params, &profile.node(k), &mut dy);
    dy[3]
}

pub fn verify_tw_properties(profile: &WaveProfile) -> PropertyReport {
    let n = profile.len();
    let resolved = |k: usize| profile.a[k] > TAIL_FLOOR;
    let i_decreasing = (0..n).filter(|&k| resolved(k)).all(|k| profile.i_prime[k] < 0.0);
    let a_positive = profile.a.iter().all(|&a| a > 0.0);
    let i_above_limit = profile.i.iter().all(|&i| i >= profile.i_plus - PROPERTY_TOL);

    let mut local_maxima = 0;
    let mut peak = 0;
    for k in 1..n - 1 {
        if profile.a[k] >= profile.a[k - 1] && profile.a[k] > profile.a[k + 1] {
            local_maxima += 1;
            peak = k;
        }
    }
    let global = (0..n).max_by(|&p, &q| profile.a[p].partial_cmp(&profile.a[q]).unwrap()).unwrap();
    let peak_state = profile.sample(0.0);
    let sum_at_maximum = peak_state[0] + peak_state[2];
    let unique_maximum = local_maxima == 1 && peak == global && sum_at_maximum <= 1.0 + PROPERTY_TOL;

    let mut x_star = None;
    for k in (0..n).rev() {
        if !resolved(k) {
            continue;
        }
        if profile.a_prime[k] < 0.0 && second_derivative_i(profile, k) > 0.0 {
            x_star = Some(profile.grid[k]);
        } else {
            break;
        }
    }
    let tail_monotone = x_star.is_some_and(|x| x < profile.x_max());

    PropertyReport {
        i_decreasing,
        a_positive,
        i_above_limit,
        unique_maximum,
        tail_monotone,
        x_star,
        local_maxima,
        sum_at_maximum,
    }
}

/// Bounds on `i₋∞ + i₊∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitRelation {
    pub sum: f64,
    /// `2 - 2d(r+1)/c²`.
    pub lower: f64,
    /// The variant `2 - 2d(r+1)/c`, reported for comparison only.
    pub lower_alt: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub lower_alt_ok: bool,
    /// Smallest distance to either bound (negative when violated).
    pub slack: f64,
}

pub fn limit_relation(k: f64, i_plus: f64, p: &ModelParams) -> LimitRelation {
    let sum = k + i_plus;
    let lower = 2.0 - 2.0 * p.d * (p.r + 1.0) / (p.c * p.c);
    let lower_alt = 2.0 - 2.0 * p.d * (p.r + 1.0) / p.c;
    LimitRelation {
        sum,
        lower,
        lower_alt,
        lower_ok: sum > lower,
        upper_ok: sum < 2.0,
        lower_alt_ok: sum > lower_alt,
        slack: (sum - lower).min(2.0 - sum),
    }
}

pub fn check_limit_relation(profile: &WaveProfile) -> LimitRelation {
    limit_relation(profile.k, profile.i_plus, &profile.params)
}

/// One shot of a `K` sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub k: f64,
    pub kind: ShotKind,
    pub i_plus: Option<f64>,
    /// Set when the shot is a non-negative wave.
    pub relation: Option<LimitRelation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KSweep {
    pub points: Vec<SweepPoint>,
}

impl KSweep {
    pub fn waves(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.relation.is_some())
    }

    /// Both strict inequalities at every wave of the sweep.
    pub fn relations_hold(&self) -> bool {
        self.waves().all(|p| p.relation.is_some_and(|r| r.lower_ok && r.upper_ok))
    }

    pub fn i_plus_non_increasing(&self) -> bool {
        let limits: Vec<f64> = self.waves().filter_map(|p| p.i_plus).collect();
        limits.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `n` midpoints of equal subintervals of `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|j| lo + (j as f64 + 0.5) * h).collect()
}

/// Shoots at each `K` and evaluates the limit relation on the waves.
pub fn k_sweep(params: &ModelParams, ks: &[f64], opts: &ShootOptions) -> Result<KSweep> {
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let shot = shoot(k, params, opts)?;
        let relation = match (is_positive_wave(&shot), shot.i_plus) {
            (Some(true), Some(i_plus)) => Some(limit_relation(k, i_plus, params)),
            _ => None,
        };
        points.push(SweepPoint { k, kind: shot.kind, i_plus: shot.i_plus, relation });
    }
    Ok(KSweep { points })
}

/// Relative residuals of the two integral identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassBalance {
    /// `∫ a`.
    pub mass: f64,
    /// `c (i₋∞ - i₊∞) / (1 + r)`.
    pub predicted: f64,
    /// `∫ a (a + i)`.
    pub reaction: f64,
    pub residual_a: f64,
    pub residual_quad: f64,
}

/// Simpson quadrature on the grid with exponential tail corrections.
pub fn mass_balance(profile: &WaveProfile) -> MassBalance {
    let h = profile.step();
    let n = profile.len();
    let p = &profile.params;
    let reaction_density: Vec<f64> = (0..n).map(|k| profile.a[k] * (profile.a[k] + profile.i[k])).collect();
    let mut mass = simpson_uniform(&profile.a, h);
    let mut reaction = simpson_uniform(&reaction_density, h);
    if profile.mu_minus > 0.0 {
        mass += profile.a[0] / profile.mu_minus;
        reaction += reaction_density[0] / profile.mu_minus;
    }
    if profile.mu_plus > 0.0 {
        mass += profile.a[n - 1] / profile.mu_plus;
        reaction += reaction_density[n - 1] / profile.mu_plus;
    }
    let predicted = p.c * (profile.k - profile.i_plus) / (1.0 + p.r);
    let scale = if mass > 0.0 { mass } else { 1.0 };
    MassBalance {
        mass,
        predicted,
        reaction,
        residual_a: (mass - predicted).abs() / scale,
        residual_quad: (reaction - mass).abs() / scale,
    }
}

/// Measured tail rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRates {
    /// Growth rate of `a` at `-∞`.
    pub mu_minus: f64,
    /// `-c/2 + √(c²/4 + i₋∞ - 1)`.
    pub mu_minus_theory: f64,
    /// Decay rate of `a` at `+∞`.
    pub mu_plus: f64,
    /// `c/2 - √(c²/4 + i₊∞ - 1)`.
    pub mu_plus_theory: f64,
    pub critical: bool,
    /// Slope of `log a + x` against `log x` on the critical tail.
    pub critical_slope: Option<f64>,
}

/// `|i₊∞|` below which a `c = 2` wave is treated as the critical front.
pub const CRITICAL_I_PLUS: f64 = 1e-4;

/// Window of the left-tail fit, measured from the start of the integrated part.
const LEFT_WINDOW: f64 = 5.0;
/// Right-tail windows in profile coordinates.
const RIGHT_WINDOW: (f64, f64) = (30.0, 45.0);
/// Far-tail window of the `x e^{-x}` fit; the subleading constant in
/// `a ≈ (Cx + D) e^{-x}` biases fits closer to the maximum.
const CRITICAL_WINDOW: (f64, f64) = (60.0, 150.0);
/// Fallback window when only the grid is available.
const CRITICAL_GRID_WINDOW: (f64, f64) = (20.0, 45.0);

pub fn measure_decay_rates(profile: &WaveProfile) -> Result<DecayRates> {
    let p = &profile.params;
    let x_left = profile.integrated_from.max(profile.x_min());
    let fit_window = |lo: f64, hi: f64, transform: &dyn Fn(f64, f64) -> (f64, f64)| -> Result<(f64, f64)> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (k, &x) in profile.grid.iter().enumerate() {
            if x >= lo && x <= hi && profile.a[k] > TAIL_FLOOR {
                let (u, v) = transform(x, profile.a[k]);
                xs.push(u);
                ys.push(v);
            }
        }
        if xs.len() < 10 {
            return Err(Error::InsufficientData { needed: 10, got: xs.len() });
        }
        linear_fit(&xs, &ys)
    };

    let (_, mu_minus) = fit_window(x_left, x_left + LEFT_WINDOW, &|x, a| (x, a.ln()))?;
    let mu_minus_theory = model::unstable_rate(profile.k, p.c);
    let mu_plus_theory = p.c / 2.0 - (p.c * p.c / 4.0 + profile.i_plus - 1.0).max(0.0).sqrt();
    let critical = (p.c - 2.0).abs() < 1e-12 && profile.i_plus.abs() < CRITICAL_I_PLUS;

    let hi = RIGHT_WINDOW.1.min(profile.x_max());
    let (_, slope) = fit_window(RIGHT_WINDOW.0.min(hi - 5.0), hi, &|x, a| (x, a.ln()))?;
    let mu_plus = -slope;

    let critical_slope = if critical {
        let (lo, hi) = CRITICAL_WINDOW;
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            profile.far_tail.iter().filter(|s| s[0] >= lo && s[0] <= hi).map(|s| (s[0].ln(), s[1] + s[0])).unzip();
        if xs.len() >= 10 {
            Some(linear_fit(&xs, &ys)?.1)
        } else {
            let hi = CRITICAL_GRID_WINDOW.1.min(profile.x_max());
            let (_, s) = fit_window(CRITICAL_GRID_WINDOW.0.min(hi - 5.0), hi, &|x, a| (x.ln(), a.ln() + x))?;
            Some(s)
        }
    } else {
        None
    };
    Ok(DecayRates { mu_minus, mu_minus_theory, mu_plus, mu_plus_theory, critical, critical_slope })
}

/// Distance between the full and reduced orbits from the same `K` for each `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuitySweep {
    pub d: Vec<f64>,
    pub distance: Vec<f64>,
}

impl ContinuitySweep {
    pub fn strictly_decreasing(&self) -> bool {
        self.distance.windows(2).all(|w| w[1] < w[0])
    }
}

/// Compares full-system orbits at each `d` with the reduced orbit, both
/// aligned at the maximum of `a`, in sup-norm over `window` (relative to the
/// maximum). The reduced orbit is lifted with `i' = -a(a+i+r)/c`.
pub fn d_continuity_sweep(
    k: f64,
    base: &ModelParams,
    d_list: &[f64],
    window: (f64, f64),
    opts: &ShootOptions,
) -> Result<ContinuitySweep> {
    let reduced_params = ModelParams { d: 0.0, ..*base };
    let reduced = shoot_reduced(k, &reduced_params, opts, 400.0)?;
    let red_peak = first_peak(&reduced.times, |j| reduced.state(j)[1], |x| reduced.interpolate(x).map(|y| y[1]))
        .ok_or_else(|| Error::Numeric("reduced orbit has no maximum".into()))?;
    let mut out = ContinuitySweep { d: Vec::new(), distance: Vec::new() };
    for &d in d_list {
        let p = ModelParams::new(base.c, d, base.r)?;
        let shot = shoot(k, &p, opts)?;
        if shot.kind != ShotKind::Converged {
            return Err(Error::Numeric(alloc::format!("shot at d = {d} ended as {:?}", shot.kind)));
        }
        let traj = &shot.trajectory;
        let peak = first_peak(&traj.times, |j| traj.state(j)[1], |x| traj.interpolate(x).map(|y| y[1]))
            .ok_or_else(|| Error::Numeric("full orbit has no maximum".into()))?;
        let mut dist: f64 = 0.0;
        let steps = ((window.1 - window.0) / 0.01).round() as usize;
        for j in 0..=steps {
            let s = window.0 + 0.01 * j as f64;
            let (xf, xr) = (peak + s, red_peak + s);
            let (Some(yf), Some(yr)) = (traj.interpolate(xf), reduced.interpolate(xr)) else {
                return Err(Error::Domain(alloc::format!("window offset {s} leaves the computed orbits")));
            };
            let lifted = [yr[0], yr[1], yr[2], model::slow_i_prime(yr[0], yr[2], &p)];
            for c in 0..4 {
                dist = dist.max((yf[c] - lifted[c]).abs());
            }
        }
        out.d.push(d);
        out.distance.push(dist);
    }
    Ok(out)
}

fn first_peak(times: &[f64], slope_at: impl Fn(usize) -> f64, slope_dense: impl Fn(f64) -> Option<f64>) -> Option<f64> {
    for j in 1..times.len() {
        if slope_at(j - 1) > 0.0 && slope_at(j) <= 0.0 {
            return crate::roots::brent(|x| slope_dense(x).unwrap_or(f64::NAN), times[j - 1], times[j], 1e-13, 200)
                .ok();
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::profile::{build_profile, find_invading_front, FrontSearch};

    fn front(d: f64, r: f64) -> WaveProfile {
        find_invading_front(&ModelParams::new(2.0, d, r).unwrap(), &FrontSearch::default()).unwrap()
    }

    #[test]
    fn front_properties_and_identities() {
        let prof = front(0.1, 0.0);
        let report = verify_tw_properties(&prof);
        assert!(report.all_pass(), "{report:?}");
        let lr = check_limit_relation(&prof);
        assert!(lr.lower_ok && lr.upper_ok, "{lr:?}");
        let mb = mass_balance(&prof);
        assert!(mb.residual_a < 1e-3 && mb.residual_quad < 1e-3, "{mb:?}");
        let rates = measure_decay_rates(&prof).unwrap();
        assert!((rates.mu_minus - rates.mu_minus_theory).abs() / rates.mu_minus_theory < 0.02);
        assert!((rates.mu_minus_theory - (prof.k.sqrt() - 1.0)).abs() < 1e-14);
        let s = rates.critical_slope.unwrap();
        assert!((0.9..=1.1).contains(&s), "critical slope {s}");
    }

    #[test]
    fn injected_defect_fails_monotonicity() {
        let mut prof = front(0.1, 0.0);
        let k = prof.nearest_index(-3.0);
        prof.i_prime[k] = 1e-3;
        let report = verify_tw_properties(&prof);
        assert!(!report.i_decreasing && !report.all_pass());
    }

    #[test]
    fn interior_wave_rates() {
        let p = ModelParams::new(2.0, 0.1, 0.0).unwrap();
        let prof = build_profile(1.5, &p, &ShootOptions::default()).unwrap();
        assert!(verify_tw_properties(&prof).all_pass());
        assert!(prof.i_plus > 0.0 && !prof.critical);
        let r = measure_decay_rates(&prof).unwrap();
        assert!((r.mu_plus - r.mu_plus_theory).abs() / r.mu_plus_theory < 0.02, "{r:?}");
    }

    #[test]
    fn limit_relation_bounds() {
        let p = ModelParams::new(2.0, 0.1, 0.0).unwrap();
        let lr = limit_relation(1.98489, 0.0, &p);
        assert!((lr.lower - 1.95).abs() < 1e-15);
        assert!(lr.lower_ok && lr.upper_ok);
        let p = ModelParams::new(2.0, 0.4, 0.0).unwrap();
        let lr = limit_relation(1.94091, 0.0, &p);
        assert!((lr.lower - 1.8).abs() < 1e-15 && lr.lower_ok && lr.upper_ok);
        assert!(!limit_relation(1.5, 0.6, &p).upper_ok);
    }

    #[test]
    fn zero_profile_mass_balance_code_path() {
        let mut prof = front(0.2, 0.0);
        prof.a.iter_mut().for_each(|a| *a = 0.0);
        prof.k = 0.5;
        prof.i_plus = 0.5;
        let mb = mass_balance(&prof);
        assert_eq!(mb.mass, 0.0);
        assert_eq!(mb.predicted, 0.0);
        assert_eq!(mb.residual_a, 0.0);
    }

    #[test]
    fn continuity_in_d() {
        let base = ModelParams::new(2.0, 0.1, 0.0).unwrap();
        let opts = ShootOptions::default();
        let sweep = d_continuity_sweep(1.5, &base, &[0.2, 0.1, 0.05], (-20.0, 20.0), &opts).unwrap();
        assert!(sweep.strictly_decreasing(), "{sweep:?}");
        let ratio = sweep.distance[1] / sweep.distance[2];
        assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");
        let again = d_continuity_sweep(1.5, &base, &[0.1, 0.1], (-20.0, 20.0), &opts).unwrap();
        assert_eq!(again.distance[0], again.distance[1]);
    }
    #[test]
    fn sweep_below_front_yields_waves() {
        let p = ModelParams::new(2.0, 0.1, 0.0).unwrap();
        let k_star = front(0.1, 0.0).k;
        let sweep = k_sweep(&p, &interior_grid(1.5, k_star, 6), &ShootOptions::default()).unwrap();
        assert_eq!(sweep.waves().count(), 6, "{sweep:?}");
        assert!(sweep.relations_hold() && sweep.i_plus_non_increasing(), "{sweep:?}");
        let below = k_sweep(&p, &[k_star + 0.01], &ShootOptions::default()).unwrap();
        assert_eq!(below.waves().count(), 0);
    }

    #[test]
    fn interior_grid_is_symmetric() {
        let g = interior_grid(1.0, 2.0, 4);
        assert_eq!(g, [1.125, 1.375, 1.625, 1.875]);
    }
}
