//! End-to-end runs behind the subcommands. Each writes its artifacts and one
//! manifest into its output directory and returns the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fkpp_core::feynman_kac::{
    fd_reference, tail_bound_check, FdGrid, FkProblem, PathConfig, TailBoundReport, TailCheckSpec, TailVerdict,
};
use fkpp_core::pde::{
    front_position, front_speed, perturbation_decay, plateau_behind_front, simulate_with, DecayExperiment, Frame,
    Grid1D, PdeState, SimConfig,
};
use fkpp_core::spectral::assumption::DEFAULT_CANDIDATES;
use fkpp_core::spectral::{
    check_assumption_region, conjugate_symmetry_defect, energy_bound, essential_spectrum_curves, symmetric_grid,
    ContourSpec, EvansOptions, ProfileLimits, WaveLinearization, WeightSpec,
};
use fkpp_core::wave::{
    build_profile, check_limit_relation, find_invading_front, mass_balance, measure_decay_rates, verify_tw_properties,
    FrontSearch, WaveProfile,
};
use fkpp_core::{ModelParams, C64};
use serde_json::{json, Value};

use crate::config::{
    DecayConfig, DensityConfig, Fig1Config, OracleConfig, SimulateConfig, SteadinessConfig, TailConfig,
    ValidateFkConfig,
};
use crate::error::{AppError, AppResult, Status};
use crate::io::{
    ensure_dir, read_json, read_profile, read_snapshots, write_contour, write_curves, write_json, write_profile,
    write_snapshots, write_table,
};
use crate::manifest::{collect_manifests, RunManifest};
use crate::parallel::{evans_winding_par, fk_solve_par, validate_hitting_density_par};

/// Mass-balance residual accepted for a computed front.
pub const MASS_BALANCE_TOL: f64 = 1e-3;
/// Closure residual accepted for a winding number.
pub const CLOSURE_TOL: f64 = 0.1;

fn params_json(p: &ModelParams) -> Value {
    json!({ "c": p.c, "d": p.d, "r": p.r })
}

fn finish(mut manifest: RunManifest, out: &Path, status: Status, summary: Value) -> AppResult<RunManifest> {
    manifest.status = status;
    manifest.summary = summary;
    manifest.write(out)?;
    Ok(manifest)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveRequest {
    pub params: ModelParams,
    /// `i₋∞` of the wave; `None` searches for the invading front.
    pub k: Option<f64>,
    pub search: FrontSearch,
}

/// Property, limit-relation, mass-balance and rate checks of a profile.
pub fn profile_checks(profile: &WaveProfile) -> AppResult<(Status, Value)> {
    let props = verify_tw_properties(profile);
    let rel = check_limit_relation(profile);
    let mass = mass_balance(profile);
    let rates = measure_decay_rates(profile)?;
    let status = Status::from_pass(props.all_pass());
    let summary = json!({
        "k": profile.k,
        "i_plus": profile.i_plus,
        "critical": profile.critical,
        "properties": {
            "i_decreasing": props.i_decreasing,
            "a_positive": props.a_positive,
            "i_above_limit": props.i_above_limit,
            "unique_maximum": props.unique_maximum,
            "tail_monotone": props.tail_monotone,
            "x_star": props.x_star,
            "sum_at_maximum": props.sum_at_maximum,
            "all_pass": props.all_pass(),
        },
        "limit_relation": {
            "sum": rel.sum,
            "lower": rel.lower,
            "lower_ok": rel.lower_ok,
            "upper_ok": rel.upper_ok,
            "lower_alt": rel.lower_alt,
            "lower_alt_ok": rel.lower_alt_ok,
            "slack": rel.slack,
        },
        "mass_balance": {
            "mass": mass.mass,
            "predicted": mass.predicted,
            "residual_a": mass.residual_a,
            "residual_quad": mass.residual_quad,
        },
        "decay_rates": {
            "mu_minus": rates.mu_minus,
            "mu_minus_theory": rates.mu_minus_theory,
            "mu_plus": rates.mu_plus,
            "mu_plus_theory": rates.mu_plus_theory,
            "critical_slope": rates.critical_slope,
        },
    });
    Ok((status, summary))
}

pub fn run_wave(req: &WaveRequest, out: &Path) -> AppResult<RunManifest> {
    req.params.check_admissible()?;
    ensure_dir(out)?;
    let profile = match req.k {
        Some(k) => build_profile(k, &req.params, &req.search.shoot)?,
        None => find_invading_front(&req.params, &req.search)?,
    };
    let (status, mut summary) = profile_checks(&profile)?;
    if req.k.is_none() {
        summary["k_star"] = json!(profile.k);
    }
    let mut manifest = RunManifest::new("wave");
    manifest.params = params_json(&req.params);
    manifest.params["k"] = json!(req.k);
    manifest.tolerances = json!({
        "k_tol": req.search.k_tol,
        "bracket": [req.search.k_lo, req.search.k_hi],
        "epsilon": req.search.shoot.epsilon,
        "conv_tol": req.search.shoot.conv_tol,
        "neg_tol": req.search.shoot.neg_tol,
        "rel_tol": req.search.shoot.integrator.rel_tol,
        "abs_tol": req.search.shoot.integrator.abs_tol,
    });
    let csv = write_profile(out, "profile", &profile)?;
    manifest.output(&csv);
    manifest.output(&csv.with_extension("json"));
    let report = out.join("wave_report.json");
    write_json(&report, &summary)?;
    manifest.output(&report);
    finish(manifest, out, status, summary)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRequest {
    pub profile: PathBuf,
    pub alpha_minus: f64,
    pub delta: f64,
    /// Contour radius; the energy bound when `None`.
    pub radius: Option<f64>,
    pub im_points: usize,
    pub evans: EvansOptions,
}

impl SpectrumRequest {
    pub fn new(profile: PathBuf) -> Self {
        Self { profile, alpha_minus: 0.5, delta: 1e-3, radius: None, im_points: 201, evans: EvansOptions::default() }
    }
}

pub fn run_spectrum(req: &SpectrumRequest, out: &Path) -> AppResult<RunManifest> {
    if !(req.alpha_minus > 0.0 && req.alpha_minus < 1.0) {
        return Err(AppError::Usage(format!(
            "α₋ < 1 required (alpha_minus = {} given, must lie in (0, 1))",
            req.alpha_minus
        )));
    }
    let profile = read_profile(&req.profile)?;
    let p = profile.params;
    let radius = match req.radius {
        Some(r) => r,
        None if (p.c - 2.0).abs() < 1e-12 => energy_bound(&p)?,
        None => {
            return Err(AppError::Usage(format!(
                "the energy bound assumes c = 2 (profile has c = {}); pass --radius",
                p.c
            )))
        }
    };
    ensure_dir(out)?;
    let weight = WeightSpec::critical(req.alpha_minus)?;
    let curves =
        essential_spectrum_curves(&p, &weight, &ProfileLimits::of(&profile), &symmetric_grid(radius, req.im_points))?;
    let system = WaveLinearization::new(&profile, WeightSpec::exponential())?;
    let spec = ContourSpec::new(radius, req.delta)?;
    let result = evans_winding_par(&system, &spec, &req.evans)?;
    let probes: Vec<C64> = [0.1, 0.45, 0.8, 1.3, 1.7, 2.5, 3.4].iter().map(|&t| spec.point(t)).collect();
    let symmetry = conjugate_symmetry_defect(&system, &probes, &req.evans)?;
    let assumption = check_assumption_region(&curves, result.winding, result.closure_residual, &DEFAULT_CANDIDATES);

    let curves_path = out.join("essential_spectrum.csv");
    write_curves(&curves_path, &curves)?;
    let contour_path = out.join("contour.csv");
    write_contour(&contour_path, &result.trace)?;
    let pass = result.winding == 0
        && result.closure_residual < CLOSURE_TOL
        && result.splitting_consistent()
        && result.trace.resolved;
    let families: Vec<Value> = curves
        .iter()
        .map(|c| {
            json!({
                "family": c.family.name(),
                "max_real_part": c.max_real_part,
                "half_line": c.half_line,
                "closed_form_mismatch": c.closed_form_mismatch,
                "omitted": c.omitted,
            })
        })
        .collect();
    let summary = json!({
        "winding": result.winding,
        "closure_residual": result.closure_residual,
        "R": radius,
        "delta": req.delta,
        "points": result.trace.values.len(),
        "resolved": result.trace.resolved,
        "max_arg_step": result.trace.max_arg_step(),
        "splitting_consistent": result.splitting_consistent(),
        "conjugate_symmetry_defect": symmetry,
        "alpha_minus": req.alpha_minus,
        "essential_spectrum": families,
        "assumption": {
            "verdict": format!("{:?}", assumption.verdict),
            "supported": assumption.passed(),
            "note": assumption.note,
        },
    });
    let verdict_path = out.join("evans_verdict.json");
    write_json(&verdict_path, &summary)?;

    let mut manifest = RunManifest::new("spectrum");
    manifest.params = params_json(&p);
    manifest.params["k"] = json!(profile.k);
    manifest.params["alpha_minus"] = json!(req.alpha_minus);
    manifest.tolerances = json!({
        "delta": req.delta,
        "R": radius,
        "half_width": req.evans.half_width,
        "rel_tol": req.evans.rel_tol,
        "abs_tol": req.evans.abs_tol,
        "segment": req.evans.segment,
        "max_arg_step": spec.max_arg_step,
        "initial_points": spec.initial_points,
    });
    manifest.inputs.push(req.profile.display().to_string());
    for path in [&curves_path, &contour_path, &verdict_path] {
        manifest.output(path);
    }
    finish(manifest, out, Status::from_pass(pass), summary)
}

fn write_stride(dir: &Path, grid: &Grid1D, states: &[PdeState], every: usize) -> AppResult<()> {
    if every == 0 {
        return Ok(());
    }
    let mut picked: Vec<&PdeState> = states.iter().step_by(every).collect();
    if let Some(last) = states.last() {
        if !std::ptr::eq(*picked.last().unwrap_or(&last), last) {
            picked.push(last);
        }
    }
    write_snapshots(dir, grid, &picked)
}

pub fn run_simulate(cfg: &SimulateConfig, out: &Path) -> AppResult<RunManifest> {
    ensure_dir(out)?;
    let mut manifest = RunManifest::new("simulate");
    manifest.params = serde_json::to_value(cfg).map_err(|e| AppError::parse("config", e))?;
    let (status, summary) = match cfg {
        SimulateConfig::Fig1(f) => simulate_fig1(f, out, &mut manifest)?,
        SimulateConfig::Decay(d) => simulate_decay(d, out, &mut manifest)?,
        SimulateConfig::Steadiness(s) => simulate_steadiness(s, out, &mut manifest)?,
    };
    write_json(&out.join("summary.json"), &summary)?;
    manifest.output(&out.join("summary.json"));
    finish(manifest, out, status, summary)
}

/// Front speed, plateau and sign of the lab-frame spreading run.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Outcome {
    pub speed_raw: f64,
    pub speed_log_corrected: f64,
    pub plateau: f64,
    pub min_value: f64,
    /// `(t, front position, plateau)` per output.
    pub series: Vec<(f64, Option<f64>, Option<f64>)>,
    pub grid: Grid1D,
    pub snapshots: Vec<PdeState>,
}

impl Fig1Outcome {
    pub fn passed(&self, f: &Fig1Config) -> bool {
        (self.speed_raw - f.expected_speed).abs() <= f.speed_tol
            && (self.plateau - f.expected_plateau).abs() <= f.plateau_tol
            && self.min_value >= -1e-9
    }
}

pub fn fig1_run(f: &Fig1Config) -> AppResult<Fig1Outcome> {
    let params = ModelParams::new(2.0, f.d, f.r)?;
    let grid = Grid1D::with_spacing(f.x_min, f.x_max, f.dx)?;
    let init = PdeState::from_fn(&grid, |x| (f.amplitude * (-x * x).exp(), 0.0));
    let cfg = SimConfig { cfl: f.cfl, ..SimConfig::new(f.t_end, f.dt_out) };
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    let mut min_value: f64 = 0.0;
    simulate_with(&init, &params, Frame::Lab, &grid, &cfg, |s| {
        min_value = min_value.min(s.min_value());
        let front = front_position(s, &grid, f.front_level);
        let plateau = front.and_then(|_| plateau_behind_front(s, &grid).ok());
        series.push((s.t, front, plateau));
        snapshots.push(s.clone());
    })?;
    let positions: Vec<(f64, f64)> = series.iter().filter_map(|&(t, x, _)| x.map(|x| (t, x))).collect();
    let speed = front_speed(&positions, f.speed_window)?;
    let plateau = series
        .last()
        .and_then(|s| s.2)
        .ok_or_else(|| AppError::Core(fkpp_core::Error::Domain("no plateau behind the front at t_end".into())))?;
    Ok(Fig1Outcome {
        speed_raw: speed.raw,
        speed_log_corrected: speed.log_corrected,
        plateau,
        min_value,
        series,
        grid,
        snapshots,
    })
}

fn simulate_fig1(f: &Fig1Config, out: &Path, manifest: &mut RunManifest) -> AppResult<(Status, Value)> {
    let run = fig1_run(f)?;
    let series_path = out.join("front_series.csv");
    let nan = f64::NAN;
    write_table(
        &series_path,
        &["t", "front", "plateau"],
        run.series.iter().map(|&(t, x, p)| [t, x.unwrap_or(nan), p.unwrap_or(nan)]),
    )?;
    manifest.output(&series_path);
    write_stride(&out.join("snapshots"), &run.grid, &run.snapshots, f.snapshot_every)?;
    manifest.tolerances = json!({ "cfl": f.cfl, "speed_tol": f.speed_tol, "plateau_tol": f.plateau_tol });
    let summary = json!({
        "scenario": "fig1",
        "speed": run.speed_raw,
        "speed_log_corrected": run.speed_log_corrected,
        "plateau": run.plateau,
        "min_value": run.min_value,
        "speed_window": f.speed_window,
    });
    Ok((Status::from_pass(run.passed(f)), summary))
}

fn decay_setup(d: &DecayConfig) -> AppResult<DecayExperiment> {
    Ok(DecayExperiment {
        x_min: d.x_min,
        x_max: d.x_max,
        dx: d.dx,
        amplitude: d.amplitude,
        weight: WeightSpec::critical(d.alpha_minus)?,
        t_end: d.t_end,
        dt_out: d.dt_out,
        fit_from: d.fit_from,
        cfl: d.cfl,
        tail_margin: d.tail_margin,
        bump_centre: d.bump_centre,
    })
}

/// Scalars of a decay run that the tail check needs when reading it back.
const DECAY_FILE: &str = "decay.json";

fn simulate_decay(d: &DecayConfig, out: &Path, manifest: &mut RunManifest) -> AppResult<(Status, Value)> {
    let params = ModelParams::new(d.c, d.d, d.r)?;
    params.check_admissible()?;
    let profile = find_invading_front(&params, &FrontSearch::default())?;
    let rates = measure_decay_rates(&profile)?;
    let report = perturbation_decay(&profile, &decay_setup(d)?)?;
    let series_path = out.join("decay_series.csv");
    write_table(&series_path, &["t", "norm"], report.series.iter().map(|&(t, n)| [t, n]))?;
    manifest.output(&series_path);
    write_stride(&out.join("snapshots"), &report.grid, &report.snapshots, d.snapshot_every)?;
    let in_band = report.fit.slope >= d.slope_band.0 && report.fit.slope <= d.slope_band.1;
    let held = report.tail_bound_held(d.tail_margin);
    manifest.tolerances = json!({ "cfl": d.cfl, "slope_band": d.slope_band, "tail_margin": d.tail_margin });
    let summary = json!({
        "scenario": "decay",
        "k": profile.k,
        "mu_minus": rates.mu_minus,
        "slope": report.fit.slope,
        "late_slope": report.late_slope,
        "super_algebraic": report.fit.super_algebraic,
        "fit_points": report.fit.points,
        "initial_norm": report.initial_norm,
        "shift": report.shift,
        "tail_margin": d.tail_margin,
        "min_i_at_origin": report.min_i_at_origin,
        "min_i_left": report.min_i_left,
        "hypothesis_held": held,
        "c": d.c,
    });
    write_json(&out.join(DECAY_FILE), &summary)?;
    manifest.output(&out.join(DECAY_FILE));
    Ok((Status::from_pass(in_band && held), summary))
}

/// Sup-norm drift of the profile after `t_end` in the co-moving frame, per `dx`.
pub fn steadiness_drifts(s: &SteadinessConfig, profile: &WaveProfile) -> AppResult<Vec<(f64, f64)>> {
    s.dx.iter()
        .map(|&dx| {
            let grid = Grid1D::with_spacing(s.x_min, s.x_max, dx)?;
            let init = PdeState::from_profile(&grid, profile);
            let cfg = SimConfig { cfl: s.cfl, ..SimConfig::new(s.t_end, s.dt_out) };
            let mut drift: f64 = 0.0;
            simulate_with(&init, &profile.params, Frame::Moving(s.c), &grid, &cfg, |st| {
                let worst = st.a.iter().zip(&init.a).chain(st.i.iter().zip(&init.i)).map(|(u, v)| (u - v).abs());
                drift = worst.fold(drift, f64::max);
            })?;
            Ok((dx, drift))
        })
        .collect()
}

fn simulate_steadiness(s: &SteadinessConfig, out: &Path, manifest: &mut RunManifest) -> AppResult<(Status, Value)> {
    if s.dx.is_empty() {
        return Err(AppError::Usage("steadiness needs at least one dx".into()));
    }
    let params = ModelParams::new(s.c, s.d, s.r)?;
    params.check_admissible()?;
    let profile = find_invading_front(&params, &FrontSearch::default())?;
    let drifts = steadiness_drifts(s, &profile)?;
    let path = out.join("drift.csv");
    write_table(&path, &["dx", "drift"], drifts.iter().map(|&(dx, v)| [dx, v]))?;
    manifest.output(&path);
    manifest.tolerances = json!({ "cfl": s.cfl, "tolerance": s.tolerance });
    let finest = drifts.iter().min_by(|a, b| a.0.total_cmp(&b.0)).map(|d| d.1).unwrap_or(f64::INFINITY);
    let mut by_dx = drifts.clone();
    by_dx.sort_by(|a, b| b.0.total_cmp(&a.0));
    let shrinking = by_dx.windows(2).all(|w| w[1].1 < w[0].1);
    let summary = json!({
        "scenario": "steadiness",
        "k": profile.k,
        "drift": drifts.iter().map(|&(dx, v)| json!({"dx": dx, "drift": v})).collect::<Vec<_>>(),
        "finest_drift": finest,
        "shrinking": shrinking,
    });
    Ok((Status::from_pass(finest < s.tolerance && shrinking), summary))
}

/// Density KS test, optionally repeated at a coarser step.
pub fn density_check(d: &DensityConfig, seed: u64) -> AppResult<(Status, Value)> {
    let cfg = PathConfig { bridge: d.bridge, ..PathConfig::new(d.x0, d.c, d.dt, d.n_paths, d.t_max, seed) };
    let model_c = d.model_c.unwrap_or(d.c);
    let ks = validate_hitting_density_par(&cfg, model_c)?;
    let coarse = match d.coarse_dt {
        Some(dt) => Some(validate_hitting_density_par(&PathConfig { dt, ..cfg }, model_c)?),
        None => None,
    };
    let pass = ks.verdict == fkpp_core::feynman_kac::KsVerdict::Pass;
    let summary = json!({
        "ks": ks.statistic,
        "threshold": ks.threshold,
        "verdict": format!("{:?}", ks.verdict),
        "censored_fraction": ks.censored_fraction,
        "n": ks.samples,
        "dt": d.dt,
        "model_c": model_c,
        "coarse": coarse.map(|c| json!({ "dt": d.coarse_dt, "ks": c.statistic, "verdict": format!("{:?}", c.verdict) })),
        "pass": pass,
    });
    Ok((Status::from_pass(pass), summary))
}

/// Monte Carlo value against the finite-difference reference.
pub fn oracle_check(o: &OracleConfig, seed: u64) -> AppResult<(Status, Value)> {
    let (g, f) = (o.boundary_value, o.initial_value);
    let boundary = move |_: f64| g;
    let initial = move |_: f64| f;
    let problem = FkProblem { l: o.l, m: o.m, boundary_data: &boundary, initial_data: &initial };
    let cfg = PathConfig::new(o.x0, o.c, o.dt, o.n_paths, o.t, seed);
    let mc = fk_solve_par(o.t, &problem, &cfg)?;
    let fd = fd_reference(o.t, o.x0, o.c, &problem, &FdGrid { x_left: o.fd_x_left, dx: o.fd_dx, dt: o.fd_dt })?;
    let z = (mc.mean - fd).abs() / mc.std_error;
    let pass = z <= o.stderr_factor;
    let summary = json!({
        "mc_mean": mc.mean,
        "mc_stderr": mc.std_error,
        "fd": fd,
        "z": z,
        "pass": pass,
    });
    Ok((Status::from_pass(pass), summary))
}

fn tail_summary(report: &TailBoundReport, spec: &TailCheckSpec) -> Value {
    let verdict = match &report.verdict {
        TailVerdict::Pass => "pass".to_owned(),
        TailVerdict::BoundFailed => "bound-failed".to_owned(),
        TailVerdict::PreconditionFailed(p) => format!("precondition-failed: {p:?}"),
    };
    json!({
        "C_fit": report.c_fit,
        "zeta_fit": report.zeta_fit,
        "k_initial": report.k_initial,
        "reference_rates": report.reference_rates,
        "origin": spec.origin,
        "delta": spec.delta,
        "mu0": spec.mu0,
        "verdict": verdict,
        "pass": report.passed(),
    })
}

/// Tail-bound check on a decay run read from disk or computed afresh.
pub fn tail_check(t: &TailConfig) -> AppResult<(Status, Value, Option<PathBuf>)> {
    let (grid, mut snapshots, spec, input) = match &t.run {
        Some(run) => {
            let meta: Value = read_json(&run.join(DECAY_FILE))?;
            let field = |k: &str| {
                meta[k].as_f64().ok_or_else(|| AppError::parse(run.join(DECAY_FILE), format!("missing number {k:?}")))
            };
            let spec = TailCheckSpec {
                origin: field("shift")?,
                delta: field("tail_margin")?,
                mu0: t.mu0_fraction * field("mu_minus")?,
                c: field("c")?,
            };
            let (grid, snaps) = read_snapshots(&run.join("snapshots"))?;
            (grid, snaps, spec, Some(run.clone()))
        }
        None => {
            let d = &t.decay;
            let params = ModelParams::new(d.c, d.d, d.r)?;
            let profile = find_invading_front(&params, &FrontSearch::default())?;
            let rates = measure_decay_rates(&profile)?;
            let report = perturbation_decay(&profile, &decay_setup(d)?)?;
            let spec = TailCheckSpec {
                origin: report.shift,
                delta: d.tail_margin,
                mu0: t.mu0_fraction * rates.mu_minus,
                c: d.c,
            };
            (report.grid, report.snapshots, spec, None)
        }
    };
    if t.negative_control {
        let origin = grid.index_of(spec.origin);
        snapshots[0].i[..=origin].fill(0.5);
    }
    let report = tail_bound_check(&snapshots, &grid, &spec)?;
    let mut summary = tail_summary(&report, &spec);
    summary["negative_control"] = json!(t.negative_control);
    Ok((Status::from_pass(report.passed()), summary, input))
}

pub fn run_validate_fk(cfg: &ValidateFkConfig, out: &Path) -> AppResult<RunManifest> {
    ensure_dir(out)?;
    let mut manifest = RunManifest::new("validate-fk");
    manifest.params = serde_json::to_value(cfg).map_err(|e| AppError::parse("config", e))?;
    manifest.seed = Some(cfg.seed);
    let mut status = Status::Pass;
    let mut report = serde_json::Map::new();
    if let Some(d) = &cfg.density {
        let (s, v) = density_check(d, cfg.seed)?;
        status = status.and(s);
        report.insert("density".into(), v);
    }
    if let Some(o) = &cfg.oracle {
        let (s, v) = oracle_check(o, cfg.seed.wrapping_add(1))?;
        status = status.and(s);
        report.insert("oracle".into(), v);
    }
    if let Some(t) = &cfg.tail {
        let (s, v, input) = tail_check(t)?;
        status = status.and(s);
        if let Some(run) = input {
            manifest.inputs.push(run.display().to_string());
        }
        report.insert("tail".into(), v);
    }
    if report.is_empty() {
        return Err(AppError::Usage("validate-fk config enables no section (density, oracle, tail)".into()));
    }
    let tail = report.get("tail");
    let density = report.get("density");
    let headline = json!({
        "C_fit": tail.map(|t| t["C_fit"].clone()),
        "zeta_fit": tail.map(|t| t["zeta_fit"].clone()),
        "ks": density.map(|d| d["ks"].clone()),
        "pass": status == Status::Pass,
        "seed": cfg.seed,
    });
    report.insert("summary".into(), headline);
    let summary = Value::Object(report);
    let path = out.join("fk_report.json");
    write_json(&path, &summary)?;
    manifest.output(&path);
    finish(manifest, out, status, summary)
}

/// Rendered consolidated report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub markdown: String,
    pub json: Value,
    pub status: Status,
}

/// Summarizes every manifest below `dir`, with computed `K*` laid out by
/// `r` (rows) and `d` (columns).
pub fn build_report(dir: &Path) -> AppResult<Report> {
    let manifests: Vec<_> = collect_manifests(dir)?.into_iter().filter(|(_, m)| m.command != "report").collect();
    if manifests.is_empty() {
        return Err(AppError::Usage(format!("no run manifests under {}", dir.display())));
    }
    let status = manifests.iter().map(|(_, m)| m.status).max().unwrap_or(Status::Pass);
    let key = |v: f64| format!("{v}");
    let mut table: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut ds: Vec<f64> = Vec::new();
    for (_, m) in &manifests {
        if m.command != "wave" {
            continue;
        }
        let (Some(d), Some(r), Some(k)) =
            (m.params["d"].as_f64(), m.params["r"].as_f64(), m.summary["k_star"].as_f64())
        else {
            continue;
        };
        if !ds.contains(&d) {
            ds.push(d);
        }
        table.entry(key(r)).or_default().insert(key(d), k);
    }
    ds.sort_by(f64::total_cmp);

    let mut md = String::from("# Run report\n\n");
    if !table.is_empty() {
        md.push_str("## Invading-front limits K*\n\n| r \\ d |");
        for d in &ds {
            let _ = write!(md, " {d} |");
        }
        md.push_str("\n|---|");
        md.push_str(&"---|".repeat(ds.len()));
        md.push('\n');
        for (r, row) in &table {
            let _ = write!(md, "| {r} |");
            for d in &ds {
                match row.get(&key(*d)) {
                    Some(k) => {
                        let _ = write!(md, " {k:.5} |");
                    }
                    None => md.push_str(" |"),
                }
            }
            md.push('\n');
        }
        md.push('\n');
    }
    md.push_str("## Runs\n\n| run | command | status |\n|---|---|---|\n");
    let mut runs = Vec::new();
    for (path, m) in &manifests {
        let run =
            path.parent().and_then(|p| p.strip_prefix(dir).ok()).map(|p| p.display().to_string()).unwrap_or_default();
        let run = if run.is_empty() { ".".to_owned() } else { run };
        let _ = writeln!(md, "| {run} | {} | {:?} |", m.command, m.status);
        runs.push(json!({ "run": run, "command": m.command, "status": m.status, "seed": m.seed }));
    }
    let _ = writeln!(md, "\nOverall: {:?}", status);
    let json = json!({ "k_star": table, "runs": runs, "status": status });
    Ok(Report { markdown: md, json, status })
}

pub fn run_report(dir: &Path) -> AppResult<RunManifest> {
    let report = build_report(dir)?;
    let md_path = dir.join("report.md");
    fs::write(&md_path, &report.markdown).map_err(|e| AppError::io(&md_path, e))?;
    let json_path = dir.join("report.json");
    write_json(&json_path, &report.json)?;
    let out = dir.join("report");
    ensure_dir(&out)?;
    let mut manifest = RunManifest::new("report");
    manifest.inputs.push(dir.display().to_string());
    manifest.output(&md_path);
    manifest.output(&json_path);
    finish(manifest, &out, report.status, report.json)
}
