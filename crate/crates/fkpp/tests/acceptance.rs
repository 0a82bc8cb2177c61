//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fkpp::config::{DecayConfig, DensityConfig, Fig1Config, OracleConfig, SimulateConfig, TailConfig};
use fkpp::error::Status;
use fkpp::parallel::{evans_winding_par, find_fronts_par};
use fkpp::workflows::{density_check, fig1_run, oracle_check, run_simulate, tail_check, CLOSURE_TOL, MASS_BALANCE_TOL};
use fkpp_core::ode::{integrate, Crossing, Event, IntegratorConfig, Termination};
use fkpp_core::spectral::{
    conjugate_symmetry_defect, energy_bound, essential_spectrum_curves, symmetric_grid, ContourSpec, EvansOptions,
    PlantedSystem, ProfileLimits, WaveLinearization, WeightSpec,
};
use fkpp_core::wave::{
    check_limit_relation, interior_grid, k_sweep, mass_balance, measure_decay_rates, verify_tw_properties, FrontSearch,
    ShootOptions, WaveProfile,
};
use fkpp_core::ModelParams;

const DS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
const RS: [f64; 2] = [0.0, 1.0];
/// Reference `K*` by `r` (rows) and `d` (columns).
const TABLE: [[f64; 4]; 2] = [[1.98489, 1.96999, 1.95532, 1.94091], [1.98430, 1.96897, 1.95403, 1.93948]];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn report(n: usize, result: Result<Outcome, String>, elapsed: Duration) -> bool {
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("criterion {n}: {} {detail} [{:.1} s]", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    pass
}

fn grid_points() -> Vec<ModelParams> {
    RS.iter().flat_map(|&r| DS.iter().map(move |&d| ModelParams::new(2.0, d, r).unwrap())).collect()
}

fn label(p: &ModelParams) -> String {
    format!("(d={}, r={})", p.d, p.r)
}

fn front_table(fronts: &[WaveProfile], elapsed: Duration) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for (f, expected) in fronts.iter().zip(TABLE.iter().flatten()) {
        worst = worst.max((f.k - expected).abs());
        cells.push(format!("{:.5}", f.k));
    }
    outcome(
        worst <= 1e-3 && elapsed < Duration::from_secs(60),
        format!("K* = [{}], max deviation {worst:.2e}", cells.join(", ")),
    )
}

fn evans_grid(fronts: &[WaveProfile]) -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut pass = true;
    for f in fronts {
        let start = Instant::now();
        let system = WaveLinearization::new(f, WeightSpec::exponential()).map_err(|e| e.to_string())?;
        let spec =
            ContourSpec::new(energy_bound(&f.params).map_err(|e| e.to_string())?, 1e-3).map_err(|e| e.to_string())?;
        let res = evans_winding_par(&system, &spec, &EvansOptions::default()).map_err(|e| e.to_string())?;
        let ok = res.winding == 0
            && res.closure_residual < CLOSURE_TOL
            && res.trace.resolved
            && start.elapsed() < Duration::from_secs(300);
        pass &= ok;
        parts.push(format!("{} w={} res={:.1e}", label(&f.params), res.winding, res.closure_residual));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn mass_balances(fronts: &[WaveProfile]) -> Outcome {
    let worst = fronts.iter().map(|f| mass_balance(f).residual_a).fold(0.0, f64::max);
    let props = fronts.iter().all(|f| verify_tw_properties(f).all_pass());
    outcome(worst < MASS_BALANCE_TOL && props, format!("max residual {worst:.2e}, properties hold: {props}"))
}

fn limit_sweep() -> Result<Outcome, String> {
    let p = ModelParams::new(2.0, 0.1, 0.0).unwrap();
    let sweep = k_sweep(&p, &interior_grid(1.5, 2.0, 20), &ShootOptions::default()).map_err(|e| e.to_string())?;
    let waves: Vec<_> = sweep.waves().collect();
    let slack = waves.iter().filter_map(|w| w.relation.map(|r| r.slack)).fold(f64::INFINITY, f64::min);
    let all_fronts = fronts_hold_relation(&p);
    Ok(outcome(
        !waves.is_empty() && sweep.relations_hold() && all_fronts,
        format!("{} of 20 shots are waves, min slack {slack:.3e}", waves.len()),
    ))
}

fn fronts_hold_relation(p: &ModelParams) -> bool {
    fkpp_core::wave::find_invading_front(p, &FrontSearch::default())
        .map(|f| {
            let r = check_limit_relation(&f);
            r.lower_ok && r.upper_ok
        })
        .unwrap_or(false)
}

fn decay_rates(fronts: &[WaveProfile]) -> Result<Outcome, String> {
    let mut worst_rel: f64 = 0.0;
    let mut slopes = Vec::new();
    for f in fronts {
        let rates = measure_decay_rates(f).map_err(|e| e.to_string())?;
        worst_rel = worst_rel.max((rates.mu_minus - rates.mu_minus_theory).abs() / rates.mu_minus_theory);
        slopes.push(rates.critical_slope.ok_or_else(|| format!("no critical slope at {}", label(&f.params)))?);
    }
    let in_band = slopes.iter().all(|s| (0.9..=1.1).contains(s));
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    Ok(outcome(
        worst_rel < 0.02 && in_band,
        format!("max rel. error of mu- {worst_rel:.2e}, critical slopes in [{lo:.3}, {hi:.3}]"),
    ))
}

fn fig1() -> Result<Outcome, String> {
    let start = Instant::now();
    let cfg = Fig1Config::default();
    let run = fig1_run(&cfg).map_err(|e| e.to_string())?;
    let fast = start.elapsed() < Duration::from_secs(120);
    Ok(outcome(
        run.passed(&cfg) && fast,
        format!(
            "speed {:.4} (log-corrected {:.4}), plateau {:.4}, min {:.1e}",
            run.speed_raw, run.speed_log_corrected, run.plateau, run.min_value
        ),
    ))
}

fn decay(dir: &std::path::Path) -> Result<Outcome, String> {
    let manifest = run_simulate(&SimulateConfig::Decay(DecayConfig::default()), dir).map_err(|e| e.to_string())?;
    let s = &manifest.summary;
    Ok(outcome(
        manifest.status == Status::Pass,
        format!(
            "slope {:.3} (late {:.3}), min I(t, x_s) {:.4}, threshold 1+delta = {}",
            s["slope"].as_f64().unwrap_or(f64::NAN),
            s["late_slope"].as_f64().unwrap_or(f64::NAN),
            s["min_i_at_origin"].as_f64().unwrap_or(f64::NAN),
            1.0 + s["tail_margin"].as_f64().unwrap_or(f64::NAN),
        ),
    ))
}

fn feynman_kac(decay_dir: &std::path::Path) -> Result<Outcome, String> {
    let seed = 20_240_601;
    let (ks_status, ks) = density_check(&DensityConfig { coarse_dt: None, ..DensityConfig::default() }, seed)
        .map_err(|e| e.to_string())?;
    let (fd_status, fd) = oracle_check(&OracleConfig::default(), seed + 1).map_err(|e| e.to_string())?;
    let compliant = TailConfig { run: Some(decay_dir.to_path_buf()), ..TailConfig::default() };
    let (tail_status, tail, _) = tail_check(&compliant).map_err(|e| e.to_string())?;
    let zeta = tail["zeta_fit"].as_f64().unwrap_or(f64::NAN);
    let control = TailConfig { negative_control: true, ..compliant };
    let (_, neg, _) = tail_check(&control).map_err(|e| e.to_string())?;
    let neg_verdict = neg["verdict"].as_str().unwrap_or_default().to_owned();
    let pass = ks_status == Status::Pass
        && fd_status == Status::Pass
        && tail_status == Status::Pass
        && zeta > 0.0
        && neg_verdict.starts_with("precondition-failed");
    Ok(outcome(
        pass,
        format!(
            "KS {:.4} < {:.4}; MC {:.5} vs FD {:.5} ({:.2} stderr); zeta {zeta:.4}; control: {neg_verdict}",
            ks["ks"].as_f64().unwrap_or(f64::NAN),
            ks["threshold"].as_f64().unwrap_or(f64::NAN),
            fd["mc_mean"].as_f64().unwrap_or(f64::NAN),
            fd["fd"].as_f64().unwrap_or(f64::NAN),
            fd["z"].as_f64().unwrap_or(f64::NAN),
        ),
    ))
}

fn spectral_consistency(fronts: &[WaveProfile]) -> Result<Outcome, String> {
    let opts = EvansOptions::default();
    let mut splitting = true;
    let mut symmetry: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for f in fronts {
        let radius = energy_bound(&f.params).map_err(|e| e.to_string())?;
        let spec = ContourSpec::new(radius, 1e-3).map_err(|e| e.to_string())?;
        let system = WaveLinearization::new(f, WeightSpec::exponential()).map_err(|e| e.to_string())?;
        let res = evans_winding_par(&system, &spec, &opts).map_err(|e| e.to_string())?;
        splitting &= res.splitting_consistent();
        let probes: Vec<_> = res.trace.lambdas.iter().step_by(16).copied().filter(|l| l.im != 0.0).collect();
        symmetry = symmetry.max(conjugate_symmetry_defect(&system, &probes, &opts).map_err(|e| e.to_string())?);
        let weight = WeightSpec::critical(0.5).map_err(|e| e.to_string())?;
        let curves = essential_spectrum_curves(&f.params, &weight, &ProfileLimits::of(f), &symmetric_grid(radius, 201))
            .map_err(|e| e.to_string())?;
        mismatch = mismatch.max(curves.max_closed_form_mismatch());
    }
    let bound = energy_bound(&ModelParams::new(2.0, 0.3, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let expected = 2f64.sqrt() * (1.4 * 20f64.sqrt() + 6.0);
    let bound_err = (bound - expected).abs();
    Ok(outcome(
        splitting && symmetry <= 1e-8 && mismatch <= 1e-6 && bound_err <= 1e-12,
        format!(
            "k1+k2=4 everywhere: {splitting}; conjugate defect {symmetry:.1e}; curve mismatch {mismatch:.1e}; \
             energy bound {bound:.12} (error {bound_err:.1e})"
        ),
    ))
}

fn oracle_suite() -> Result<Outcome, String> {
    let planted = evans_winding_par(&PlantedSystem, &ContourSpec::new(4.0, 1e-3).unwrap(), &EvansOptions::default())
        .map_err(|e| e.to_string())?;
    let decay = |_: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0];
    let e1 = (-1.0f64).exp();
    let adaptive_err = |tol: f64| -> Result<f64, String> {
        let tr = integrate(decay, &[1.0], (0.0, 1.0), &IntegratorConfig::with_tolerances(tol, tol), &[])
            .map_err(|e| e.to_string())?;
        Ok((tr.last_state()[0] - e1).abs())
    };
    let fixed_err = |h: f64| -> Result<f64, String> {
        let cfg =
            IntegratorConfig { rel_tol: 1.0, abs_tol: 1.0, max_step: h, initial_step: Some(h), ..Default::default() };
        let tr = integrate(decay, &[1.0], (0.0, 1.0), &cfg, &[]).map_err(|e| e.to_string())?;
        Ok((tr.last_state()[0] - e1).abs())
    };
    let accurate = adaptive_err(1e-8)? / e1 < 1e-7;
    let tol_ratio = adaptive_err(1e-5)? / adaptive_err(1e-5 / 32.0)?;
    let order_ratio = fixed_err(0.1)? / fixed_err(0.05)?;

    let half = |_: f64, y: &[f64]| y[0] - 0.5;
    let ev = [Event::new(7, Crossing::Falling, true, &half)];
    let tr = integrate(decay, &[1.0], (0.0, 5.0), &IntegratorConfig::with_tolerances(1e-10, 1e-13), &ev)
        .map_err(|e| e.to_string())?;
    let event_ok = tr.termination == Termination::Event && tr.events.len() == 1 && (tr.events[0].x - LN_2).abs() < 1e-8;

    let oscillator = |_: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    let zero = |_: f64, y: &[f64]| y[0];
    let ev = [Event::new(0, Crossing::Either, false, &zero)];
    let tr = integrate(oscillator, &[1.0, 0.0], (0.0, 10.0), &IntegratorConfig::with_tolerances(1e-10, 1e-12), &ev)
        .map_err(|e| e.to_string())?;
    let zeros_ok =
        tr.events.len() == 3 && tr.events.iter().enumerate().all(|(k, e)| (e.x - (k as f64 + 0.5) * PI).abs() < 1e-8);

    Ok(outcome(
        planted.winding == 1 && accurate && tol_ratio >= 8.0 && order_ratio > 16.0 && event_ok && zeros_ok,
        format!(
            "planted winding {}; step-halving ratio {order_ratio:.1}; tolerance ratio {tol_ratio:.1}; \
             ln 2 event {event_ok}; oscillator zeros {zeros_ok}",
            planted.winding
        ),
    ))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let mut all = true;

    let start = Instant::now();
    let fronts: Result<Vec<WaveProfile>, String> = find_fronts_par(&grid_points(), &FrontSearch::default())
        .into_iter()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect();
    let front_time = start.elapsed();
    let fronts = match fronts {
        Ok(f) => f,
        Err(e) => {
            for n in [1, 2, 3, 5, 9] {
                report(n, Err(format!("front computation failed: {e}")), front_time);
            }
            return ExitCode::FAILURE;
        }
    };
    all &= report(1, Ok(front_table(&fronts, front_time)), front_time);

    type Check<'a> = Box<dyn Fn() -> Result<Outcome, String> + 'a>;
    let decay_dir = scratch.path().join("decay");
    let checks: Vec<(usize, Check)> = vec![
        (2, Box::new(|| evans_grid(&fronts))),
        (3, Box::new(|| Ok(mass_balances(&fronts)))),
        (4, Box::new(limit_sweep)),
        (5, Box::new(|| decay_rates(&fronts))),
        (6, Box::new(fig1)),
        (7, Box::new(|| decay(&decay_dir))),
        (8, Box::new(|| feynman_kac(&decay_dir))),
        (9, Box::new(|| spectral_consistency(&fronts))),
        (10, Box::new(oracle_suite)),
    ];
    for (n, check) in checks {
        let start = Instant::now();
        let result = check();
        all &= report(n, result, start.elapsed());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
