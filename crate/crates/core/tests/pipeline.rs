use fkpp_core::feynman_kac::{tail_bound_check, TailCheckSpec, TailVerdict};
use fkpp_core::pde::{perturbation_decay, DecayExperiment};
use fkpp_core::spectral::{
    energy_bound, essential_spectrum_curves, evans_winding, symmetric_grid, ContourSpec, EvansOptions, PlantedSystem,
    ProfileLimits, WaveLinearization, WeightSpec,
};
use fkpp_core::wave::{find_invading_front, mass_balance, measure_decay_rates, verify_tw_properties, FrontSearch};
use fkpp_core::ModelParams;

#[test]
fn front_to_evans_winding() {
    let p = ModelParams::new(2.0, 0.1, 0.0).unwrap();
    let profile = find_invading_front(&p, &FrontSearch::default()).unwrap();
    assert!((profile.k - 1.98489).abs() < 1e-3, "K* = {}", profile.k);
    assert!(verify_tw_properties(&profile).all_pass());
    assert!(mass_balance(&profile).residual_a < 1e-3);

    let critical = WeightSpec::critical(0.5).unwrap();
    let curves =
        essential_spectrum_curves(&p, &critical, &ProfileLimits::of(&profile), &symmetric_grid(10.0, 41)).unwrap();
    assert!(curves.iter().all(|c| c.max_real_part <= 1e-9));

    let system = WaveLinearization::new(&profile, WeightSpec::exponential()).unwrap();
    let spec = ContourSpec::new(energy_bound(&p).unwrap(), 1e-3).unwrap();
    let result = evans_winding(&system, &spec, &EvansOptions::default()).unwrap();
    assert_eq!(result.winding, 0);
    assert!(result.closure_residual < 0.1);
    assert!(result.splitting_consistent());
}

#[test]
fn planted_eigenvalue_is_counted() {
    let spec = ContourSpec::new(4.0, 1e-3).unwrap();
    let result = evans_winding(&PlantedSystem, &spec, &EvansOptions::default()).unwrap();
    assert_eq!(result.winding, 1);
}

#[test]
fn perturbed_critical_front_relaxes() {
    let p = ModelParams::new(2.0, 0.3, 1.0).unwrap();
    let profile = find_invading_front(&p, &FrontSearch::default()).unwrap();
    let rates = measure_decay_rates(&profile).unwrap();
    let setup = DecayExperiment::default();
    let report = perturbation_decay(&profile, &setup).unwrap();
    assert!((-1.9..=-1.1).contains(&report.fit.slope), "slope {}", report.fit.slope);
    assert!(report.tail_bound_held(setup.tail_margin));

    let spec = TailCheckSpec { origin: report.shift, delta: setup.tail_margin, mu0: 0.5 * rates.mu_minus, c: p.c };
    let tail = tail_bound_check(&report.snapshots, &report.grid, &spec).unwrap();
    assert!(tail.passed() && tail.zeta_fit > 0.0);
    assert!(tail.zeta_fit <= rates.mu_minus + 0.02);

    let mut violated = report.snapshots.clone();
    let origin = report.grid.index_of(report.shift);
    violated[0].i[..=origin].fill(0.5);
    let control = tail_bound_check(&violated, &report.grid, &spec).unwrap();
    assert!(matches!(control.verdict, TailVerdict::PreconditionFailed(_)));
}
