//! Traveling-wave construction by shooting from the unstable manifold of
//! `(0, 0, K, 0)` and the checks run on the resulting profiles.

mod checks;
mod profile;
mod shoot;

pub use checks::{
    check_limit_relation, d_continuity_sweep, interior_grid, k_sweep, limit_relation, mass_balance,
    measure_decay_rates, verify_tw_properties, ContinuitySweep, DecayRates, KSweep, LimitRelation, MassBalance,
    PropertyReport, SweepPoint, CRITICAL_I_PLUS,
};
pub use profile::{
    bisect_front, build_profile, build_profile_from_shot, find_invading_front, FrontBracket, FrontSearch, WaveProfile,
    PROFILE_HALF_WIDTH, PROFILE_STEP,
};
pub use shoot::{
    extrapolate_i_plus, is_positive_wave, shoot, shoot_reduced, shot_start, ShootOptions, ShotKind, ShotOutcome,
};
