use super::weight::WeightSpec;
use super::Side;
use crate::linalg::{Mat4, ONE, ZERO};
use crate::model::ModelParams;
use crate::wave::WaveProfile;
use crate::{Error, Result, C64};

/// Spatial eigenvalue of a limit matrix with its eigenvector. Both depend
/// analytically on `λ` inside the region of consistent splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitMode {
    pub mu: C64,
    pub vector: [C64; 4],
}

/// A first-order eigenvalue problem `U' = A(x, λ) U` on the line whose
/// coefficients converge at `±∞`.
pub trait EvansSystem {
    fn matrix(&self, x: f64, lambda: C64) -> Mat4;
    fn limit_matrix(&self, side: Side, lambda: C64) -> Mat4;
    /// The four eigenpairs of the limit matrix on `side`.
    fn limit_modes(&self, side: Side, lambda: C64) -> Result<[LimitMode; 4]>;
}

/// Limit data of a wave profile used by the linearization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileLimits {
    pub i_minus: f64,
    pub i_plus: f64,
}

impl ProfileLimits {
    pub fn of(profile: &WaveProfile) -> Self {
        Self { i_minus: profile.k, i_plus: profile.i_plus }
    }

    pub fn on(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.i_minus,
            Side::Plus => self.i_plus,
        }
    }
}

/// The weighted linearization of the wave PDE about a profile.
///
/// With `u = Ã/w`, `v = Ĩ/w` the eigenvalue problem reads `U' = M(x, λ) U`
/// for `U = (u, u', v, v')`.
#[derive(Clone, Copy, Debug)]
pub struct WaveLinearization<'a> {
    pub profile: &'a WaveProfile,
    pub weight: WeightSpec,
    pub params: ModelParams,
    pub limits: ProfileLimits,
}

/// Potential terms `ξ_u`, `ξ_v` of the weighted operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Potentials {
    pub xi_u: f64,
    pub xi_v: f64,
}

fn potentials(a: f64, i: f64, wp: f64, wpp: f64, p: &ModelParams) -> Potentials {
    Potentials { xi_u: 2.0 * a + i - 1.0 - p.c * wp - wpp, xi_v: -a - p.c * wp - p.d * wpp }
}

fn assemble(a: f64, i: f64, wp: f64, wpp: f64, p: &ModelParams, lambda: C64) -> Mat4 {
    let pot = potentials(a, i, wp, wpp, p);
    let re = |x: f64| C64::new(x, 0.0);
    [
        [ZERO, ONE, ZERO, ZERO],
        [lambda + pot.xi_u, re(-(p.c + 2.0 * wp)), re(a), ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [re(-(2.0 * a + i + p.r) / p.d), ZERO, (lambda + pot.xi_v) / p.d, re(-(p.c + 2.0 * p.d * wp) / p.d)],
    ]
}

impl<'a> WaveLinearization<'a> {
    pub fn new(profile: &'a WaveProfile, weight: WeightSpec) -> Result<Self> {
        if profile.params.d <= 0.0 {
            return Err(Error::Unsupported("the linearization needs d > 0"));
        }
        Ok(Self { profile, weight, params: profile.params, limits: ProfileLimits::of(profile) })
    }

    pub fn potentials(&self, x: f64) -> Potentials {
        let y = self.profile.sample(x);
        let wv = self.weight.eval(x);
        potentials(y[0], y[2], wv.wp_over_w, wv.wpp_over_w, &self.params)
    }
}

impl EvansSystem for WaveLinearization<'_> {
    fn matrix(&self, x: f64, lambda: C64) -> Mat4 {
        let y = self.profile.sample(x);
        let wv = self.weight.eval(x);
        assemble(y[0], y[2], wv.wp_over_w, wv.wpp_over_w, &self.params, lambda)
    }

    fn limit_matrix(&self, side: Side, lambda: C64) -> Mat4 {
        let alpha = self.weight.alpha(side);
        assemble(0.0, self.limits.on(side), -alpha, alpha * alpha, &self.params, lambda)
    }

    fn limit_modes(&self, side: Side, lambda: C64) -> Result<[LimitMode; 4]> {
        limit_modes(&self.params, self.limits.on(side), self.weight.alpha(side), lambda)
    }
}

/// Free-standing limit matrix for the given side data.
pub fn limit_matrix(
    side: Side,
    lambda: C64,
    limits: &ProfileLimits,
    weight: &WeightSpec,
    params: &ModelParams,
) -> Result<Mat4> {
    if params.d <= 0.0 {
        return Err(Error::Unsupported("limit matrices need d > 0"));
    }
    let alpha = weight.alpha(side);
    Ok(assemble(0.0, limits.on(side), -alpha, alpha * alpha, params, lambda))
}

/// Spatial eigenvalues `α - c/2 ± √(c²/4 + λ + i∞ - 1)` of the `u` block.
pub fn upper_block_eigenvalues(p: &ModelParams, i_inf: f64, alpha: f64, lambda: C64) -> [C64; 2] {
    let root = (lambda + (p.c * p.c / 4.0 + i_inf - 1.0)).sqrt();
    let base = C64::new(alpha - p.c / 2.0, 0.0);
    [base + root, base - root]
}

/// Spatial eigenvalues `α + (-c ± √(c² + 4dλ))/(2d)` of the `v` block.
pub fn lower_block_eigenvalues(p: &ModelParams, alpha: f64, lambda: C64) -> [C64; 2] {
    let root = (lambda * (4.0 * p.d) + p.c * p.c).sqrt();
    let base = C64::new(alpha - p.c / (2.0 * p.d), 0.0);
    [base + root / (2.0 * p.d), base - root / (2.0 * p.d)]
}

/// Analytic eigenpairs of the block-triangular limit matrix.
///
/// `u`-block modes are `(1, μ, β, βμ)` with `β` solving the forced `v`
/// equation; `v`-block modes are `(0, 0, 1, η)`.
pub fn limit_modes(p: &ModelParams, i_inf: f64, alpha: f64, lambda: C64) -> Result<[LimitMode; 4]> {
    let ups = upper_block_eigenvalues(p, i_inf, alpha, lambda);
    let lows = lower_block_eigenvalues(p, alpha, lambda);
    let shift = lambda + (p.c * alpha - p.d * alpha * alpha);
    let mut modes = [LimitMode { mu: ZERO, vector: [ZERO; 4] }; 4];
    for (m, &mu) in modes.iter_mut().zip(&ups) {
        let denom = mu * mu * p.d + mu * (p.c - 2.0 * p.d * alpha) - shift;
        if denom.norm() < 1e-12 {
            return Err(Error::Numeric(alloc::format!(
                "u- and v-block spatial eigenvalues coincide at lambda = {lambda}"
            )));
        }
        let beta = -(i_inf + p.r) / denom;
        *m = LimitMode { mu, vector: [ONE, mu, beta, beta * mu] };
    }
    for (m, &eta) in modes[2..].iter_mut().zip(&lows) {
        *m = LimitMode { mu: eta, vector: [ZERO, ZERO, ONE, eta] };
    }
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat_vec;

    fn params() -> ModelParams {
        ModelParams::new(2.0, 0.3, 1.0).unwrap()
    }

    #[test]
    fn limit_modes_are_eigenpairs() {
        let p = params();
        let limits = ProfileLimits { i_minus: 1.954, i_plus: 0.0 };
        let w = WeightSpec::critical(0.5).unwrap();
        for lambda in [C64::new(0.7, 2.0), C64::new(0.0, -5.0), C64::new(12.0, 0.1)] {
            for side in [Side::Minus, Side::Plus] {
                let m = limit_matrix(side, lambda, &limits, &w, &p).unwrap();
                let modes = limit_modes(&p, limits.on(side), w.alpha(side), lambda).unwrap();
                for mode in modes {
                    let mv = mat_vec(&m, &mode.vector);
                    let res: f64 = mv.iter().zip(&mode.vector).map(|(a, b)| (a - b * mode.mu).norm()).sum();
                    assert!(res < 1e-11, "{side:?} λ={lambda} μ={} residual {res}", mode.mu);
                }
            }
        }
    }

    #[test]
    fn eigenvalues_match_generic_solver() {
        let p = params();
        let limits = ProfileLimits { i_minus: 1.954, i_plus: 0.0 };
        let w = WeightSpec::critical(0.5).unwrap();
        let lambda = C64::new(0.4, 1.3);
        let m = limit_matrix(Side::Minus, lambda, &limits, &w, &p).unwrap();
        let nm = nalgebra::Matrix4::from_fn(|i, j| m[i][j]);
        let mut oracle: std::vec::Vec<C64> = nm.schur().eigenvalues().unwrap().iter().copied().collect();
        let mut ours: std::vec::Vec<C64> = limit_modes(&p, 1.954, 0.5, lambda).unwrap().iter().map(|m| m.mu).collect();
        let key = |z: &C64| (z.re * 1e6).round() as i64;
        oracle.sort_by_key(key);
        ours.sort_by_key(key);
        for (a, b) in oracle.iter().zip(&ours) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn critical_plus_side_eigenvalues() {
        let p = params();
        let lambda = C64::new(0.3, 0.8);
        let nu = upper_block_eigenvalues(&p, 0.0, 1.0, lambda);
        assert!((nu[0] - lambda.sqrt()).norm() < 1e-15);
        assert!((nu[1] + lambda.sqrt()).norm() < 1e-15);
        let eta = lower_block_eigenvalues(&p, 1.0, lambda);
        let root = (lambda * p.d + 1.0).sqrt();
        assert!((eta[0] - (root + (p.d - 1.0)) / p.d).norm() < 1e-13);
        assert!((eta[1] - ((p.d - 1.0) - root) / p.d).norm() < 1e-13);
        let zero = upper_block_eigenvalues(&p, 0.0, 1.0, C64::new(0.0, 0.0));
        assert_eq!(zero[0], ZERO);
    }

    #[test]
    fn reduced_diffusion_unsupported() {
        let p = ModelParams::new(2.0, 0.0, 0.0).unwrap();
        let limits = ProfileLimits { i_minus: 2.0, i_plus: 0.0 };
        let r = limit_matrix(Side::Plus, ONE, &limits, &WeightSpec::exponential(), &p);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
