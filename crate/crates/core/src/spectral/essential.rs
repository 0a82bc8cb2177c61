use alloc::vec::Vec;

use super::matrix::ProfileLimits;
use super::weight::WeightSpec;
use super::Side;
use crate::model::ModelParams;
use crate::roots::brent;
use crate::{Error, Result, C64};

/// The four boundary families of the essential spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `u` block at `+∞`.
    Nu,
    /// `v` block at `+∞`.
    Eta,
    /// `u` block at `-∞`.
    Sigma,
    /// `v` block at `-∞`.
    Phi,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Nu, Family::Eta, Family::Sigma, Family::Phi];

    pub fn side(self) -> Side {
        match self {
            Family::Nu | Family::Eta => Side::Plus,
            Family::Sigma | Family::Phi => Side::Minus,
        }
    }

    fn upper(self) -> bool {
        matches!(self, Family::Nu | Family::Sigma)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Nu => "sigma_nu",
            Family::Eta => "sigma_eta",
            Family::Sigma => "sigma_sigma",
            Family::Phi => "sigma_phi",
        }
    }
}

/// Dispersion data of one family: `Re μ = 0` on the curve iff
/// `Re √(offset + scale·λ) = level`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Dispersion {
    offset: f64,
    scale: f64,
    level: f64,
}

impl Dispersion {
    fn new(family: Family, p: &ModelParams, i_inf: f64, alpha: f64) -> Self {
        if family.upper() {
            Self { offset: p.c * p.c / 4.0 + i_inf - 1.0, scale: 1.0, level: (p.c / 2.0 - alpha).abs() }
        } else {
            Self { offset: p.c * p.c, scale: 4.0 * p.d, level: (p.c - 2.0 * p.d * alpha).abs() }
        }
    }

    fn residual(&self, re: f64, im: f64) -> f64 {
        (C64::new(self.offset + self.scale * re, self.scale * im)).sqrt().re - self.level
    }

    /// `Re λ` on the curve at `Im λ = im`, in closed form.
    fn closed_form(&self, im: f64) -> f64 {
        let q = self.level;
        let s_im = self.scale * im;
        (q * q - s_im * s_im / (4.0 * q * q) - self.offset) / self.scale
    }

    fn degenerate(&self) -> bool {
        self.level < 1e-12
    }

    fn vertex(&self) -> f64 {
        if self.degenerate() {
            -self.offset / self.scale
        } else {
            self.closed_form(0.0)
        }
    }
}

/// Dispersion relation `λ(k)` obtained from `μ = ik`.
pub fn dispersion_lambda(family: Family, k: f64, p: &ModelParams, i_inf: f64, alpha: f64) -> C64 {
    if family.upper() {
        C64::new(-k * k - (i_inf - 1.0 + p.c * alpha - alpha * alpha), (p.c - 2.0 * alpha) * k)
    } else {
        C64::new(-p.d * k * k - (p.c * alpha - p.d * alpha * alpha), (p.c - 2.0 * p.d * alpha) * k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCurve {
    pub family: Family,
    /// Root-found boundary points ordered by `Im λ` (by `Re λ` for a half-line).
    pub points: Vec<C64>,
    pub max_real_part: f64,
    /// The family collapses to the half-line `{Im λ = 0, Re λ ≤ vertex}`.
    pub half_line: bool,
    /// Largest `|Re λ|` difference between root-found and closed-form points.
    pub closed_form_mismatch: f64,
    /// Grid values at which the root finder failed.
    pub omitted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCurves {
    pub sigma_nu: DispersionCurve,
    pub sigma_eta: DispersionCurve,
    pub sigma_sigma: DispersionCurve,
    pub sigma_phi: DispersionCurve,
}

impl SpectrumCurves {
    pub fn iter(&self) -> impl Iterator<Item = &DispersionCurve> {
        [&self.sigma_nu, &self.sigma_eta, &self.sigma_sigma, &self.sigma_phi].into_iter()
    }

    pub fn max_closed_form_mismatch(&self) -> f64 {
        self.iter().map(|c| c.closed_form_mismatch).fold(0.0, f64::max)
    }
}

fn root_found_re(disp: &Dispersion, im: f64) -> Result<f64> {
    let f = |re: f64| disp.residual(re, im);
    let mut hi = (disp.level * disp.level - disp.offset) / disp.scale + 1.0;
    while f(hi) <= 0.0 {
        hi = 2.0 * hi.abs() + 1.0;
    }
    let mut lo = hi - 1.0;
    let mut tries = 0;
    while f(lo) > 0.0 {
        lo = hi - 2.0 * (hi - lo);
        tries += 1;
        if tries > 200 {
            return Err(Error::Numeric("no lower bracket for dispersion curve".into()));
        }
    }
    brent(f, lo, hi, 1e-14, 200)
}

/// Root-finds each family of the essential-spectrum boundary on the given
/// `Im λ` grid and cross-checks against the closed-form parabolas.
pub fn essential_spectrum_curves(
    params: &ModelParams,
    weight: &WeightSpec,
    limits: &ProfileLimits,
    im_grid: &[f64],
) -> Result<SpectrumCurves> {
    if params.d <= 0.0 {
        return Err(Error::Unsupported("essential spectrum curves need d > 0"));
    }
    if weight.alpha_minus >= 1.0 {
        return Err(Error::Domain(alloc::format!(
            "alpha_minus < 1 required (got {}): a larger left exponent over-stabilizes the sigma curve",
            weight.alpha_minus
        )));
    }
    let extent = im_grid.iter().fold(1.0f64, |m, y| m.max(y.abs()));
    let curve = |family: Family| -> Result<DispersionCurve> {
        let side = family.side();
        let disp = Dispersion::new(family, params, limits.on(side), weight.alpha(side));
        let mut points = Vec::with_capacity(im_grid.len());
        let mut mismatch: f64 = 0.0;
        let mut omitted = 0;
        if disp.degenerate() {
            let vertex = disp.vertex();
            let n = im_grid.len().max(2);
            for j in 0..n {
                points.push(C64::new(vertex - extent * j as f64 / (n - 1) as f64, 0.0));
            }
        } else {
            for &im in im_grid {
                match root_found_re(&disp, im) {
                    Ok(re) => {
                        mismatch = mismatch.max((re - disp.closed_form(im)).abs());
                        points.push(C64::new(re, im));
                    }
                    Err(_) => omitted += 1,
                }
            }
        }
        let max_real_part = points.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        Ok(DispersionCurve {
            family,
            points,
            max_real_part,
            half_line: disp.degenerate(),
            closed_form_mismatch: mismatch,
            omitted,
        })
    };
    Ok(SpectrumCurves {
        sigma_nu: curve(Family::Nu)?,
        sigma_eta: curve(Family::Eta)?,
        sigma_sigma: curve(Family::Sigma)?,
        sigma_phi: curve(Family::Phi)?,
    })
}

/// Rightmost point (`Im λ = 0`) of a family.
pub fn curve_vertex(family: Family, params: &ModelParams, weight: &WeightSpec, limits: &ProfileLimits) -> f64 {
    let side = family.side();
    Dispersion::new(family, params, limits.on(side), weight.alpha(side)).vertex()
}

/// Uniform grid on `[-extent, extent]`.
pub fn symmetric_grid(extent: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|j| -extent + 2.0 * extent * j as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det4, Mat4};
    use crate::spectral::matrix::limit_matrix;

    fn setup() -> (ModelParams, WeightSpec, ProfileLimits) {
        (
            ModelParams::new(2.0, 0.3, 1.0).unwrap(),
            WeightSpec::critical(0.5).unwrap(),
            ProfileLimits { i_minus: 1.95403, i_plus: 0.0 },
        )
    }

    fn shifted(m: Mat4, mu: C64) -> Mat4 {
        let mut m = m;
        for (k, row) in m.iter_mut().enumerate() {
            row[k] -= mu;
        }
        m
    }

    #[test]
    fn nu_is_negative_half_line() {
        let (p, w, l) = setup();
        let curves = essential_spectrum_curves(&p, &w, &l, &symmetric_grid(5.0, 41)).unwrap();
        let nu = &curves.sigma_nu;
        assert!(nu.half_line);
        assert!(nu.points.iter().all(|z| z.im == 0.0 && z.re <= 0.0));
        assert_eq!(nu.max_real_part, 0.0);
        // λ = -1 solves the dispersion relation at k = 1.
        let m = limit_matrix(Side::Plus, C64::new(-1.0, 0.0), &l, &w, &p).unwrap();
        assert!(det4(&shifted(m, C64::new(0.0, 1.0))).norm() < 1e-12);
    }

    #[test]
    fn eta_vertex() {
        let (p, w, l) = setup();
        let v = curve_vertex(Family::Eta, &p, &w, &l);
        assert!((v - (-1.7)).abs() < 1e-12, "vertex {v}");
        // The same value from the dispersion relation at k = 0.
        assert!((dispersion_lambda(Family::Eta, 0.0, &p, 0.0, 1.0).re - v).abs() < 1e-14);
    }

    #[test]
    fn other_families_strictly_stable() {
        let (p, w, l) = setup();
        let curves = essential_spectrum_curves(&p, &w, &l, &symmetric_grid(20.0, 201)).unwrap();
        for c in [&curves.sigma_eta, &curves.sigma_sigma, &curves.sigma_phi] {
            assert!(c.max_real_part < 0.0, "{:?}", c.family);
            assert_eq!(c.omitted, 0);
        }
        assert!(curves.max_closed_form_mismatch() < 1e-6);
    }

    #[test]
    fn curve_points_solve_dispersion() {
        let (p, w, l) = setup();
        let curves = essential_spectrum_curves(&p, &w, &l, &symmetric_grid(6.0, 13)).unwrap();
        for c in curves.iter().filter(|c| !c.half_line) {
            let side = c.family.side();
            for &lambda in &c.points {
                let m = limit_matrix(side, lambda, &l, &w, &p).unwrap();
                let modes = crate::spectral::matrix::limit_modes(&p, l.on(side), w.alpha(side), lambda).unwrap();
                let closest = modes.iter().map(|m| m.mu.re.abs()).fold(f64::INFINITY, f64::min);
                assert!(closest < 1e-9, "{:?} at {lambda}: {closest}", c.family);
                let mu = modes.iter().min_by(|a, b| a.mu.re.abs().partial_cmp(&b.mu.re.abs()).unwrap()).unwrap().mu;
                assert!(det4(&shifted(m, mu)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn overstabilized_left_weight_rejected() {
        let (p, _, l) = setup();
        let w = WeightSpec::exponential();
        let err = essential_spectrum_curves(&p, &w, &l, &[0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("alpha_minus < 1")));
    }
}
