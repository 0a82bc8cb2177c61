use alloc::vec::Vec;

use super::essential::{Family, SpectrumCurves};

/// Label attached to every assumption report.
pub const EVIDENCE_NOTE: &str = "numerical evidence, not proof";

/// Default `(δ₀, δ₁)` candidates tried by [`check_assumption_region`].
pub const DEFAULT_CANDIDATES: [(f64, f64); 6] =
    [(0.05, 0.0), (0.1, 0.1), (0.25, 0.25), (0.5, 0.1), (0.5, 0.5), (1.0, 0.1)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateRegion {
    pub delta0: f64,
    pub delta1: f64,
    /// `min (-δ₀ - δ₁|Im λ| - Re λ)` over the sampled curves other than `Σν`.
    pub margin: f64,
    pub admissible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssumptionVerdict {
    /// No zeros inside the contour and at least one admissible candidate.
    Supported,
    /// No zeros inside the contour, but every candidate touches a curve.
    NoAdmissibleCandidate,
    /// The Evans function winds around the origin.
    Violated { winding: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub verdict: AssumptionVerdict,
    pub winding: i64,
    pub closure_residual: f64,
    pub candidates: Vec<CandidateRegion>,
    pub note: &'static str,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.verdict == AssumptionVerdict::Supported
    }

    pub fn admissible(&self) -> impl Iterator<Item = &CandidateRegion> {
        self.candidates.iter().filter(|c| c.admissible)
    }
}

/// Combines the Evans winding number with the essential-spectrum curves.
///
/// A candidate `(δ₀, δ₁)` is admissible when the winding number vanishes and
/// every sampled point of `Ση`, `Σσ`, `Σφ` satisfies
/// `Re λ < -δ₀ - δ₁|Im λ|`.
pub fn check_assumption_region(
    curves: &SpectrumCurves,
    winding: i64,
    closure_residual: f64,
    candidates: &[(f64, f64)],
) -> AssumptionReport {
    let points: Vec<_> =
        curves.iter().filter(|c| c.family != Family::Nu).flat_map(|c| c.points.iter().copied()).collect();
    let candidates: Vec<CandidateRegion> = candidates
        .iter()
        .map(|&(delta0, delta1)| {
            let margin = points.iter().map(|z| -delta0 - delta1 * z.im.abs() - z.re).fold(f64::INFINITY, f64::min);
            CandidateRegion { delta0, delta1, margin, admissible: winding == 0 && margin > 0.0 }
        })
        .collect();
    let verdict = if winding != 0 {
        AssumptionVerdict::Violated { winding }
    } else if candidates.iter().any(|c| c.admissible) {
        AssumptionVerdict::Supported
    } else {
        AssumptionVerdict::NoAdmissibleCandidate
    };
    AssumptionReport { verdict, winding, closure_residual, candidates, note: EVIDENCE_NOTE }
}
