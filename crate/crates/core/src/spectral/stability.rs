use alloc::vec::Vec;

use super::contour::{trace_contour, ContourSpec, ContourTrace};
use super::evans::{consistent_splitting_dims, evans_function, EvansOptions};
use super::matrix::EvansSystem;
use super::winding::winding_number;
use crate::{Result, C64};

/// Evans function sampled along a closed contour with its winding number.
#[derive(Clone, Debug, PartialEq)]
pub struct EvansResult {
    pub trace: ContourTrace,
    pub winding: i64,
    pub closure_residual: f64,
    pub radius: f64,
    pub delta: f64,
    /// `(k₁, k₂)` at every contour sample.
    pub dims: Vec<(usize, usize)>,
}

impl EvansResult {
    pub fn splitting_consistent(&self) -> bool {
        self.dims.iter().all(|&(k1, k2)| k1 + k2 == 4)
    }
}

/// Traces `system`'s Evans function around `spec`; `eval_many` maps a batch
/// of spectral parameters to Evans values and may run in parallel.
pub fn evans_winding_with<S, F>(system: &S, spec: &ContourSpec, eval_many: F) -> Result<EvansResult>
where
    S: EvansSystem + ?Sized,
    F: FnMut(&[C64]) -> Result<Vec<C64>>,
{
    let trace = trace_contour(spec, eval_many)?;
    let (winding, closure_residual) = winding_number(&trace.closed_values(), true)?;
    let dims = trace.lambdas.iter().map(|&l| consistent_splitting_dims(system, l)).collect::<Result<Vec<_>>>()?;
    Ok(EvansResult { trace, winding, closure_residual, radius: spec.radius, delta: spec.delta, dims })
}

/// Sequential [`evans_winding_with`].
pub fn evans_winding<S: EvansSystem + ?Sized>(
    system: &S,
    spec: &ContourSpec,
    opts: &EvansOptions,
) -> Result<EvansResult> {
    evans_winding_with(system, spec, |ls| ls.iter().map(|&l| evans_function(system, l, opts)).collect())
}

/// Largest relative defect `|E(λ̄) - conj E(λ)| / |E(λ)|` over `lambdas`.
///
/// The operator is real, so the Evans function commutes with conjugation.
pub fn conjugate_symmetry_defect<S: EvansSystem + ?Sized>(
    system: &S,
    lambdas: &[C64],
    opts: &EvansOptions,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        let e = evans_function(system, l, opts)?;
        let e_bar = evans_function(system, l.conj(), opts)?;
        worst = worst.max((e_bar - e.conj()).norm() / e.norm());
    }
    Ok(worst)
}
