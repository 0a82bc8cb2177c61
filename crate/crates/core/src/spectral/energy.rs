#[allow(unused_imports)]
use num_traits::Float;

use crate::model::ModelParams;
use crate::{Error, Result};

/// Per-equation constants of a reaction-diffusion eigenvalue bound: diffusion
/// `D`, drift magnitude `c` and potential bound `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquationBound {
    pub diffusion: f64,
    pub drift: f64,
    pub potential: f64,
}

/// Bounds on unstable eigenvalues: `Re λ ≤ max M`, `|Im λ| ≤ max (c√(M/D) + M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueBox {
    pub re_max: f64,
    pub im_max: f64,
}

impl EigenvalueBox {
    /// Radius of a disc that contains the box in the closed right half-plane.
    pub fn radius(&self) -> f64 {
        core::f64::consts::SQRT_2 * self.re_max.max(self.im_max)
    }
}

pub fn general_energy_bound(eqs: &[EquationBound]) -> EigenvalueBox {
    let re_max = eqs.iter().map(|e| e.potential).fold(f64::NEG_INFINITY, f64::max);
    let im_max = eqs
        .iter()
        .map(|e| e.drift * (e.potential / e.diffusion).sqrt() + e.potential)
        .fold(f64::NEG_INFINITY, f64::max);
    EigenvalueBox { re_max, im_max }
}

/// Constants of the critical-front operator with weight `e^{-x}`.
pub fn critical_front_equations(params: &ModelParams) -> [EquationBound; 2] {
    [
        EquationBound { diffusion: 1.0, drift: 0.0, potential: 3.0 },
        EquationBound { diffusion: params.d, drift: 2.0 - 2.0 * params.d, potential: 5.0 + params.r },
    ]
}

/// Radius `√2·[(2 - 2d)√((5 + r)/d) + 5 + r]` enclosing every eigenvalue with
/// non-negative real part of the critical front (`c = 2`, weight `e^{-x}`).
pub fn energy_bound(params: &ModelParams) -> Result<f64> {
    if !(params.d > 0.0 && params.d < 1.0) {
        return Err(Error::Domain(alloc::format!("energy bound needs d in (0, 1), got {}", params.d)));
    }
    Ok(general_energy_bound(&critical_front_equations(params)).radius())
}
