//! A decoupled test problem with one planted eigenvalue.
//!
//! `u'' = (λ - 2 sech² x) u`, `v'' = (λ + 1) v`. The potential well has the
//! bound state `sech x` at `λ = 1` and essential spectrum `(-∞, 0]`, so any
//! contour around `{Re λ ≥ 0, δ ≤ |λ| ≤ R}` with `R > 1` winds once.

#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{EvansSystem, LimitMode};
use super::Side;
use crate::linalg::{Mat4, ONE, ZERO};
use crate::{Result, C64};

/// The planted eigenvalue.
pub const PLANTED_EIGENVALUE: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlantedSystem;

fn potential(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    -2.0 * s * s
}

fn block(entry: C64) -> [[C64; 2]; 2] {
    [[ZERO, ONE], [entry, ZERO]]
}

fn assemble(u_entry: C64, v_entry: C64) -> Mat4 {
    let (u, v) = (block(u_entry), block(v_entry));
    [
        [u[0][0], u[0][1], ZERO, ZERO],
        [u[1][0], u[1][1], ZERO, ZERO],
        [ZERO, ZERO, v[0][0], v[0][1]],
        [ZERO, ZERO, v[1][0], v[1][1]],
    ]
}

impl EvansSystem for PlantedSystem {
    fn matrix(&self, x: f64, lambda: C64) -> Mat4 {
        assemble(lambda + potential(x), lambda + 1.0)
    }

    fn limit_matrix(&self, _side: Side, lambda: C64) -> Mat4 {
        assemble(lambda, lambda + 1.0)
    }

    fn limit_modes(&self, _side: Side, lambda: C64) -> Result<[LimitMode; 4]> {
        let k = lambda.sqrt();
        let q = (lambda + 1.0).sqrt();
        Ok([
            LimitMode { mu: k, vector: [ONE, k, ZERO, ZERO] },
            LimitMode { mu: -k, vector: [ONE, -k, ZERO, ZERO] },
            LimitMode { mu: q, vector: [ZERO, ZERO, ONE, q] },
            LimitMode { mu: -q, vector: [ZERO, ZERO, ONE, -q] },
        ])
    }
}
