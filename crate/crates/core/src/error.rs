use alloc::string::String;
use core::fmt;

use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical routines.
///
/// Scientific check failures (a property that does not hold, a KS test that
/// rejects) are reported through the result types of the individual checks,
/// not through this enum.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or input lies outside the domain of the operation.
    Domain(String),
    /// Parameters violate the existence condition `0 < d < min{1, 3c/2, c²/(2(r+1))}`.
    Inadmissible { bound: &'static str, d: f64, limit: f64 },
    /// The fixed point is at a bifurcation value of `K`.
    BifurcationPoint { k: f64 },
    /// The requested case is not handled by this routine.
    Unsupported(&'static str),
    /// Invalid integrator, simulation or sampling configuration.
    Config(String),
    /// A bracket does not straddle the sign change.
    Bracket { lo: f64, hi: f64, detail: String },
    /// The outcome map was observed to be non-monotone during root finding.
    NonMonotone { k_prev: f64, k_next: f64 },
    /// A shot neither converged nor went negative within its budget.
    Undecided { k: f64, detail: &'static str },
    /// `lambda` is not in the region of consistent splitting.
    SpectralRegion { lambda: C64, k1: usize, k2: usize },
    /// Integration or linear algebra failed.
    Numeric(String),
    /// Consecutive contour samples are too far apart in argument.
    RefinementNeeded { index: usize, jump: f64 },
    /// Time step exceeds the explicit stability limit.
    Cfl { dt: f64, limit: f64 },
    /// Simulation left the physically plausible range.
    BlowUp { t: f64, max_abs: f64 },
    /// Too few samples for a fit.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Inadmissible { bound, d, limit } => {
                write!(f, "inadmissible parameters: d = {d} violates d < {bound} = {limit}")
            }
            Error::BifurcationPoint { k } => {
                write!(f, "K = {k} is a bifurcation point of the fixed-point linearization")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Bracket { lo, hi, detail } => {
                write!(f, "bracket [{lo}, {hi}] does not straddle a root: {detail}")
            }
            Error::NonMonotone { k_prev, k_next } => {
                write!(f, "non-monotone outcome map between K = {k_prev} and K = {k_next}")
            }
            Error::Undecided { k, detail } => write!(f, "shot at K = {k} undecided: {detail}"),
            Error::SpectralRegion { lambda, k1, k2 } => {
                write!(f, "lambda = {lambda} is outside the region of consistent splitting (k1 = {k1}, k2 = {k2})")
            }
            Error::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            Error::RefinementNeeded { index, jump } => {
                write!(f, "argument jump {jump} at sample {index} is too large; refine the contour")
            }
            Error::Cfl { dt, limit } => write!(f, "time step {dt} exceeds stability limit {limit}"),
            Error::BlowUp { t, max_abs } => write!(f, "blow-up at t = {t}: max |A| = {max_abs}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need {needed} points, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
