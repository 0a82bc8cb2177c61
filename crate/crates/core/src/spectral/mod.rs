//! Spectral stability of weighted traveling fronts.

pub mod assumption;
pub mod contour;
pub mod energy;
pub mod essential;
pub mod evans;
pub mod matrix;
pub mod stability;
pub mod synthetic;
pub mod weight;
pub mod winding;

pub use assumption::{check_assumption_region, AssumptionReport, AssumptionVerdict, CandidateRegion};
pub use contour::{evans_contour, trace_contour, ContourSpec, ContourTrace};
pub use energy::{energy_bound, general_energy_bound, EigenvalueBox, EquationBound};
pub use essential::{essential_spectrum_curves, symmetric_grid, DispersionCurve, Family, SpectrumCurves};
pub use evans::{consistent_splitting_dims, evans_function, EvansOptions};
pub use matrix::{EvansSystem, LimitMode, ProfileLimits, WaveLinearization};
pub use stability::{conjugate_symmetry_defect, evans_winding, evans_winding_with, EvansResult};
pub use synthetic::PlantedSystem;
pub use weight::{WeightSpec, WeightValue};
pub use winding::winding_number;

/// End of the line at which a limit is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}
