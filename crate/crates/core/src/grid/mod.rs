//! Exponent vectors, dyadic cubes and step functions on a bounded dyadic window.

pub(crate) mod cube;
mod exponent;
mod step;
pub mod text;

pub use cube::{all_shifts, cubes_in_window, DyadicCube};
pub use exponent::{conjugate, DualParams, ExponentVector, Regime, SpaceParams};
pub use step::{common_grid, for_each_in_box, CellBox, StepFunction, VectorStepFunction};
