//! Mixed-norm Bourgain-Morrey spaces on dyadic step functions.
//!
//! Functions live on a window `[0, 2^K)^n` and are constant on cells of side
//! `2^{-J}` (or `2^{-J}/3` after third-refinement). Norms sum the dyadic levels
//! inside the window exactly and add the levels outside it in closed form, so
//! results are exact up to rounding. Operators either produce exact step functions
//! or flag their output as approximate.

pub mod blocks;
pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
