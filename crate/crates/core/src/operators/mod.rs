//! Conditional expectations, maximal functions, potentials and convolution on step functions.

mod conditional;
mod convolution;
mod maximal;
mod potential;

pub use conditional::{cond_expect, doob_maximal};
pub use convolution::convolve_project;
pub use maximal::{dyadic_maximal_shifted, hl_maximal_lower, iterated_maximal_grid, maximal_1d_grid};
pub use potential::{frac_integral, singular_apply, SingularKernel};

use crate::error::Result;
use crate::grid::StepFunction;

/// Operator selector shared by the command line and the probes.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    CondExpect(i32),
    Doob,
    ShiftedMaximal(Vec<u8>),
    IteratedMaximal,
    FracIntegral(f64),
    Singular(SingularKernel),
    Convolve(StepFunction),
}

impl Operator {
    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        match self {
            Operator::CondExpect(k) => cond_expect(f, *k),
            Operator::Doob => doob_maximal(f),
            Operator::ShiftedMaximal(a) => dyadic_maximal_shifted(f, a),
            Operator::IteratedMaximal => iterated_maximal_grid(f),
            Operator::FracIntegral(alpha) => frac_integral(f, *alpha),
            Operator::Singular(k) => singular_apply(f, k),
            Operator::Convolve(g) => convolve_project(f, g),
        }
    }
}
