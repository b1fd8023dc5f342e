//! Mixed Lebesgue, Bourgain-Morrey, Morrey and block-slice norms of step functions.

pub(crate) mod blockwise;
mod bm;
mod mixed;
mod weights;

pub use bm::{
    bm_norm, bm_norm_bracket, chi_bm_closed_form, indicator_mixed_norm, morrey_norm, shifted_bm_norm_bracket,
    slice_norm, vector_bm_norm, vector_bm_norm_bracket, vector_slice_norm, NormBracket,
};
pub(crate) use bm::slice_terms;
pub use mixed::{mixed_norm, partial_norms};
pub use weights::{a1_ratio, mit_chi_weight, weighted_mixed_norm, AxisWeightProfile, WeightPiece};
