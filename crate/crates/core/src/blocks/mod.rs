//! Blocks, the block-space norm bracket and the Hölder attainer.
//!
//! A block on a cube `Q` is supported in `Q` with `||b||_{L^{p_bar'}} <= |Q|^{1/t - sigma}`.
//! Block-space norms are infima over decompositions, so they are bracketed: any single-level
//! decomposition gives an upper bound, and any test function `f` gives the lower bound
//! `|<g, f>| / ||f||` by duality.

mod bracket;

pub use bracket::{
    block_bracket, h_norm_lower, h_norm_upper, single_level_decomposition, vector_block_bracket, BlockDecomposition,
    BlockTerm,
};

use crate::error::{Error, Result};
use crate::grid::{common_grid, DyadicCube, ExponentVector, SpaceParams, StepFunction};
use crate::norms::{mixed_norm, partial_norms};
use crate::util::{pairwise_sum, pow2};

/// `int f g` on a common grid.
pub fn pairing(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    let (a, b) = common_grid(f, g)?;
    let prods: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    Ok(pairwise_sum(&prods) * a.cell_volume())
}

/// `|Q|^{1/t - sigma}`.
fn block_bound(cube: &DyadicCube, params: &SpaceParams) -> f64 {
    pow2(-(cube.level as f64) * cube.dim() as f64 * params.cube_exponent())
}

/// Support in `Q` and `||b||_{p_bar'} <= |Q|^{1/t - sigma}` (relative slack `1e-12`).
pub fn is_block(b: &StepFunction, cube: &DyadicCube, params: &SpaceParams) -> Result<bool> {
    let inside = b.restrict(cube)?;
    let (full, inside) = common_grid(b, &inside)?;
    if full.values() != inside.values() {
        return Ok(false);
    }
    let dual = params.pbar.conjugate()?;
    let bound = block_bound(cube, params);
    Ok(mixed_norm(b, &dual)? <= bound * (1.0 + 1e-12))
}

/// `f = lambda b` with `b` a block on `Q`; `f` must vanish outside `Q`.
///
/// `lambda = ||f||_{p_bar'} |Q|^{sigma - 1/t}`. The zero function splits as
/// `0 * (|Q|^{1/t - 1} chi_Q)`.
pub fn block_split(f: &StepFunction, cube: &DyadicCube, params: &SpaceParams) -> Result<(f64, StepFunction)> {
    let dual = params.pbar.conjugate()?;
    let norm = mixed_norm(f, &dual)?;
    let bound = block_bound(cube, params);
    if norm == 0.0 {
        let chi = StepFunction::indicator(f.dim(), f.level(), f.window(), cube)?;
        return Ok((0.0, chi.scale(pow2(-(cube.level as f64) * cube.dim() as f64 * (1.0 / params.t - 1.0)))));
    }
    Ok((norm / bound, f.scale(bound / norm)))
}

/// Unit-normalized Hölder dual of `f chi_Q` in `L^{p_bar}`:
/// `int f g = ||f chi_Q||_{p_bar}` and `||g||_{p_bar'} = 1`.
///
/// `g = sgn f |f|^{p_1 - 1} prod_i F_i^{p_{i+1} - p_i} / ||f chi_Q||^{p_n - 1}`, with
/// `F_i` the partial norm over the first `i` axes; zero wherever `f` vanishes.
pub fn holder_dual(f: &StepFunction, cube: &DyadicCube, pbar: &ExponentVector) -> Result<StepFunction> {
    if !pbar.is_reflexive() {
        return Err(Error::InvalidExponent("the attainer needs every p_i strictly between 1 and inf".into()));
    }
    if f.dim() != pbar.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: pbar.dim() });
    }
    let fq = f.restrict(cube)?;
    let stages = partial_norms(&fq, pbar)?;
    let n = fq.dim();
    let total = stages[n - 1][0];
    let mut out = fq.clone();
    if total == 0.0 {
        out.values_mut().iter_mut().for_each(|v| *v = 0.0);
        return Ok(out);
    }
    let ps = pbar.as_slice();
    let per = fq.cells_per_axis();
    let denom = total.powf(ps[n - 1] - 1.0);
    for (lin, v) in out.values_mut().iter_mut().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let mut g = v.signum() * v.abs().powf(ps[0] - 1.0);
        let mut rest = lin;
        for i in 1..n {
            rest /= per;
            let fi = stages[i - 1][rest];
            g *= fi.powf(ps[i] - ps[i - 1]);
        }
        *v = g / denom;
    }
    Ok(out)
}

/// Hölder attainer on `Q`: `int f g = |Q|^{1/t - sigma} ||f chi_Q||_{p_bar}` and
/// `||g||_{p_bar'} = |Q|^{1/t - sigma}`, so `g` is a block on `Q`.
pub fn holder_attainer(f: &StepFunction, cube: &DyadicCube, params: &SpaceParams) -> Result<StepFunction> {
    Ok(holder_dual(f, cube, &params.pbar)?.scale(block_bound(cube, params)))
}
