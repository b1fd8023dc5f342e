//! Bourgain-Morrey norms: the infinite dyadic sum is split into the window levels,
//! summed exactly, plus closed-form tails above and below.

use rayon::prelude::*;

use super::blockwise::cube_norms;
use super::mixed::mixed_norm;
use crate::error::{Error, Result};
use crate::grid::{DualParams, ExponentVector, Regime, SpaceParams, StepFunction, VectorStepFunction};
use crate::util::{abs_pow, pairwise_sum, pow2, root};

/// Certified enclosure `lower <= ||f|| <= upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
}

impl NormBracket {
    /// `upper / lower` (1 for the zero function).
    pub fn ratio(&self) -> f64 {
        if self.upper == 0.0 {
            1.0
        } else {
            self.upper / self.lower
        }
    }

    pub fn contains(&self, v: f64, rel_tol: f64) -> bool {
        v >= self.lower * (1.0 - rel_tol) && v <= self.upper * (1.0 + rel_tol)
    }
}

fn check(f: &StepFunction, params: &SpaceParams) -> Result<()> {
    if f.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: params.dim() });
    }
    Ok(())
}

fn require_depth0(f: &StepFunction) -> Result<()> {
    if f.depth() != 0 {
        return Err(Error::InvalidParams(
            "exact norm needs a depth-0 grid; use bm_norm_bracket for third-refined inputs".into(),
        ));
    }
    Ok(())
}

/// `sum_Q (|Q|^{1/t - sigma} ||f chi_Q||)^r` over one level (optionally shifted).
fn level_sum(f: &StepFunction, params: &SpaceParams, j: i32, shift: Option<&[u8]>) -> Result<f64> {
    let w = pow2(-(j as f64) * f.dim() as f64 * params.cube_exponent());
    let norms = cube_norms(f, j, shift, params.pbar.as_slice())?;
    let terms: Vec<f64> = norms.iter().map(|&v| abs_pow(w * v, params.r)).collect();
    Ok(pairwise_sum(&terms))
}

/// `sum_Q (|Q|^{1/t} sup_Q |f|)^r` over one level.
fn level_sup_sum(f: &StepFunction, params: &SpaceParams, j: i32, shift: Option<&[u8]>) -> Result<f64> {
    let w = pow2(-(j as f64) * f.dim() as f64 / params.t);
    let sup = vec![f64::INFINITY; f.dim()];
    let maxes = cube_norms(f, j, shift, &sup)?;
    let terms: Vec<f64> = maxes.iter().map(|&v| abs_pow(w * v, params.r)).collect();
    Ok(pairwise_sum(&terms))
}

fn levels_sum(f: &StepFunction, params: &SpaceParams, lo: i32, hi: i32, shift: Option<&[u8]>, sup: bool) -> Result<f64> {
    if hi < lo {
        return Ok(0.0);
    }
    let parts: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|j| if sup { level_sup_sum(f, params, j, shift) } else { level_sum(f, params, j, shift) })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Levels strictly below `j_lo` see a single cube holding the whole window:
/// `||f||^r sum_{j < j_lo} 2^{-j e}` with `e = n r (1/t - sigma) < 0`.
fn coarse_tail(f: &StepFunction, params: &SpaceParams, j_lo: i32) -> Result<f64> {
    let e = f.dim() as f64 * params.r * params.cube_exponent();
    let norm_r = abs_pow(mixed_norm(f, &params.pbar)?, params.r);
    Ok(norm_r * pow2(-(j_lo as f64) * e) * pow2(e) / (1.0 - pow2(e)))
}

/// `sum_c |v_c|^r 2^{-J n r / t} q / (1 - q)` with `q = 2^{n(1 - r/t)}`.
///
/// Exactly the levels above `J` on an unshifted depth-0 grid.
fn fine_tail_cells(f: &StepFunction, params: &SpaceParams) -> f64 {
    let n = f.dim() as f64;
    let q = pow2(n * (1.0 - params.r / params.t));
    let terms: Vec<f64> = f.values().iter().map(|&v| abs_pow(v, params.r)).collect();
    pairwise_sum(&terms) * pow2(-(f.level() as f64) * n * params.r / params.t) * q / (1.0 - q)
}

/// Bourgain-Morrey norm of a depth-0 step function.
///
/// Degenerate parameters give `+inf` for nonzero `f`; `r = inf` is the Morrey norm.
pub fn bm_norm(f: &StepFunction, params: &SpaceParams) -> Result<f64> {
    check(f, params)?;
    require_depth0(f)?;
    if params.r.is_infinite() {
        return morrey_norm(f, params);
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    if params.regime() != Regime::NontrivialFinite {
        return Ok(f64::INFINITY);
    }
    let k = f.window();
    let s = coarse_tail(f, params, -k)? + levels_sum(f, params, -k, f.level(), None, false)? + fine_tail_cells(f, params);
    Ok(root(s, params.r))
}

/// Morrey norm `sup_Q |Q|^{1/t - sigma} ||f chi_Q||` (the `r = inf` case).
///
/// Coarser levels are dominated by level `-K` and finer ones by level `J`; the
/// boundary levels `-K-1` and `J+1` are evaluated in closed form as well.
pub fn morrey_norm(f: &StepFunction, params: &SpaceParams) -> Result<f64> {
    check(f, params)?;
    require_depth0(f)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if params.threshold() > params.t {
        return Ok(f64::INFINITY);
    }
    let n = f.dim() as f64;
    let k = f.window();
    let ce = params.cube_exponent();
    let per_level: Vec<f64> = (-k..=f.level())
        .into_par_iter()
        .map(|j| {
            let w = pow2(-(j as f64) * n * ce);
            Ok(cube_norms(f, j, None, params.pbar.as_slice())?.iter().fold(0.0f64, |m, &v| m.max(w * v)))
        })
        .collect::<Result<_>>()?;
    let coarse = pow2((k + 1) as f64 * n * ce) * mixed_norm(f, &params.pbar)?;
    let fine = pow2(-((f.level() + 1) as f64) * n / params.t) * f.max_abs();
    Ok(per_level.into_iter().fold(coarse.max(fine), f64::max))
}

/// Certified bracket for any grid depth (and shifted dyadic systems internally).
///
/// Levels `<= j_cut` are summed exactly; the rest is bounded by
/// `sum_{j > j_cut} sum_Q (|Q|^{1/t} sup_Q |f|)^r`. `j_cut` below the window is clamped.
pub fn bm_norm_bracket(f: &StepFunction, params: &SpaceParams, j_cut: i32) -> Result<NormBracket> {
    bracket_impl(f, params, j_cut, None)
}

/// Bracket of the norm built on the shifted system `D_a` instead of the standard one.
pub fn shifted_bm_norm_bracket(f: &StepFunction, params: &SpaceParams, shift: &[u8], j_cut: i32) -> Result<NormBracket> {
    if shift.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: shift.len() });
    }
    if shift.iter().all(|&a| a == 0) {
        return bracket_impl(f, params, j_cut, None);
    }
    bracket_impl(f, params, j_cut, Some(shift))
}

fn bracket_impl(f: &StepFunction, params: &SpaceParams, j_cut: i32, shift: Option<&[u8]>) -> Result<NormBracket> {
    check(f, params)?;
    if params.r.is_infinite() || params.regime() != Regime::NontrivialFinite {
        return Err(Error::InvalidParams("bracket needs n/sum(1/p_i) < t < r < inf".into()));
    }
    if f.is_zero() {
        return Ok(NormBracket { lower: 0.0, upper: 0.0 });
    }
    let k = f.window();
    let j_lo = if shift.is_some() { -k - 2 } else { -k };
    let j_cut = j_cut.max(j_lo);
    let jr = f.level().max(j_cut);
    let mut g = f.refine_dyadic(jr)?;
    if shift.is_some() {
        g = g.refine_depth()?;
    }
    let exact = coarse_tail(&g, params, j_lo)? + levels_sum(&g, params, j_lo, j_cut, shift, false)?;
    let sup = levels_sum(&g, params, j_cut + 1, jr, shift, true)?;
    // Past level jr a cube of side 2^{-jr-i} meets at most (w 2^i + 2) <= (w + 1) 2^i cells
    // per axis, w being the cell side in units of 2^{-jr}. Depth-0 unshifted cells split exactly.
    let factor = if g.depth() == 0 { 1.0 } else { (4.0f64 / 3.0).powi(g.dim() as i32) };
    let tail = factor * fine_tail_cells(&g, params);
    Ok(NormBracket { lower: root(exact, params.r), upper: root(exact + sup + tail, params.r) })
}

/// `bm_norm` of the cellwise `l^u` combination.
pub fn vector_bm_norm(fv: &VectorStepFunction, params: &SpaceParams, u: f64) -> Result<f64> {
    bm_norm(&fv.pointwise_norm(u), params)
}

/// Bracket of the cellwise `l^u` combination.
pub fn vector_bm_norm_bracket(fv: &VectorStepFunction, params: &SpaceParams, u: f64, j_cut: i32) -> Result<NormBracket> {
    bm_norm_bracket(&fv.pointwise_norm(u), params, j_cut)
}

/// Single-level block-space norm
/// `(sum_k (|Q_{j,k}|^{1/t' - sigma'} ||f chi_Q||_{p_bar'})^{r'})^{1/r'}`.
pub fn slice_norm(f: &StepFunction, j: i32, dual: &DualParams) -> Result<f64> {
    Ok(slice_terms(f, j, dual)?.1)
}

/// Per-cube coefficients of [`slice_norm`] and their `l^{r'}` norm.
pub(crate) fn slice_terms(f: &StepFunction, j: i32, dual: &DualParams) -> Result<(Vec<f64>, f64)> {
    if f.dim() != dual.pbar.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: dual.pbar.dim() });
    }
    let g = if j > f.level() { f.refine_dyadic(j)? } else { f.clone() };
    let w = pow2(-(j as f64) * g.dim() as f64 * dual.cube_exponent());
    let coeffs: Vec<f64> = cube_norms(&g, j, None, dual.pbar.as_slice())?.into_iter().map(|v| w * v).collect();
    let total = lr_norm(&coeffs, dual.r);
    Ok((coeffs, total))
}

pub(crate) fn lr_norm(xs: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return xs.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let terms: Vec<f64> = xs.iter().map(|&v| abs_pow(v, r)).collect();
    root(pairwise_sum(&terms), r)
}

pub fn vector_slice_norm(fv: &VectorStepFunction, j: i32, dual: &DualParams, u_prime: f64) -> Result<f64> {
    slice_norm(&fv.pointwise_norm(u_prime), j, dual)
}

/// Closed form of `||chi_[0,1)^n||` in the Bourgain-Morrey space.
pub fn chi_bm_closed_form(params: &SpaceParams) -> f64 {
    let n = params.dim() as f64;
    let (t, r) = (params.t, params.r);
    match params.regime() {
        Regime::NontrivialFinite => {
            // sum_{v >= 0} 2^{v n (1 - r/t)} + sum_{v < 0} 2^{-v n r (1/t - sigma)}
            let q = pow2(n * (1.0 - r / t));
            let a = pow2(n * r * params.cube_exponent());
            root(1.0 / (1.0 - q) + a / (1.0 - a), r)
        }
        Regime::NontrivialMorrey => 1.0,
        Regime::Degenerate => f64::INFINITY,
    }
}

/// `|Q|^sigma`: the mixed norm of a cube indicator.
pub fn indicator_mixed_norm(level: i32, pbar: &ExponentVector) -> f64 {
    pow2(-(level as f64) * pbar.dim() as f64 * pbar.sigma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DyadicCube;

    fn params(p: &[f64], t: f64, r: f64) -> SpaceParams {
        SpaceParams::new(ExponentVector::new(p.to_vec()).unwrap(), t, r).unwrap()
    }

    #[test]
    fn unit_indicator_two_d() {
        let sp = params(&[2.0, 4.0], 4.0, 8.0);
        // (4/3 + 1/3)^{1/8}
        let want = (5.0f64 / 3.0).powf(0.125);
        assert!((chi_bm_closed_form(&sp) - want).abs() < 1e-15);
        for (j, k) in [(0, 0), (2, 0), (1, 2), (-1, 1)] {
            let f = StepFunction::indicator(2, j, k, &DyadicCube::new(0, vec![0, 0])).unwrap();
            let got = bm_norm(&f, &sp).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "J={j} K={k}: {got} vs {want}");
        }
    }

    #[test]
    fn degenerate_is_infinite() {
        let f = StepFunction::indicator(1, 0, 0, &DyadicCube::new(0, vec![0])).unwrap();
        assert_eq!(bm_norm(&f, &params(&[2.0], 1.5, 4.0)).unwrap(), f64::INFINITY);
        assert_eq!(bm_norm(&StepFunction::zeros(1, 0, 0, 0).unwrap(), &params(&[2.0], 1.5, 4.0)).unwrap(), 0.0);
        assert_eq!(chi_bm_closed_form(&params(&[2.0], 4.0, 4.0)), f64::INFINITY);
    }

    #[test]
    fn morrey_of_unit_indicator_is_one() {
        let f = StepFunction::indicator(2, 1, 1, &DyadicCube::new(0, vec![0, 0])).unwrap();
        let sp = params(&[2.0, 4.0], 3.0, f64::INFINITY);
        assert!((bm_norm(&f, &sp).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_contains_exact_norm() {
        let sp = params(&[2.0, 3.0], 4.0, 6.0);
        let f = StepFunction::from_fn(2, 1, 1, 0, |x| (x[0] * 3.0 - x[1]).sin()).unwrap();
        let exact = bm_norm(&f, &sp).unwrap();
        let mut prev_gap = f64::INFINITY;
        for jc in -2..5 {
            let b = bm_norm_bracket(&f, &sp, jc).unwrap();
            assert!(b.contains(exact, 1e-12), "j_cut={jc}: {b:?} vs {exact}");
            let gap = b.upper - b.lower;
            assert!(gap <= prev_gap * (1.0 + 1e-12));
            prev_gap = gap;
        }
    }

    #[test]
    fn bracket_on_third_grid_contains_depth0_norm() {
        let sp = params(&[2.0], 3.0, 5.0);
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, -0.5]).unwrap();
        let exact = bm_norm(&f, &sp).unwrap();
        let b = bm_norm_bracket(&f.refine_depth().unwrap(), &sp, 3).unwrap();
        assert!(b.contains(exact, 1e-12), "{b:?} vs {exact}");
    }

    #[test]
    fn slice_norm_of_unit_indicator() {
        let sp = params(&[2.0, 4.0], 4.0, 8.0);
        let f = StepFunction::indicator(2, 0, 1, &DyadicCube::new(0, vec![0, 0])).unwrap();
        assert!((slice_norm(&f, 0, &sp.dual().unwrap()).unwrap() - 1.0).abs() < 1e-15);
    }
}
