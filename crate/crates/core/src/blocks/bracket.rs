use rayon::prelude::*;

use super::{block_split, holder_dual, pairing};
use crate::error::{Error, Result};
use crate::grid::{conjugate, cubes_in_window, DyadicCube, SpaceParams, StepFunction, VectorStepFunction};
use crate::norms::{bm_norm, slice_terms, vector_bm_norm, NormBracket};
use crate::util::pow2;
use crate::verify::{gen_random_step, GenSpec};

/// `lambda * block` on one cube.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTerm {
    pub lambda: f64,
    pub cube: DyadicCube,
    pub block: StepFunction,
}

/// `g = sum lambda_k b_k`, all cubes on one level.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub level: i32,
    pub terms: Vec<BlockTerm>,
    /// `l^{r'}` norm of the coefficients.
    pub value: f64,
}

impl BlockDecomposition {
    pub fn reconstruct(&self, template: &StepFunction) -> Result<StepFunction> {
        let mut acc = StepFunction::zeros(template.dim(), template.level(), template.window(), template.depth())?;
        for t in &self.terms {
            acc = acc.add(&t.block.scale(t.lambda))?;
        }
        Ok(acc)
    }

    /// `level J value V terms N` followed by one `lambda level m_1 .. m_n` line per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("level {} value {:e} terms {}\n", self.level, self.value, self.terms.len());
        for t in &self.terms {
            let m: Vec<String> = t.cube.m.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{:e} {} {}\n", t.lambda, t.cube.level, m.join(" ")));
        }
        out
    }
}

fn dual_r(params: &SpaceParams) -> Result<f64> {
    conjugate(params.r)
}

/// Splits `g` over the level-`j` cubes of the window.
pub fn single_level_decomposition(g: &StepFunction, j: i32, params: &SpaceParams) -> Result<BlockDecomposition> {
    if g.depth() != 0 {
        return Err(Error::InvalidParams("block decompositions expect a depth-0 grid".into()));
    }
    let dual = params.dual()?;
    let (coeffs, value) = slice_terms(g, j, &dual)?;
    let cubes = cubes_in_window(j, g.window(), g.dim(), None);
    let mut terms = Vec::new();
    for (cube, lam) in cubes.into_iter().zip(coeffs) {
        if lam == 0.0 {
            continue;
        }
        let piece = g.restrict(&cube)?;
        let (lambda, block) = block_split(&piece, &cube, params)?;
        terms.push(BlockTerm { lambda, cube, block });
    }
    Ok(BlockDecomposition { level: j, terms, value })
}

/// Best single-level decomposition over the window levels `[-K, J]`.
///
/// Coarser levels only inflate the single window cube's coefficient and finer levels
/// grow geometrically (`r' < t'`), so the window levels contain the optimum.
pub fn h_norm_upper(g: &StepFunction, params: &SpaceParams) -> Result<(f64, BlockDecomposition)> {
    params.require_nontrivial()?;
    let dual = params.dual()?;
    let values: Vec<f64> = (-g.window()..=g.level())
        .into_par_iter()
        .map(|j| Ok(slice_terms(g, j, &dual)?.1))
        .collect::<Result<_>>()?;
    let (best_i, best) = values
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    let dec = single_level_decomposition(g, -g.window() + best_i as i32, params)?;
    Ok((best, dec))
}

/// Nonnegative test functions tuned to `big_g >= 0`:
/// cube indicators, Hölder duals on each cube, per-level combinations of those duals,
/// and `budget` random functions.
fn candidates(big_g: &StepFunction, params: &SpaceParams, budget: usize, seed: u64) -> Result<Vec<StepFunction>> {
    let dual = params.dual()?;
    let r_prime = dual_r(params)?;
    let mut out = Vec::new();
    let reflexive = dual.pbar.is_reflexive();
    for j in -big_g.window()..=big_g.level() {
        let (coeffs, _) = slice_terms(big_g, j, &dual)?;
        let cubes = cubes_in_window(j, big_g.window(), big_g.dim(), None);
        let mut level_combo = StepFunction::zeros(big_g.dim(), big_g.level(), big_g.window(), 0)?;
        for (cube, lam) in cubes.iter().zip(&coeffs) {
            if *lam == 0.0 {
                continue;
            }
            out.push(StepFunction::indicator(big_g.dim(), big_g.level(), big_g.window(), cube)?);
            if reflexive {
                let d = holder_dual(big_g, cube, &dual.pbar)?;
                // scaled so its single cube term equals 1, weighted by lambda^{r'-1}
                let scale = pow2(-(cube.level as f64) * cube.dim() as f64 * dual.cube_exponent());
                let mu = if r_prime == 1.0 { 1.0 } else { lam.powf(r_prime - 1.0) };
                level_combo = level_combo.add(&d.scale(scale * mu))?;
                out.push(d);
            }
        }
        if reflexive && !level_combo.is_zero() {
            out.push(level_combo);
        }
    }
    let spec = GenSpec { sparsity: 0.7, ..GenSpec::new(big_g.dim(), big_g.level(), big_g.window()).nonnegative() };
    for i in 0..budget {
        out.push(gen_random_step(&spec, seed.wrapping_add(i as u64))?);
    }
    Ok(out)
}

fn best_ratio(ratios: &[f64]) -> (usize, f64) {
    ratios
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}

/// Largest `|<g, f>| / ||f||` over the test functions, with the maximizing `f`.
pub fn h_norm_lower(g: &StepFunction, params: &SpaceParams, budget: usize, seed: u64) -> Result<(f64, StepFunction)> {
    params.require_nontrivial()?;
    if g.depth() != 0 {
        return Err(Error::InvalidParams("block brackets expect a depth-0 grid".into()));
    }
    let sign = g.map(f64::signum);
    let cands: Vec<StepFunction> = candidates(&g.abs(), params, budget, seed)?
        .into_iter()
        .map(|phi| phi.mul(&sign))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = cands
        .par_iter()
        .map(|f| {
            let d = bm_norm(f, params)?;
            Ok(if d == 0.0 || !d.is_finite() { 0.0 } else { pairing(g, f)?.abs() / d })
        })
        .collect::<Result<_>>()?;
    if cands.is_empty() {
        return Ok((0.0, g.map(|_| 0.0)));
    }
    let (i, v) = best_ratio(&ratios);
    Ok((v, cands[i].clone()))
}

/// Lower and upper bounds of the block-space norm with the upper witness decomposition.
pub fn block_bracket(
    g: &StepFunction,
    params: &SpaceParams,
    budget: usize,
    seed: u64,
) -> Result<(NormBracket, BlockDecomposition)> {
    let (upper, dec) = h_norm_upper(g, params)?;
    let (lower, _) = h_norm_lower(g, params, budget, seed)?;
    Ok((NormBracket { lower, upper }, dec))
}

/// Bracket of the vector block-space norm with inner exponent `u'`.
///
/// Upper: single-level decompositions of `||g(x)||_{l^{u'}}`. Lower: each scalar test
/// function `phi` is lifted to the pointwise dual `f_k = sgn g_k |g_k|^{u'-1} / G^{u'-1} phi`,
/// which has `||f(x)||_{l^u} = phi` and `sum_k g_k f_k = G phi`.
pub fn vector_block_bracket(
    gv: &VectorStepFunction,
    params: &SpaceParams,
    u_prime: f64,
    budget: usize,
    seed: u64,
) -> Result<NormBracket> {
    if u_prime < 1.0 {
        return Err(Error::InvalidExponent(format!("u' = {u_prime} must be at least 1")));
    }
    let u = conjugate(u_prime)?;
    let big_g = gv.pointwise_norm(u_prime);
    let (upper, _) = h_norm_upper(&big_g, params)?;
    let comps = gv.components();
    // pointwise dual weights, summing to an l^u-unit vector where G > 0
    let weights: Vec<StepFunction> = if u_prime.is_infinite() {
        let mut ws: Vec<StepFunction> = comps.iter().map(|c| c.map(|_| 0.0)).collect();
        for l in 0..big_g.len() {
            if let Some(k) = (0..comps.len()).find(|&k| comps[k].values()[l].abs() == big_g.values()[l] && big_g.values()[l] > 0.0) {
                ws[k].values_mut()[l] = comps[k].values()[l].signum();
            }
        }
        ws
    } else {
        comps
            .iter()
            .map(|c| {
                c.zip_with(&big_g, |v, gg| {
                    if v == 0.0 {
                        0.0
                    } else if u_prime == 1.0 {
                        v.signum()
                    } else {
                        v.signum() * (v.abs() / gg).powf(u_prime - 1.0)
                    }
                })
            })
            .collect::<Result<_>>()?
    };
    let cands = candidates(&big_g, params, budget, seed)?;
    let ratios: Vec<f64> = cands
        .par_iter()
        .map(|phi| {
            let fv = VectorStepFunction::new(weights.iter().map(|w| w.mul(phi)).collect::<Result<_>>()?)?;
            let d = vector_bm_norm(&fv, params, u)?;
            if d == 0.0 || !d.is_finite() {
                return Ok(0.0);
            }
            let num: f64 = comps.iter().zip(fv.components()).map(|(g, f)| pairing(g, f)).sum::<Result<f64>>()?;
            Ok(num.abs() / d)
        })
        .collect::<Result<_>>()?;
    let (_, lower) = best_ratio(&ratios);
    Ok(NormBracket { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ExponentVector;
    use crate::norms::mixed_norm;

    fn sp(p: &[f64], t: f64, r: f64) -> SpaceParams {
        SpaceParams::new(ExponentVector::new(p.to_vec()).unwrap(), t, r).unwrap()
    }

    #[test]
    fn decomposition_reconstructs() {
        let p = sp(&[2.0, 3.0], 4.0, 8.0);
        let g = StepFunction::from_fn(2, 1, 1, 0, |x| (x[0] * 4.0).cos() - x[1]).unwrap();
        let (_, dec) = h_norm_upper(&g, &p).unwrap();
        let back = dec.reconstruct(&g).unwrap();
        for (a, b) in back.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn single_block_has_norm_at_most_one() {
        let p = sp(&[2.0], 3.0, 6.0);
        let q = DyadicCube::new(1, vec![2]);
        let f = StepFunction::from_fn(1, 2, 1, 0, |x| x[0].sin()).unwrap();
        let (_, b) = block_split(&f.restrict(&q).unwrap(), &q, &p).unwrap();
        let (upper, _) = h_norm_upper(&b, &p).unwrap();
        assert!(upper <= 1.0 + 1e-12);
    }

    #[test]
    fn sandwich_holds() {
        let p = sp(&[2.0, 3.0], 4.0, 8.0);
        let g = StepFunction::from_fn(2, 1, 1, 0, |x| (x[0] * 3.0 + x[1]).sin()).unwrap();
        let (b, _) = block_bracket(&g, &p, 8, 3).unwrap();
        assert!(b.lower > 0.0 && b.lower <= b.upper * (1.0 + 1e-12), "{b:?}");
    }

    #[test]
    fn endpoint_level_matches_dual_norm_for_one_cube_support() {
        // t at the threshold, r = inf: the level of the supporting cube gives ||g||_{p'}
        let p = sp(&[2.0, 4.0], 8.0 / 3.0, f64::INFINITY);
        let q = DyadicCube::new(0, vec![1, 0]);
        let g = StepFunction::from_fn(2, 1, 1, 0, |x| x[0] * x[1] + 0.1).unwrap().restrict(&q).unwrap();
        let dec = single_level_decomposition(&g, 0, &p).unwrap();
        let want = mixed_norm(&g, &p.pbar.conjugate().unwrap()).unwrap();
        assert!((dec.value - want).abs() < 1e-10 * want);
    }

    #[test]
    fn vector_with_one_component_matches_scalar() {
        let p = sp(&[2.0], 3.0, 6.0);
        let g = StepFunction::from_fn(1, 2, 1, 0, |x| (5.0 * x[0]).sin()).unwrap();
        let v = VectorStepFunction::new(vec![g.clone()]).unwrap();
        let vb = vector_block_bracket(&v, &p, 2.0, 4, 11).unwrap();
        let (ub, _) = h_norm_upper(&g, &p).unwrap();
        let (lb, _) = h_norm_lower(&g, &p, 4, 11).unwrap();
        assert!((vb.upper - ub).abs() < 1e-12 * ub);
        assert!((vb.lower - lb).abs() < 1e-12 * lb);
    }
}
