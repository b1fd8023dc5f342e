//! One-pass reductions over all cubes of a level.
//!
//! Each axis is collapsed segment by segment; the reduced axis is moved to the back so
//! the next axis becomes contiguous. After `n` passes the cube values come out in the
//! original axis order with axis 0 fastest, matching [`crate::grid::cubes_in_window`].

use crate::error::{Error, Result};
use crate::grid::StepFunction;
use crate::util::{abs_pow, pairwise_sum, root};

#[derive(Clone, Copy, Debug)]
pub(crate) enum Reduce {
    /// `(h sum |v|^p)^{1/p}`, or `max |v|` for `p = inf`.
    Norm(f64),
    /// Plain signed sum.
    Sum,
}

/// Reduces `values` (hypercube of side `per`, axis 0 fastest) over the given per-axis cuts.
pub(crate) fn block_reduce(values: &[f64], per: usize, cuts: &[Vec<usize>], ops: &[Reduce], h: f64) -> Vec<f64> {
    let n = cuts.len();
    let mut dims: Vec<usize> = vec![per; n];
    let mut cur: Vec<f64> = values.to_vec();
    let mut scratch: Vec<f64> = Vec::new();
    for ax in 0..n {
        let len0 = dims[0];
        let rows = cur.len() / len0;
        let segs = cuts[ax].len() - 1;
        let mut out = vec![0.0; rows * segs];
        for row in 0..rows {
            let line = &cur[row * len0..(row + 1) * len0];
            for s in 0..segs {
                let seg = &line[cuts[ax][s]..cuts[ax][s + 1]];
                out[row + rows * s] = match ops[ax] {
                    Reduce::Sum => {
                        scratch.clear();
                        scratch.extend_from_slice(seg);
                        pairwise_sum(&scratch)
                    }
                    Reduce::Norm(p) if p.is_infinite() => seg.iter().fold(0.0, |m, v| m.max(v.abs())),
                    Reduce::Norm(p) => {
                        scratch.clear();
                        scratch.extend(seg.iter().map(|&v| abs_pow(v, p)));
                        root(h * pairwise_sum(&scratch), p)
                    }
                };
            }
        }
        dims.remove(0);
        dims.push(segs);
        cur = out;
    }
    cur
}

/// Cell boundaries along one axis of the level-`j` cubes with shift `a`, clipped to the window.
pub(crate) fn level_cuts(f: &StepFunction, j: i32, a: u8) -> Result<Vec<usize>> {
    let per = f.cells_per_axis() as i128;
    if j > f.level() {
        return Err(Error::Misaligned(format!("level {j} is finer than J={}", f.level())));
    }
    let cu: i128 = if f.depth() == 1 { 1 } else { 3 };
    let range = crate::grid::cube::axis_indices_meeting_window(j, f.window(), a);
    let scale = 1i128 << (f.level() - j);
    let mut cuts = Vec::with_capacity((range.end - range.start) as usize + 1);
    for m in range.clone() {
        let lo = (3 * m as i128 + a as i128) * scale;
        if lo.rem_euclid(cu) != 0 {
            return Err(Error::Misaligned("shifted cubes need a third-refined grid".into()));
        }
        cuts.push((lo / cu).clamp(0, per) as usize);
    }
    let last = (3 * range.end as i128 + a as i128) * scale;
    cuts.push((last / cu).clamp(0, per) as usize);
    Ok(cuts)
}

/// Cuts for every axis at level `j` with an optional shift vector.
pub(crate) fn all_cuts(f: &StepFunction, j: i32, shift: Option<&[u8]>) -> Result<Vec<Vec<usize>>> {
    (0..f.dim()).map(|ax| level_cuts(f, j, shift.map_or(0, |s| s[ax]))).collect()
}

/// Mixed norm of every level-`j` cube (optionally shifted), in window order.
pub(crate) fn cube_norms(f: &StepFunction, j: i32, shift: Option<&[u8]>, pbar: &[f64]) -> Result<Vec<f64>> {
    let cuts = all_cuts(f, j, shift)?;
    let ops: Vec<Reduce> = pbar.iter().map(|&p| Reduce::Norm(p)).collect();
    Ok(block_reduce(f.values(), f.cells_per_axis(), &cuts, &ops, f.cell_width()))
}

/// Signed sum of cell values in every level-`j` cube.
pub(crate) fn cube_sums(f: &StepFunction, j: i32, shift: Option<&[u8]>) -> Result<Vec<f64>> {
    let cuts = all_cuts(f, j, shift)?;
    let ops = vec![Reduce::Sum; f.dim()];
    Ok(block_reduce(f.values(), f.cells_per_axis(), &cuts, &ops, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_over_quadrants() {
        // 2x2 grid, values 1..4, axis 0 fastest
        let f = StepFunction::new(2, 0, 1, 0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(cube_sums(&f, 0, None).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cube_sums(&f, -1, None).unwrap(), vec![10.0]);
        assert_eq!(cube_sums(&f, -4, None).unwrap(), vec![10.0]);
    }

    #[test]
    fn sums_keep_axis_order_on_rectangular_blocks() {
        // 4x4 grid, value = x index + 10 * y index
        let f = StepFunction::from_fn(2, 1, 1, 0, |x| (2.0 * x[0]).floor() + 10.0 * (2.0 * x[1]).floor()).unwrap();
        let s = cube_sums(&f, 0, None).unwrap();
        // cube (1,0) covers x in {2,3}, y in {0,1}
        assert_eq!(s[1], 2.0 + 3.0 + 12.0 + 13.0);
        // cube (0,1) covers x in {0,1}, y in {2,3}
        assert_eq!(s[2], 20.0 + 21.0 + 30.0 + 31.0);
    }

    #[test]
    fn shifted_cuts_on_third_grid() {
        let f = StepFunction::zeros(1, 0, 1, 1).unwrap();
        // level 0 shift 1: cubes [-2/3,1/3), [1/3,4/3), [4/3,7/3) -> cells 0..1, 1..4, 4..6
        assert_eq!(level_cuts(&f, 0, 1).unwrap(), vec![0, 1, 4, 6]);
        let g = StepFunction::zeros(1, 0, 1, 0).unwrap();
        assert!(level_cuts(&g, 0, 1).is_err());
    }
}
