use crate::error::Result;
use crate::grid::StepFunction;
use crate::norms::blockwise::{all_cuts, cube_sums};

/// For each axis, the segment index of every cell under the given cuts.
pub(crate) fn segment_of_cells(cuts: &[Vec<usize>]) -> Vec<Vec<usize>> {
    cuts.iter()
        .map(|c| {
            let mut seg = vec![0usize; *c.last().unwrap()];
            for s in 0..c.len() - 1 {
                seg[c[s]..c[s + 1]].iter_mut().for_each(|x| *x = s);
            }
            seg
        })
        .collect()
}

/// Calls `g(cell, cube)` with linear indices of each cell and its level-`j` cube.
pub(crate) fn for_each_cell_cube(f: &StepFunction, cuts: &[Vec<usize>], mut g: impl FnMut(usize, usize)) {
    let segs = segment_of_cells(cuts);
    let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let mut idx = vec![0usize; f.dim()];
    for lin in 0..f.len() {
        f.unflatten_into(lin, &mut idx);
        let mut cube = 0usize;
        for ax in (0..f.dim()).rev() {
            cube = cube * counts[ax] + segs[ax][idx[ax]];
        }
        g(lin, cube);
    }
}

/// Level-`j` cube averages of `f` (optionally shifted), full cube volume in the denominator.
pub(crate) fn cube_averages(f: &StepFunction, j: i32, shift: Option<&[u8]>) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let cuts = all_cuts(f, j, shift)?;
    let scale = f.cell_volume() / (-(j as f64) * f.dim() as f64).exp2();
    let avgs = cube_sums(f, j, shift)?.into_iter().map(|s| s * scale).collect();
    Ok((cuts, avgs))
}

/// `E_k f`: averages over level-`k` dyadic cubes.
///
/// The window grows to `2^{-k}` when `k < -K` so the cubes fit; resolution is kept.
pub fn cond_expect(f: &StepFunction, k: i32) -> Result<StepFunction> {
    if k >= f.level() {
        return Ok(f.clone());
    }
    let base = f.extend_window(f.window().max(-k))?;
    let (cuts, avgs) = cube_averages(&base, k, None)?;
    let mut out = base.clone();
    let vals = out.values_mut();
    for_each_cell_cube(&base, &cuts, |cell, cube| vals[cell] = avgs[cube]);
    Ok(out)
}

/// Doob maximal function `sup_k E_k f` on the window.
///
/// Levels `k > J` repeat `f` and levels `k < -K` give `2^{kn} int f`, whose supremum
/// is the level `-K` value when `int f >= 0` and `0` otherwise.
pub fn doob_maximal(f: &StepFunction) -> Result<StepFunction> {
    let mut out = f.clone();
    if f.integral() < 0.0 {
        out.values_mut().iter_mut().for_each(|v| *v = v.max(0.0));
    }
    for k in -f.window()..f.level() {
        let (cuts, avgs) = cube_averages(f, k, None)?;
        let vals = out.values_mut();
        for_each_cell_cube(f, &cuts, |cell, cube| vals[cell] = vals[cell].max(avgs[cube]));
    }
    Ok(out)
}
