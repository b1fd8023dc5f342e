use rayon::prelude::*;

use super::conditional::{cube_averages, for_each_cell_cube};
use crate::error::{Error, Result};
use crate::grid::{all_shifts, StepFunction};

/// Grid-restricted maximal function over the shifted system `D_a`.
///
/// Output lives on the third-refined grid. Levels `[-K-2, J]` cover every shifted cube
/// that aligns with the cells (coarser ones only shrink the averages); the own cell
/// value of `|f|` stands in for the shrinking cubes inside a cell.
pub fn dyadic_maximal_shifted(f: &StepFunction, shift: &[u8]) -> Result<StepFunction> {
    if shift.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: shift.len() });
    }
    if shift.iter().any(|&a| a > 2) {
        return Err(Error::InvalidParams("shift components must be 0, 1 or 2".into()));
    }
    let g = f.abs().refine_depth()?;
    let levels: Vec<i32> = (-g.window() - 2..=g.level()).collect();
    let per_level: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|&j| {
            let (cuts, avgs) = cube_averages(&g, j, Some(shift))?;
            let mut v = vec![0.0; g.len()];
            for_each_cell_cube(&g, &cuts, |cell, cube| v[cell] = avgs[cube]);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut out = g.clone();
    for v in per_level {
        out.values_mut().iter_mut().zip(&v).for_each(|(o, x)| *o = o.max(*x));
    }
    Ok(out)
}

/// `max_a M_{D_a} f`: a lower proxy for the cube maximal function on the third-refined grid.
pub fn hl_maximal_lower(f: &StepFunction) -> Result<StepFunction> {
    let shifts = all_shifts(f.dim());
    let parts: Vec<StepFunction> = shifts.par_iter().map(|a| dyadic_maximal_shifted(f, a)).collect::<Result<_>>()?;
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out.values_mut().iter_mut().zip(p.values()).for_each(|(o, x)| *o = o.max(*x));
    }
    Ok(out)
}

/// Largest average over runs of cells containing each cell, `O(N^2)` per line.
fn line_maximal(line: &[f64]) -> Vec<f64> {
    let n = line.len();
    let mut best = vec![0.0f64; n];
    let mut avgs = vec![0.0f64; n];
    for l in 0..n {
        let mut s = 0.0;
        for r in l..n {
            s += line[r];
            avgs[r] = s / (r - l + 1) as f64;
        }
        let mut run = 0.0f64;
        for r in (l..n).rev() {
            run = run.max(avgs[r]);
            best[r] = best[r].max(run);
        }
    }
    best
}

/// One-dimensional maximal function along `axis`, restricted to grid-aligned intervals.
pub fn maximal_1d_grid(f: &StepFunction, axis: usize) -> Result<StepFunction> {
    if axis >= f.dim() {
        return Err(Error::InvalidParams(format!("axis {axis} out of range for n = {}", f.dim())));
    }
    let per = f.cells_per_axis();
    let stride = per.pow(axis as u32);
    let lines = f.len() / per;
    let src = f.values();
    let results: Vec<(usize, Vec<f64>)> = (0..lines)
        .into_par_iter()
        .map(|ln| {
            let base = (ln / stride) * stride * per + ln % stride;
            let line: Vec<f64> = (0..per).map(|i| src[base + i * stride].abs()).collect();
            (base, line_maximal(&line))
        })
        .collect();
    let mut out = f.clone();
    let vals = out.values_mut();
    for (base, m) in results {
        for (i, v) in m.into_iter().enumerate() {
            vals[base + i * stride] = v;
        }
    }
    Ok(out)
}

/// `M_n .. M_1 |f|`, axis 1 applied first.
pub fn iterated_maximal_grid(f: &StepFunction) -> Result<StepFunction> {
    let mut g = f.abs();
    for ax in 0..f.dim() {
        g = maximal_1d_grid(&g, ax)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::doob_maximal;

    #[test]
    fn one_d_indicator() {
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, 0.0]).unwrap();
        assert_eq!(maximal_1d_grid(&f, 0).unwrap().values(), &[1.0, 0.5]);
    }

    #[test]
    fn line_maximal_brute_force() {
        let line = [0.3, 2.0, 0.0, 1.0, 5.0, 0.1];
        let got = line_maximal(&line);
        for i in 0..line.len() {
            let mut want = 0.0f64;
            for l in 0..=i {
                for r in i..line.len() {
                    want = want.max(line[l..=r].iter().sum::<f64>() / (r - l + 1) as f64);
                }
            }
            assert!((got[i] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn maximal_along_second_axis() {
        // values indexed (x1, x2); along x2 the column x1=0 is (4, 0)
        let f = StepFunction::new(2, 0, 1, 0, vec![4.0, 0.0, 0.0, 0.0]).unwrap();
        let g = maximal_1d_grid(&f, 1).unwrap();
        assert_eq!(g.values(), &[4.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn zero_shift_matches_doob() {
        let f = StepFunction::from_fn(2, 1, 1, 0, |x| ((x[0] * 5.0).sin() * (x[1] * 3.0).cos()).abs()).unwrap();
        let a = dyadic_maximal_shifted(&f, &[0, 0]).unwrap();
        let b = doob_maximal(&f).unwrap().refine_depth().unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-14 * y.max(1.0));
        }
    }

    #[test]
    fn hl_dominates_every_shift() {
        let f = StepFunction::new(1, 0, 2, 0, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let h = hl_maximal_lower(&f).unwrap();
        for a in 0..3u8 {
            let m = dyadic_maximal_shifted(&f, &[a]).unwrap();
            assert!(m.values().iter().zip(h.values()).all(|(x, y)| x <= y));
        }
        // the cell itself is fully covered
        assert_eq!(h.values()[4], 1.0);
    }
}
