use crate::error::{Error, Result};
use crate::grid::{common_grid, StepFunction};

/// `E_J (f * g)`, exact.
///
/// Two cells of side `h` convolve to a tensor of tents; a tent of base `2h` puts half
/// its mass in each of two output cells, so the cell averages are
/// `(h/2)^n` times the discrete convolution summed over the `2^n` neighbouring offsets.
/// The output window is the smallest one (at least `K`) holding the support.
pub fn convolve_project(f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    if f.depth() != 0 || g.depth() != 0 {
        return Err(Error::InvalidParams("convolution expects depth-0 grids".into()));
    }
    let (f, g) = common_grid(f, g)?;
    let n = f.dim();
    let per = f.cells_per_axis();
    let out_k = f.window() + 1;
    let mut out = StepFunction::zeros(n, f.level(), out_k, 0)?;
    let per2 = out.cells_per_axis();
    let lin2 = |idx: &[usize]| idx.iter().rev().fold(0usize, |acc, &i| acc * per2 + i);
    let nonzero = |s: &StepFunction| -> Vec<(usize, f64)> {
        let mut idx = vec![0usize; n];
        s.values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(l, &v)| {
                s.unflatten_into(l, &mut idx);
                (lin2(&idx), v)
            })
            .collect()
    };
    let (fa, ga) = (nonzero(&f), nonzero(&g));
    debug_assert!(per2 == 2 * per);
    let mut d = vec![0.0f64; out.len()];
    for &(i, a) in &fa {
        for &(j, b) in &ga {
            d[i + j] += a * b;
        }
    }
    // out[m] = sum over offsets e in {0,1}^n of d[m - e]
    let mut stride = 1usize;
    for _ in 0..n {
        for l in (0..d.len()).rev() {
            if (l / stride) % per2 >= 1 {
                d[l] += d[l - stride];
            }
        }
        stride *= per2;
    }
    let scale = (f.cell_width() / 2.0).powi(n as i32);
    out.values_mut().iter_mut().zip(&d).for_each(|(o, x)| *o = x * scale);
    out.shrink_window(f.window())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_intervals() {
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, 0.0]).unwrap();
        let c = convolve_project(&f, &f).unwrap();
        assert_eq!(c.window(), 1);
        assert_eq!(c.values(), &[0.5, 0.5]);
    }

    #[test]
    fn mass_is_product_of_masses() {
        let f = StepFunction::from_fn(2, 1, 1, 0, |x| x[0] + 2.0 * x[1] - 1.0).unwrap();
        let g = StepFunction::from_fn(2, 1, 1, 0, |x| (x[0] * x[1]).cos()).unwrap();
        let c = convolve_project(&f, &g).unwrap();
        let want = f.integral() * g.integral();
        assert!((c.integral() - want).abs() < 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn brute_force_one_d() {
        // f = chi_[0,1/2), g = chi_[1/2,1) at h = 1/2: f*g is a tent on [1/2, 3/2) peaking at 1
        let f = StepFunction::new(1, 1, 0, 0, vec![1.0, 0.0]).unwrap();
        let g = StepFunction::new(1, 1, 0, 0, vec![0.0, 1.0]).unwrap();
        let c = convolve_project(&f, &g).unwrap();
        assert_eq!(c.window(), 1);
        assert_eq!(c.values(), &[0.0, 0.25, 0.25, 0.0]);
    }
}
