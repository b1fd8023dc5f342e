use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::StepFunction;

/// `Gamma(x)` for `x` a positive multiple of 1/2, which is all the unit-sphere constants need.
fn gamma_half(x: f64) -> f64 {
    let twice = (2.0 * x).round() as i64;
    if twice % 2 == 0 {
        (1..(twice / 2)).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut a = 0.5;
        while a < x - 0.25 {
            g *= a;
            a += 1.0;
        }
        g
    }
}

/// Surface area of the unit sphere in `R^n`.
fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n as f64 / 2.0)
}

/// Volume of the unit ball in `R^n`.
fn ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half(n as f64 / 2.0 + 1.0)
}

fn nonzero_cells(f: &StepFunction) -> Vec<(Vec<usize>, f64)> {
    let mut idx = vec![0usize; f.dim()];
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(l, &v)| {
            f.unflatten_into(l, &mut idx);
            (idx.clone(), v)
        })
        .collect()
}

fn sample_at_centers(f: &StepFunction, value: impl Fn(&[f64]) -> f64 + Sync) -> StepFunction {
    let mut out = f.clone();
    let n = f.dim();
    out.values_mut().par_iter_mut().enumerate().for_each(|(l, v)| {
        let mut idx = vec![0usize; n];
        f.unflatten_into(l, &mut idx);
        *v = value(&f.cell_center(&idx));
    });
    out
}

/// `int_a^b |x - y|^{alpha - 1} dy` in closed form.
fn riesz_1d_cell(x: f64, a: f64, b: f64, alpha: f64) -> f64 {
    if x >= b {
        ((x - a).powf(alpha) - (x - b).powf(alpha)) / alpha
    } else if x <= a {
        ((b - x).powf(alpha) - (a - x).powf(alpha)) / alpha
    } else {
        ((x - a).powf(alpha) + (b - x).powf(alpha)) / alpha
    }
}

/// Fractional integral `I_alpha f(x) = int f(y) |x - y|^{alpha - n} dy` sampled at cell centers.
///
/// Exact in one dimension. For `n >= 2` the own cell is replaced by the ball of equal
/// volume (integrated radially), neighbouring cells use a `4^n` midpoint rule and the
/// rest a one-point rule; such output is flagged approximate.
pub fn frac_integral(f: &StepFunction, alpha: f64) -> Result<StepFunction> {
    let n = f.dim();
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} outside (0, {n})")));
    }
    if f.depth() != 0 {
        return Err(Error::InvalidParams("fractional integral expects a depth-0 grid".into()));
    }
    let h = f.cell_width();
    let src = nonzero_cells(f);
    if n == 1 {
        let mut out = sample_at_centers(f, |x| {
            src.iter()
                .map(|(i, v)| v * riesz_1d_cell(x[0], i[0] as f64 * h, (i[0] + 1) as f64 * h, alpha))
                .sum()
        });
        out.approximate = false;
        return Ok(out);
    }
    let vol = h.powi(n as i32);
    let radius = (vol / ball_volume(n)).powf(1.0 / n as f64);
    let self_weight = sphere_area(n) * radius.powf(alpha) / alpha;
    const SUB: usize = 4;
    let subs = SUB.pow(n as u32);
    let sub_offsets: Vec<Vec<f64>> = (0..subs)
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let o = ((c % SUB) as f64 + 0.5) / SUB as f64 - 0.5;
                    c /= SUB;
                    o * h
                })
                .collect()
        })
        .collect();
    let kernel = |d2: f64| d2.powf((alpha - n as f64) / 2.0);
    let mut out = sample_at_centers(f, |x| {
        let mut acc = 0.0;
        for (i, v) in &src {
            let y: Vec<f64> = i.iter().map(|&c| (c as f64 + 0.5) * h).collect();
            let cheb = x.iter().zip(&y).map(|(a, b)| ((a - b) / h).abs()).fold(0.0f64, f64::max);
            let w = if cheb < 0.5 {
                self_weight
            } else if cheb < 1.5 {
                sub_offsets
                    .iter()
                    .map(|o| kernel(x.iter().zip(&y).zip(o).map(|((a, b), d)| (a - b - d).powi(2)).sum()))
                    .sum::<f64>()
                    * vol
                    / subs as f64
            } else {
                kernel(x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum()) * vol
            };
            acc += v * w;
        }
        acc
    });
    out.approximate = true;
    Ok(out)
}

/// Singular integral kernels available to [`singular_apply`].
#[derive(Clone, Debug, PartialEq)]
pub enum SingularKernel {
    /// `(1/pi) p.v. int f(y) / (x - y) dy`, exact at cell centers.
    Hilbert1D,
    /// `c_n (x_j - y_j) / |x - y|^{n+1}` restricted to `|x - y| > eps`, midpoint rule.
    TruncatedRiesz { axis: usize, eps: f64 },
}

/// Applies a singular integral and samples the result at cell centers.
pub fn singular_apply(f: &StepFunction, kernel: &SingularKernel) -> Result<StepFunction> {
    if f.depth() != 0 {
        return Err(Error::InvalidParams("singular integrals expect a depth-0 grid".into()));
    }
    let h = f.cell_width();
    let src = nonzero_cells(f);
    match *kernel {
        SingularKernel::Hilbert1D => {
            if f.dim() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
            }
            let mut out = sample_at_centers(f, |x| {
                let s: f64 = src
                    .iter()
                    .map(|(i, v)| {
                        let (a, b) = (i[0] as f64 * h, (i[0] + 1) as f64 * h);
                        v * ((x[0] - a).abs() / (x[0] - b).abs()).ln()
                    })
                    .sum();
                s / PI
            });
            out.approximate = false;
            Ok(out)
        }
        SingularKernel::TruncatedRiesz { axis, eps } => {
            let n = f.dim();
            if axis >= n {
                return Err(Error::InvalidParams(format!("axis {axis} out of range for n = {n}")));
            }
            if !(eps > 0.0) {
                return Err(Error::InvalidParams(format!("eps = {eps} must be positive")));
            }
            let cn = gamma_half((n as f64 + 1.0) / 2.0) / PI.powf((n as f64 + 1.0) / 2.0);
            let vol = h.powi(n as i32);
            let mut out = sample_at_centers(f, |x| {
                let mut acc = 0.0;
                for (i, v) in &src {
                    let y: Vec<f64> = i.iter().map(|&c| (c as f64 + 0.5) * h).collect();
                    let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
                    let d = d2.sqrt();
                    if d > eps {
                        acc += v * (x[axis] - y[axis]) / d.powi(n as i32 + 1);
                    }
                }
                cn * vol * acc
            });
            out.approximate = true;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constants() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((gamma_half(2.5) - 0.75 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn one_d_fractional_integral_of_unit_interval() {
        let f = StepFunction::new(1, 0, 2, 0, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let g = frac_integral(&f, 0.5).unwrap();
        // cell [2,3) has center 2.5: 2 (sqrt(2.5) - sqrt(1.5))
        let want = 2.0 * (2.5f64.sqrt() - 1.5f64.sqrt());
        assert!((g.values()[2] - want).abs() < 1e-15);
        assert!(!g.approximate);
    }

    #[test]
    fn hilbert_of_unit_interval() {
        // centers at 0.5 and 1.5 for cells of width 1; at 1.5: ln(1.5 / 0.5) / pi
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, 0.0]).unwrap();
        let g = singular_apply(&f, &SingularKernel::Hilbert1D).unwrap();
        assert_eq!(g.values()[0], 0.0);
        assert!((g.values()[1] - 3f64.ln() / PI).abs() < 1e-15);
    }

    #[test]
    fn riesz_in_one_dimension_approximates_hilbert_far_away() {
        let f = StepFunction::new(1, 3, 2, 0, (0..32).map(|i| if i < 8 { 1.0 } else { 0.0 }).collect()).unwrap();
        let h = singular_apply(&f, &SingularKernel::Hilbert1D).unwrap();
        let r = singular_apply(&f, &SingularKernel::TruncatedRiesz { axis: 0, eps: 0.01 }).unwrap();
        // far from the support the midpoint rule is accurate
        assert!((h.values()[30] - r.values()[30]).abs() < 1e-3);
    }
}
