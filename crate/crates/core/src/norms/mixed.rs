use super::blockwise::{block_reduce, Reduce};
use crate::error::{Error, Result};
use crate::grid::{ExponentVector, StepFunction};
use crate::util::{abs_pow, pairwise_sum, root};

fn check_dim(f: &StepFunction, pbar: &ExponentVector) -> Result<()> {
    if f.dim() != pbar.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: pbar.dim() });
    }
    Ok(())
}

/// `||f||_{L^{p_bar}}`: axis 1 is integrated first, then axis 2, and so on.
pub fn mixed_norm(f: &StepFunction, pbar: &ExponentVector) -> Result<f64> {
    check_dim(f, pbar)?;
    let per = f.cells_per_axis();
    let cuts = vec![vec![0, per]; f.dim()];
    let ops: Vec<Reduce> = pbar.as_slice().iter().map(|&p| Reduce::Norm(p)).collect();
    Ok(block_reduce(f.values(), per, &cuts, &ops, f.cell_width())[0])
}

/// Partial norms after integrating out axes `1..=i`, for `i = 1..n`.
///
/// Entry `i-1` is indexed by the remaining axes `i+1..n` (lowest axis fastest).
pub fn partial_norms(f: &StepFunction, pbar: &ExponentVector) -> Result<Vec<Vec<f64>>> {
    check_dim(f, pbar)?;
    let per = f.cells_per_axis();
    let h = f.cell_width();
    let mut stages = Vec::with_capacity(f.dim());
    let mut cur = f.values().to_vec();
    let mut scratch = Vec::with_capacity(per);
    for &p in pbar.as_slice() {
        let next: Vec<f64> = cur
            .chunks(per)
            .map(|line| {
                if p.is_infinite() {
                    line.iter().fold(0.0f64, |m, v| m.max(v.abs()))
                } else {
                    scratch.clear();
                    scratch.extend(line.iter().map(|&v| abs_pow(v, p)));
                    root(h * pairwise_sum(&scratch), p)
                }
            })
            .collect();
        stages.push(next.clone());
        cur = next;
    }
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DyadicCube;

    #[test]
    fn constant_cube_norm() {
        let q = DyadicCube::new(1, vec![0, 1]);
        let f = StepFunction::indicator(2, 1, 0, &q).unwrap();
        let p = ExponentVector::new(vec![2.0, 4.0]).unwrap();
        // |Q|^sigma = (1/4)^{3/8}
        let want = 0.25f64.powf(0.375);
        assert!((mixed_norm(&f, &p).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn order_of_integration_matters() {
        // rows along x1: (1, 2) for x2 < 1/2 and (1, 0) above; not a tensor product
        let f = StepFunction::new(2, 1, 0, 0, vec![1.0, 2.0, 1.0, 0.0]).unwrap();
        let p12 = ExponentVector::new(vec![1.0, f64::INFINITY]).unwrap();
        // inner L^1 in x1: rows give 1.5 and 0.5; sup = 1.5
        assert!((mixed_norm(&f, &p12).unwrap() - 1.5).abs() < 1e-15);
        let pinf1 = ExponentVector::new(vec![f64::INFINITY, 1.0]).unwrap();
        // inner sup in x1: rows 2 and 1; L^1 in x2 = (2 + 1)/2
        assert!((mixed_norm(&f, &pinf1).unwrap() - 1.5).abs() < 1e-15);
        let p21 = ExponentVector::new(vec![2.0, 1.0]).unwrap();
        let want = 0.5 * ((0.5f64 * 5.0).sqrt() + (0.5f64).sqrt());
        assert!((mixed_norm(&f, &p21).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn partial_norms_end_in_full_norm() {
        let f = StepFunction::from_fn(3, 1, 0, 0, |x| x[0] - 2.0 * x[1] + x[2] * x[0]).unwrap();
        let p = ExponentVector::new(vec![1.5, 3.0, 2.0]).unwrap();
        let st = partial_norms(&f, &p).unwrap();
        assert_eq!(st.len(), 3);
        assert_eq!(st[0].len(), 4);
        assert!((st[2][0] - mixed_norm(&f, &p).unwrap()).abs() < 1e-14);
    }
}
