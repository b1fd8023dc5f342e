use rayon::prelude::*;

use super::cube::DyadicCube;
use crate::error::{Error, Result};

/// Function on `[0, 2^K)^n`, constant on cells of side `2^{-J} / 3^d`.
///
/// Values are stored with axis 0 varying fastest. Outside the window the function is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    n: usize,
    j: i32,
    k: i32,
    depth: u8,
    values: Vec<f64>,
    /// Set by operators whose output is a sampled approximation rather than exact.
    pub approximate: bool,
}

/// Per-axis half-open cell index ranges.
pub type CellBox = Vec<(usize, usize)>;

impl StepFunction {
    pub fn new(n: usize, j: i32, k: i32, depth: u8, values: Vec<f64>) -> Result<Self> {
        Self::check_grid(n, j, k, depth)?;
        let expected = Self::cells_for(n, j, k, depth);
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        Ok(Self { n, j, k, depth, values, approximate: false })
    }

    pub fn zeros(n: usize, j: i32, k: i32, depth: u8) -> Result<Self> {
        Self::check_grid(n, j, k, depth)?;
        Ok(Self { n, j, k, depth, values: vec![0.0; Self::cells_for(n, j, k, depth)], approximate: false })
    }

    /// Samples `g` at every cell center.
    pub fn from_fn(n: usize, j: i32, k: i32, depth: u8, g: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut f = Self::zeros(n, j, k, depth)?;
        let mut idx = vec![0usize; n];
        for lin in 0..f.values.len() {
            f.unflatten_into(lin, &mut idx);
            let c = f.cell_center(&idx);
            f.values[lin] = g(&c);
        }
        Ok(f)
    }

    /// `chi_Q` on a grid fine enough for `Q`.
    pub fn indicator(n: usize, j: i32, k: i32, cube: &DyadicCube) -> Result<Self> {
        let depth = u8::from(cube.shift.is_some());
        let mut f = Self::zeros(n, j.max(cube.level), k, depth)?;
        let bx = f.cube_cells(cube)?;
        f.fill_box(&bx, 1.0);
        Ok(f)
    }

    fn check_grid(n: usize, j: i32, k: i32, depth: u8) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if depth > 1 {
            return Err(Error::DepthUnsupported(depth));
        }
        if k < 0 || k + j < 0 {
            return Err(Error::WindowUnderflow(format!("need K >= 0 and K + J >= 0 (J={j}, K={k})")));
        }
        if (k + j) as u32 * n as u32 > 40 {
            return Err(Error::InvalidParams("grid too large".into()));
        }
        Ok(())
    }

    fn cells_for(n: usize, j: i32, k: i32, depth: u8) -> usize {
        let per = (1usize << (k + j)) * 3usize.pow(depth as u32);
        per.pow(n as u32)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    /// Resolution level `J`.
    pub fn level(&self) -> i32 {
        self.j
    }
    /// Window exponent `K`.
    pub fn window(&self) -> i32 {
        self.k
    }
    pub fn depth(&self) -> u8 {
        self.depth
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cells_per_axis(&self) -> usize {
        (1usize << (self.k + self.j)) * 3usize.pow(self.depth as u32)
    }

    /// Side of one cell, `2^{-J}/3^d`.
    pub fn cell_width(&self) -> f64 {
        (-self.j as f64).exp2() / 3f64.powi(self.depth as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.n as i32)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.j == other.j && self.k == other.k && self.depth == other.depth
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let per = self.cells_per_axis();
        idx.iter().rev().fold(0, |acc, &i| acc * per + i)
    }

    pub fn unflatten_into(&self, mut lin: usize, idx: &mut [usize]) {
        let per = self.cells_per_axis();
        for slot in idx.iter_mut() {
            *slot = lin % per;
            lin /= per;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.flatten(idx)]
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        let h = self.cell_width();
        idx.iter().map(|&i| (i as f64 + 0.5) * h).collect()
    }

    /// Value at a point of the window; zero outside.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let h = self.cell_width();
        let per = self.cells_per_axis();
        let mut idx = Vec::with_capacity(self.n);
        for &xi in x {
            if xi < 0.0 {
                return 0.0;
            }
            let c = (xi / h).floor() as usize;
            if c >= per {
                return 0.0;
            }
            idx.push(c);
        }
        self.get(&idx)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `int f` over the window.
    pub fn integral(&self) -> f64 {
        crate::util::pairwise_sum(&self.values) * self.cell_volume()
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = g(*v));
        out
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// Combines two functions cellwise after bringing them to a common grid.
    pub fn zip_with(&self, other: &Self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (a, b) = common_grid(self, other)?;
        let mut out = a.clone();
        out.approximate = a.approximate || b.approximate;
        out.values.iter_mut().zip(&b.values).for_each(|(x, &y)| *x = g(*x, y));
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Splits every cell into `3^n` equal subcells (depth 0 -> 1).
    pub fn refine_depth(&self) -> Result<Self> {
        match self.depth {
            1 => Ok(self.clone()),
            0 => self.subdivide(3, 0, 1),
            d => Err(Error::DepthUnsupported(d)),
        }
    }

    /// Same function on the finer resolution `new_j >= J`.
    pub fn refine_dyadic(&self, new_j: i32) -> Result<Self> {
        if new_j < self.j {
            return Err(Error::InvalidParams(format!("cannot coarsen from J={} to {new_j}", self.j)));
        }
        if new_j == self.j {
            return Ok(self.clone());
        }
        self.subdivide(1usize << (new_j - self.j), new_j - self.j, self.depth)
    }

    fn subdivide(&self, factor: usize, dj: i32, new_depth: u8) -> Result<Self> {
        let mut out = Self::zeros(self.n, self.j + dj, self.k, new_depth)?;
        out.approximate = self.approximate;
        let per_out = out.cells_per_axis();
        let per_in = self.cells_per_axis();
        let n = self.n;
        out.values.par_chunks_mut(per_out).enumerate().for_each(|(row, chunk)| {
            // row indexes axes 1..n of the output
            let mut rem = row;
            let mut lin_in = 0usize;
            let mut stride = per_in;
            for _ in 1..n {
                let i = rem % per_out;
                rem /= per_out;
                lin_in += (i / factor) * stride;
                stride *= per_in;
            }
            for (i0, v) in chunk.iter_mut().enumerate() {
                *v = self.values[lin_in + i0 / factor];
            }
        });
        Ok(out)
    }

    /// Zero-pads to a larger window `[0, 2^{new_k})^n`.
    pub fn extend_window(&self, new_k: i32) -> Result<Self> {
        if new_k < self.k {
            return Err(Error::InvalidParams(format!("cannot shrink window from K={} to {new_k}", self.k)));
        }
        if new_k == self.k {
            return Ok(self.clone());
        }
        let mut out = Self::zeros(self.n, self.j, new_k, self.depth)?;
        out.approximate = self.approximate;
        let mut idx = vec![0usize; self.n];
        for lin in 0..self.values.len() {
            self.unflatten_into(lin, &mut idx);
            let o = out.flatten(&idx);
            out.values[o] = self.values[lin];
        }
        Ok(out)
    }

    /// Smallest window `>= min_k` still holding the support.
    pub fn shrink_window(&self, min_k: i32) -> Result<Self> {
        let mut target = self.k;
        let per = self.cells_per_axis();
        let mut idx = vec![0usize; self.n];
        let mut extent = 0usize;
        for lin in 0..self.values.len() {
            if self.values[lin] != 0.0 {
                self.unflatten_into(lin, &mut idx);
                extent = extent.max(idx.iter().copied().max().unwrap_or(0) + 1);
            }
        }
        while target > min_k.max(-self.j) && extent <= per >> (self.k - target + 1) {
            target -= 1;
        }
        if target == self.k {
            return Ok(self.clone());
        }
        let mut out = Self::zeros(self.n, self.j, target, self.depth)?;
        out.approximate = self.approximate;
        let mut oidx = vec![0usize; self.n];
        for lin in 0..out.values.len() {
            out.unflatten_into(lin, &mut oidx);
            out.values[lin] = self.get(&oidx);
        }
        Ok(out)
    }

    /// Per-axis cell ranges covered by `cube` (clipped to the window).
    ///
    /// Fails when the cube boundaries fall inside cells.
    pub fn cube_cells(&self, cube: &DyadicCube) -> Result<CellBox> {
        if cube.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: cube.dim() });
        }
        if cube.level > self.j {
            return Err(Error::Misaligned(format!("cube level {} is finer than J={}", cube.level, self.j)));
        }
        let cu: i128 = if self.depth == 1 { 1 } else { 3 };
        let per = self.cells_per_axis() as i128;
        (0..self.n)
            .map(|ax| {
                let (lo, hi) = cube.span(ax, self.j);
                if lo.rem_euclid(cu) != 0 || hi.rem_euclid(cu) != 0 {
                    return Err(Error::Misaligned("shifted cube on a depth-0 grid".into()));
                }
                let a = (lo / cu).clamp(0, per) as usize;
                let b = (hi / cu).clamp(0, per) as usize;
                Ok((a, b))
            })
            .collect()
    }

    pub fn fill_box(&mut self, bx: &CellBox, v: f64) {
        for_each_in_box(bx, |idx| {
            let l = self.flatten(idx);
            self.values[l] = v;
        });
    }

    /// `f chi_Q`, refining the grid when `Q` is finer than the cells.
    pub fn restrict(&self, cube: &DyadicCube) -> Result<Self> {
        let mut base = self.clone();
        if cube.level > base.j {
            base = base.refine_dyadic(cube.level)?;
        }
        if cube.shift.is_some() && base.depth == 0 {
            base = base.refine_depth()?;
        }
        let bx = base.cube_cells(cube)?;
        let mut out = Self::zeros(base.n, base.j, base.k, base.depth)?;
        out.approximate = base.approximate;
        for_each_in_box(&bx, |idx| {
            let l = base.flatten(idx);
            out.values[l] = base.values[l];
        });
        Ok(out)
    }

    /// `f(2^k x)`: same cell values, cells of side `2^{-(J+k)}`, window `2^{K-k}`.
    pub fn dilate_dyadic(&self, k: i32) -> Result<Self> {
        if self.k - k < 0 {
            return Err(Error::WindowUnderflow(format!("K - k = {} < 0", self.k - k)));
        }
        let mut out = Self::new(self.n, self.j + k, self.k - k, self.depth, self.values.clone())?;
        out.approximate = self.approximate;
        Ok(out)
    }

    /// `f(x - 2^{-J} tau)` for a nonnegative integer cell offset `tau`; the window grows as needed.
    pub fn translate(&self, tau: &[usize]) -> Result<Self> {
        if tau.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: tau.len() });
        }
        let sub = 3usize.pow(self.depth as u32);
        let per = self.cells_per_axis();
        let need = per + tau.iter().max().copied().unwrap_or(0) * sub;
        let mut new_k = self.k;
        while (1usize << (new_k + self.j)) * sub < need {
            new_k += 1;
        }
        let mut out = Self::zeros(self.n, self.j, new_k, self.depth)?;
        out.approximate = self.approximate;
        let mut idx = vec![0usize; self.n];
        for lin in 0..self.values.len() {
            self.unflatten_into(lin, &mut idx);
            for (i, t) in idx.iter_mut().zip(tau) {
                *i += t * sub;
            }
            let o = out.flatten(&idx);
            out.values[o] = self.values[lin];
        }
        Ok(out)
    }

    /// `f(2^K - x)` on every axis; maps cell centers onto cell centers.
    pub fn reflect(&self) -> Self {
        let per = self.cells_per_axis();
        let mut out = self.clone();
        let mut idx = vec![0usize; self.n];
        for lin in 0..self.values.len() {
            self.unflatten_into(lin, &mut idx);
            idx.iter_mut().for_each(|i| *i = per - 1 - *i);
            out.values[self.flatten(&idx)] = self.values[lin];
        }
        out
    }
}

/// Calls `g` for every multi-index in the box, axis 0 fastest.
pub fn for_each_in_box(bx: &CellBox, mut g: impl FnMut(&[usize])) {
    if bx.iter().any(|&(a, b)| a >= b) {
        return;
    }
    let mut idx: Vec<usize> = bx.iter().map(|&(a, _)| a).collect();
    loop {
        g(&idx);
        let mut ax = 0;
        loop {
            if ax == idx.len() {
                return;
            }
            idx[ax] += 1;
            if idx[ax] < bx[ax].1 {
                break;
            }
            idx[ax] = bx[ax].0;
            ax += 1;
        }
    }
}

/// Brings two functions onto the coarsest grid representing both exactly.
pub fn common_grid(a: &StepFunction, b: &StepFunction) -> Result<(StepFunction, StepFunction)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: b.n });
    }
    if a.same_grid(b) {
        return Ok((a.clone(), b.clone()));
    }
    let j = a.j.max(b.j);
    let k = a.k.max(b.k);
    let lift = |f: &StepFunction| -> Result<StepFunction> {
        let mut g = f.refine_dyadic(j)?;
        if a.depth.max(b.depth) == 1 {
            g = g.refine_depth()?;
        }
        g.extend_window(k)
    };
    Ok((lift(a)?, lift(b)?))
}

/// Componentwise family `(f_1, .., f_N)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorStepFunction {
    components: Vec<StepFunction>,
}

impl VectorStepFunction {
    pub fn new(components: Vec<StepFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParams("vector needs at least one component".into()))?;
        if let Some(bad) = components.iter().find(|c| !c.same_grid(first)) {
            return Err(Error::GridMismatch(format!(
                "component on (J={}, K={}, d={}) differs from (J={}, K={}, d={})",
                bad.j, bad.k, bad.depth, first.j, first.k, first.depth
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[StepFunction] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn map(&self, g: impl Fn(&StepFunction) -> Result<StepFunction> + Sync) -> Result<Self> {
        Self::new(self.components.iter().map(g).collect::<Result<_>>()?)
    }

    /// Cellwise `(sum_k |f_k|^u)^{1/u}` (max for `u = inf`).
    pub fn pointwise_norm(&self, u: f64) -> StepFunction {
        let mut out = self.components[0].abs();
        if self.components.len() == 1 {
            return out;
        }
        for (l, v) in out.values.iter_mut().enumerate() {
            let it = self.components.iter().map(|c| c.values[l].abs());
            *v = if u.is_infinite() {
                it.fold(0.0, f64::max)
            } else {
                crate::util::root(it.map(|x| crate::util::abs_pow(x, u)).sum(), u)
            };
        }
        out.approximate = self.components.iter().any(|c| c.approximate);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_and_eval() {
        let q = DyadicCube::new(1, vec![1, 0]);
        let f = StepFunction::indicator(2, 0, 1, &q).unwrap();
        assert_eq!(f.level(), 1);
        assert_eq!(f.eval(&[0.75, 0.25]), 1.0);
        assert_eq!(f.eval(&[0.25, 0.25]), 0.0);
        assert_eq!(f.eval(&[5.0, 0.25]), 0.0);
        assert!((f.integral() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn refinements_preserve_values() {
        let f = StepFunction::from_fn(2, 0, 1, 0, |x| x[0] + 10.0 * x[1]).unwrap();
        let g = f.refine_dyadic(2).unwrap();
        let h = f.refine_depth().unwrap();
        for x in [[0.1, 0.2], [1.9, 0.7], [0.5, 1.99]] {
            assert_eq!(f.eval(&x), g.eval(&x));
            assert_eq!(f.eval(&x), h.eval(&x));
        }
        assert!((f.integral() - h.integral()).abs() < 1e-12);
    }

    #[test]
    fn window_extend_and_shrink_round_trip() {
        let f = StepFunction::from_fn(2, 1, 0, 0, |x| x[0] - x[1]).unwrap();
        let g = f.extend_window(2).unwrap();
        assert_eq!(g.shrink_window(0).unwrap(), f);
    }

    #[test]
    fn dilation_relabels_grid() {
        let f = StepFunction::indicator(1, 0, 1, &DyadicCube::new(-1, vec![0])).unwrap();
        let g = f.dilate_dyadic(1).unwrap();
        assert_eq!((g.level(), g.window()), (1, 0));
        assert_eq!(g.eval(&[0.9]), 1.0);
        assert!(f.dilate_dyadic(2).is_err());
    }

    #[test]
    fn translate_grows_window() {
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, 2.0]).unwrap();
        let g = f.translate(&[1]).unwrap();
        assert_eq!(g.window(), 2);
        assert_eq!(g.values(), &[0.0, 1.0, 2.0, 0.0]);
    }

    #[test]
    fn restrict_to_shifted_cube_refines() {
        let f = StepFunction::new(1, 0, 1, 0, vec![1.0, 1.0]).unwrap();
        let q = DyadicCube::shifted(0, vec![0], vec![1]).unwrap();
        let g = f.restrict(&q).unwrap();
        assert_eq!(g.depth(), 1);
        assert_eq!(g.values(), &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn vector_requires_common_grid() {
        let a = StepFunction::zeros(1, 0, 1, 0).unwrap();
        let b = StepFunction::zeros(1, 1, 1, 0).unwrap();
        assert!(VectorStepFunction::new(vec![a, b]).is_err());
    }

    #[test]
    fn pointwise_norm_lu() {
        let a = StepFunction::new(1, 0, 0, 0, vec![3.0]).unwrap();
        let b = StepFunction::new(1, 0, 0, 0, vec![-4.0]).unwrap();
        let v = VectorStepFunction::new(vec![a, b]).unwrap();
        assert_eq!(v.pointwise_norm(2.0).values(), &[5.0]);
        assert_eq!(v.pointwise_norm(f64::INFINITY).values(), &[4.0]);
    }
}
