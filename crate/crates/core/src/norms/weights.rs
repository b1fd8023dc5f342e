//! Separable power-law weights and the norms they induce.

use crate::error::{Error, Result};
use crate::grid::{ExponentVector, StepFunction};
use crate::util::{pairwise_sum, root};

/// `c |s - s0|^beta` on `[lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPiece {
    pub lo: f64,
    pub hi: f64,
    pub c: f64,
    pub s0: f64,
    pub beta: f64,
}

impl WeightPiece {
    fn at(&self, s: f64) -> f64 {
        if self.beta == 0.0 {
            self.c
        } else {
            self.c * (s - self.s0).abs().powf(self.beta)
        }
    }

    /// `int_a^b w^q ds` for `[a, b]` inside the piece.
    fn integral_pow(&self, a: f64, b: f64, q: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let g = self.beta * q;
        let cq = self.c.powf(q);
        if g == 0.0 {
            return Ok(cq * (b - a));
        }
        // antiderivative of |s - s0|^g on one side of s0
        let prim = |d: f64| if g == -1.0 { d.ln() } else { d.powf(g + 1.0) / (g + 1.0) };
        let (da, db) = (a - self.s0, b - self.s0);
        if g <= -1.0 && da <= 0.0 && db >= 0.0 {
            return Err(Error::NonIntegrableWeight(format!(
                "exponent {g} at s0 = {} inside [{a}, {b}]",
                self.s0
            )));
        }
        let v = if da >= 0.0 {
            prim(db) - prim(da)
        } else if db <= 0.0 {
            prim(-da) - prim(-db)
        } else {
            prim(-da) + prim(db)
        };
        Ok(cq * v)
    }

    /// `sup` and `inf` of `w` over `[a, b]` (closure).
    fn range(&self, a: f64, b: f64) -> (f64, f64) {
        if self.beta == 0.0 {
            return (self.c, self.c);
        }
        let (wa, wb) = (self.at(a), self.at(b));
        let inside = a <= self.s0 && self.s0 <= b;
        let (lo, hi) = (wa.min(wb), wa.max(wb));
        match (inside, self.beta > 0.0) {
            (true, true) => (hi, 0.0),
            (true, false) => (f64::INFINITY, lo),
            _ => (hi, lo),
        }
    }
}

/// Piecewise power weight on one axis of the window `[0, len)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisWeightProfile {
    pub pieces: Vec<WeightPiece>,
}

impl AxisWeightProfile {
    pub fn constant(len: f64, c: f64) -> Self {
        Self { pieces: vec![WeightPiece { lo: 0.0, hi: len, c, s0: 0.0, beta: 0.0 }] }
    }

    /// `(M chi_[a,b))^s` on `[0, len)`: 1 on the interval, `((b-a)/(b-x))^s` left of it,
    /// `((b-a)/(x-a))^s` right of it.
    pub fn maximal_indicator_power(a: f64, b: f64, len: f64, s: f64) -> Result<Self> {
        if !(a < b) || s <= 0.0 {
            return Err(Error::InvalidParams(format!("need a < b and s > 0 (a={a}, b={b}, s={s})")));
        }
        let c = (b - a).powf(s);
        let mut pieces = Vec::new();
        if a > 0.0 {
            pieces.push(WeightPiece { lo: 0.0, hi: a.min(len), c, s0: b, beta: -s });
        }
        if a < len {
            pieces.push(WeightPiece { lo: a.max(0.0), hi: b.min(len), c: 1.0, s0: 0.0, beta: 0.0 });
        }
        if b < len {
            pieces.push(WeightPiece { lo: b, hi: len, c, s0: a, beta: -s });
        }
        Ok(Self { pieces })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.pieces.iter().find(|p| p.lo <= s && s < p.hi).map_or(0.0, |p| p.at(s))
    }

    /// `int_a^b w^q`, summed over the pieces meeting `[a, b)`.
    pub fn integral_pow(&self, a: f64, b: f64, q: f64) -> Result<f64> {
        let mut acc = 0.0;
        for p in &self.pieces {
            acc += p.integral_pow(a.max(p.lo), b.min(p.hi), q)?;
        }
        Ok(acc)
    }

    /// `(sup, inf)` of `w` over `[a, b)`.
    pub fn range(&self, a: f64, b: f64) -> (f64, f64) {
        self.pieces
            .iter()
            .filter(|p| p.lo < b && a < p.hi)
            .map(|p| p.range(a.max(p.lo), b.min(p.hi)))
            .fold((0.0, f64::INFINITY), |(s, i), (ps, pi)| (s.max(ps), i.min(pi)))
    }
}

/// `||f (w_1 x .. x w_n)||_{L^{p_bar}}` for a step function `f`.
///
/// Exact: on a cell the tensor weight factors out of each inner norm, so axis `i`
/// uses the cell weights `int_cell w_i^{p_i}` in place of the cell width.
pub fn weighted_mixed_norm(f: &StepFunction, pbar: &ExponentVector, weights: &[AxisWeightProfile]) -> Result<f64> {
    let n = f.dim();
    if pbar.dim() != n || weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: pbar.dim().min(weights.len()) });
    }
    let per = f.cells_per_axis();
    let h = f.cell_width();
    let mut cur: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut scratch = Vec::with_capacity(per);
    for ax in 0..n {
        let p = pbar.get(ax);
        let cell_w: Vec<f64> = (0..per)
            .map(|c| {
                let (a, b) = (c as f64 * h, (c + 1) as f64 * h);
                if p.is_infinite() {
                    Ok(weights[ax].range(a, b).0)
                } else {
                    weights[ax].integral_pow(a, b, p)
                }
            })
            .collect::<Result<_>>()?;
        cur = cur
            .chunks(per)
            .map(|line| {
                if p.is_infinite() {
                    line.iter().zip(&cell_w).fold(0.0f64, |m, (v, w)| if *v == 0.0 { m } else { m.max(v * w) })
                } else {
                    scratch.clear();
                    scratch.extend(line.iter().zip(&cell_w).map(|(v, w)| if *v == 0.0 { 0.0 } else { v.powf(p) * w }));
                    root(pairwise_sum(&scratch), p)
                }
            })
            .collect();
    }
    Ok(cur[0])
}

/// Tensor weight `(M chi_{I_1})^eta x .. x (M chi_{I_n})^eta` on `[0, 2^K)`.
///
/// `eta` must lie in `(0, 1)`; with `pbar` given, also below `1/max p_i` so every
/// `w_i^{p_i}` stays integrable.
pub fn mit_chi_weight(
    rect: &[(f64, f64)],
    eta: f64,
    window: i32,
    pbar: Option<&ExponentVector>,
) -> Result<Vec<AxisWeightProfile>> {
    let cap = pbar.map_or(1.0, |p| (1.0 / p.max()).min(1.0));
    if !(eta > 0.0 && eta < cap) {
        return Err(Error::InvalidParams(format!("eta = {eta} outside (0, {cap})")));
    }
    let len = (window as f64).exp2();
    rect.iter().map(|&(a, b)| AxisWeightProfile::maximal_indicator_power(a, b, len, eta)).collect()
}

/// `sup_I avg_I(w) / inf_I w` over dyadic intervals of levels `levels` inside the profile's window.
pub fn a1_ratio(weight: &AxisWeightProfile, window: i32, levels: std::ops::RangeInclusive<i32>) -> Result<f64> {
    let len = (window as f64).exp2();
    let mut best: f64 = 0.0;
    for j in levels {
        let side = (-j as f64).exp2();
        if side > len {
            continue;
        }
        let count = (len / side).round() as usize;
        for m in 0..count {
            let (a, b) = (m as f64 * side, (m + 1) as f64 * side);
            let avg = weight.integral_pow(a, b, 1.0)? / side;
            let (_, inf) = weight.range(a, b);
            let r = if inf == 0.0 { f64::INFINITY } else { avg / inf };
            best = best.max(r);
        }
    }
    Ok(best)
}
