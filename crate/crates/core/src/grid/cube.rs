use crate::error::{Error, Result};

/// Dyadic cube `2^{-j}([0,1)^n + m)`, optionally on the third-shifted grid
/// `2^{-j}([0,1)^n + m + a/3)` with `a_i in {0,1,2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub level: i32,
    pub m: Vec<i64>,
    pub shift: Option<Vec<u8>>,
}

/// Half-open interval `[lo, hi)` in units of `2^{-unit_level}/3`.
pub(crate) type Span = (i128, i128);

impl DyadicCube {
    pub fn new(level: i32, m: Vec<i64>) -> Self {
        Self { level, m, shift: None }
    }

    pub fn shifted(level: i32, m: Vec<i64>, shift: Vec<u8>) -> Result<Self> {
        if shift.len() != m.len() {
            return Err(Error::DimensionMismatch { expected: m.len(), got: shift.len() });
        }
        if shift.iter().any(|&a| a > 2) {
            return Err(Error::InvalidParams("shift components must be 0, 1 or 2".into()));
        }
        let shift = if shift.iter().all(|&a| a == 0) { None } else { Some(shift) };
        Ok(Self { level, m, shift })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn side(&self) -> f64 {
        (-self.level as f64).exp2()
    }

    /// `|Q| = 2^{-jn}`.
    pub fn volume(&self) -> f64 {
        (-(self.level as f64) * self.dim() as f64).exp2()
    }

    pub fn shift_at(&self, axis: usize) -> u8 {
        self.shift.as_ref().map_or(0, |a| a[axis])
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.side() * (self.m[i] as f64 + self.shift_at(i) as f64 / 3.0))
            .collect()
    }

    /// Exact span on `axis` in units of `2^{-unit_level}/3`; needs `unit_level >= level`.
    pub(crate) fn span(&self, axis: usize, unit_level: i32) -> Span {
        debug_assert!(unit_level >= self.level);
        let scale = 1i128 << (unit_level - self.level);
        let lo = (3 * self.m[axis] as i128 + self.shift_at(axis) as i128) * scale;
        (lo, lo + 3 * scale)
    }

    /// Set containment, exact.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let u = self.level.max(other.level);
        (0..self.dim()).all(|i| {
            let (a, b) = self.span(i, u);
            let (c, d) = other.span(i, u);
            a <= c && d <= b
        })
    }
}

/// Indices `m` along one axis of level-`j` cubes (with shift `a`) meeting `[0, 2^k)`.
pub(crate) fn axis_indices_meeting_window(j: i32, k: i32, a: u8) -> std::ops::Range<i64> {
    // Cube [ (3m+a) 2^{-j}/3, (3m+a+3) 2^{-j}/3 ) meets [0, 2^k) iff
    // 3m+a+3 > 0 and (3m+a) 2^{-j} < 3 * 2^k.
    let lo = (-(a as i64) - 3).div_euclid(3) + 1;
    // largest m with (3m + a) < 3 * 2^{k+j}
    let e = k + j;
    let hi = if e >= 0 {
        let w = 3i128 << e;
        // 3m + a < w  <=>  m <= (w - a - 1) / 3
        ((w - a as i128 - 1).div_euclid(3)) as i64
    } else {
        // (3m + a) * 2^{-e} < 3
        let s = 1i128 << (-e);
        let mut m = 0i64;
        // m >= 0 only possible if a * s < 3
        if (a as i128) * s < 3 {
            while ((3 * (m as i128 + 1) + a as i128) * s) < 3 {
                m += 1;
            }
            m
        } else {
            -1
        }
    };
    lo..hi + 1
}

/// All level-`j` cubes (standard, or with `shift`) meeting the window `[0, 2^k)^n`.
///
/// Lexicographic order with axis 0 varying fastest.
pub fn cubes_in_window(j: i32, k: i32, n: usize, shift: Option<&[u8]>) -> Vec<DyadicCube> {
    let ranges: Vec<std::ops::Range<i64>> = (0..n)
        .map(|i| axis_indices_meeting_window(j, k, shift.map_or(0, |s| s[i])))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.start).collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return out;
    }
    loop {
        out.push(DyadicCube {
            level: j,
            m: cur.clone(),
            shift: shift.filter(|s| s.iter().any(|&a| a != 0)).map(|s| s.to_vec()),
        });
        let mut ax = 0;
        loop {
            if ax == n {
                return out;
            }
            cur[ax] += 1;
            if cur[ax] < ranges[ax].end {
                break;
            }
            cur[ax] = ranges[ax].start;
            ax += 1;
        }
    }
}

/// Every shift vector in `{0,1,2}^n`, the zero shift first.
pub fn all_shifts(n: usize) -> Vec<Vec<u8>> {
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let a = (c % 3) as u8;
                    c /= 3;
                    a
                })
                .collect()
        })
        .collect()
}
