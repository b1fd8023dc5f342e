use crate::error::{Error, Result};

/// Conjugate exponent: `1/p + 1/p' = 1`, with `1 <-> inf`.
pub fn conjugate(p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("{p} has no conjugate (need p >= 1)")));
    }
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

#[inline]
fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// Per-axis integrability exponents `(p_1, .., p_n)`; axis 1 is integrated first.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    pub fn new(ps: Vec<f64>) -> Result<Self> {
        if ps.is_empty() {
            return Err(Error::InvalidExponent("empty exponent vector".into()));
        }
        for &p in &ps {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::InvalidExponent(format!("{p} is not in (0, inf]")));
            }
        }
        Ok(Self(ps))
    }

    /// `n` copies of the same exponent.
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    /// Parses `2,4` or `2,inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let ps = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                if t.eq_ignore_ascii_case("inf") {
                    Ok(f64::INFINITY)
                } else {
                    t.parse::<f64>()
                        .map_err(|_| Error::InvalidExponent(format!("cannot parse `{t}`")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ps)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// `sum 1/p_i`.
    pub fn sum_recip(&self) -> f64 {
        self.0.iter().map(|&p| recip(p)).sum()
    }

    /// Mean reciprocal `sigma = (1/n) sum 1/p_i`.
    pub fn sigma(&self) -> f64 {
        self.sum_recip() / self.dim() as f64
    }

    pub fn conjugate(&self) -> Result<Self> {
        Ok(Self(self.0.iter().map(|&p| conjugate(p)).collect::<Result<_>>()?))
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// `c * p_i` on every axis.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|p| p * c).collect())
    }

    /// Leading sub-vector `(p_1, .., p_k)`.
    pub fn prefix(&self, k: usize) -> Self {
        Self(self.0[..k].to_vec())
    }

    /// True when every `p_i` is strictly between 1 and infinity.
    pub fn is_reflexive(&self) -> bool {
        self.0.iter().all(|&p| p > 1.0 && p.is_finite())
    }
}

/// Where a parameter triple falls in the nontriviality classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `n/sum(1/p_i) < t < r < inf`.
    NontrivialFinite,
    /// `n/sum(1/p_i) <= t < r = inf`.
    NontrivialMorrey,
    /// The space reduces to `{0}`.
    Degenerate,
}

/// `(p_bar, t, r)` for the Bourgain-Morrey space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceParams {
    pub pbar: ExponentVector,
    pub t: f64,
    pub r: f64,
}

impl SpaceParams {
    pub fn new(pbar: ExponentVector, t: f64, r: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("t = {t} must be positive and finite")));
        }
        if r.is_nan() || r <= 0.0 {
            return Err(Error::InvalidParams(format!("r = {r} must be positive")));
        }
        Ok(Self { pbar, t, r })
    }

    pub fn dim(&self) -> usize {
        self.pbar.dim()
    }

    pub fn sigma(&self) -> f64 {
        self.pbar.sigma()
    }

    /// `n / sum(1/p_i)`, infinite when every `p_i` is infinite.
    pub fn threshold(&self) -> f64 {
        let s = self.pbar.sum_recip();
        if s == 0.0 {
            f64::INFINITY
        } else {
            self.dim() as f64 / s
        }
    }

    pub fn regime(&self) -> Regime {
        let th = self.threshold();
        if self.r.is_infinite() {
            if th <= self.t {
                Regime::NontrivialMorrey
            } else {
                Regime::Degenerate
            }
        } else if th < self.t && self.t < self.r {
            Regime::NontrivialFinite
        } else {
            Regime::Degenerate
        }
    }

    /// Rejects the degenerate regime with the classification spelled out.
    pub fn require_nontrivial(&self) -> Result<Regime> {
        match self.regime() {
            Regime::Degenerate => Err(Error::InvalidParams(format!(
                "(p={:?}, t={}, r={}) is degenerate: need n/sum(1/p_i) < t < r < inf \
                 or n/sum(1/p_i) <= t < r = inf (here n/sum(1/p_i) = {}); the space is {{0}}",
                self.pbar.as_slice(),
                self.t,
                self.r,
                self.threshold()
            ))),
            r => Ok(r),
        }
    }

    /// `1/t - sigma`: the exponent of `|Q|` in a single cube term.
    pub fn cube_exponent(&self) -> f64 {
        1.0 / self.t - self.sigma()
    }

    pub fn dual(&self) -> Result<DualParams> {
        Ok(DualParams {
            pbar: self.pbar.conjugate()?,
            t: conjugate(self.t)?,
            r: conjugate(self.r)?,
        })
    }
}

/// Conjugate triple `(p_bar', t', r')` used by block spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct DualParams {
    pub pbar: ExponentVector,
    pub t: f64,
    pub r: f64,
}

impl DualParams {
    /// `1/t' - sigma'`, which equals `sigma - 1/t` of the primal triple.
    pub fn cube_exponent(&self) -> f64 {
        recip(self.t) - self.pbar.sigma()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(ps: &[f64]) -> ExponentVector {
        ExponentVector::new(ps.to_vec()).unwrap()
    }

    #[test]
    fn sigma_and_conjugates() {
        let p = ev(&[2.0, 4.0]);
        assert_eq!(p.sigma(), 0.375);
        let c = ev(&[1.0, f64::INFINITY, 2.0]).conjugate().unwrap();
        assert_eq!(c.as_slice(), &[f64::INFINITY, 1.0, 2.0]);
        assert_eq!(ev(&[f64::INFINITY, f64::INFINITY]).sigma(), 0.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ExponentVector::new(vec![2.0, 0.0]).is_err());
        assert!(ExponentVector::new(vec![-1.0]).is_err());
        assert!(ExponentVector::new(vec![]).is_err());
    }

    #[test]
    fn regimes() {
        let p = ev(&[2.0, 4.0]);
        let sp = |t, r| SpaceParams::new(p.clone(), t, r).unwrap().regime();
        assert_eq!(sp(4.0, 8.0), Regime::NontrivialFinite);
        assert_eq!(sp(8.0 / 3.0, 8.0), Regime::Degenerate);
        assert_eq!(sp(8.0 / 3.0, f64::INFINITY), Regime::NontrivialMorrey);
        assert_eq!(sp(4.0, 4.0), Regime::Degenerate);
        assert_eq!(sp(2.0, f64::INFINITY), Regime::Degenerate);
        let all_inf = SpaceParams::new(ev(&[f64::INFINITY]), 3.0, 5.0).unwrap();
        assert_eq!(all_inf.regime(), Regime::Degenerate);
    }

    #[test]
    fn dual_cube_exponent_is_negated() {
        let sp = SpaceParams::new(ev(&[2.0, 4.0]), 4.0, 8.0).unwrap();
        let d = sp.dual().unwrap();
        assert!((d.cube_exponent() + sp.cube_exponent()).abs() < 1e-15);
    }

    #[test]
    fn parse_with_inf() {
        assert_eq!(ExponentVector::parse("2, inf").unwrap().as_slice(), &[2.0, f64::INFINITY]);
        assert!(ExponentVector::parse("2,x").is_err());
    }
}
