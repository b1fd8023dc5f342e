//! Seeded probes. Exact probes assert a constant-1 inequality (or an identity) up to
//! `1e-10`; empirical probes report the largest ratio seen and pass when it is finite
//! and moves by at most 10% when the same inputs are refined one level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generate::{gen_random_step, GenSpec};
use crate::blocks::{block_split, h_norm_lower, h_norm_upper, holder_dual, pairing};
use crate::error::{Error, Result};
use crate::grid::{all_shifts, cubes_in_window, DyadicCube, ExponentVector, SpaceParams, StepFunction, VectorStepFunction};
use crate::norms::blockwise::cube_norms;
use crate::norms::{
    a1_ratio, bm_norm, bm_norm_bracket, indicator_mixed_norm, mit_chi_weight, mixed_norm, morrey_norm,
    shifted_bm_norm_bracket, vector_bm_norm, vector_bm_norm_bracket, weighted_mixed_norm, AxisWeightProfile,
};
use crate::operators::{
    cond_expect, convolve_project, doob_maximal, frac_integral, hl_maximal_lower, iterated_maximal_grid,
    singular_apply, SingularKernel,
};
use crate::util::pow2;

pub const EXACT_TOL: f64 = 1e-10;
pub const REFINE_TOL: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    Exact,
    Empirical,
}

/// What to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSpec {
    pub name: String,
    pub trials: usize,
    pub seed: u64,
    pub gen: GenSpec,
    /// Empirical probes evaluate at `gen.j + refine` and `gen.j + refine + 1`.
    pub refine: i32,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub probe: String,
    pub params: String,
    pub trials: usize,
    pub max_ratio: f64,
    pub witness_seed: u64,
    pub pass: bool,
    pub notes: String,
}

pub const CSV_HEADER: &str = "probe,params,trials,max_ratio,witness_seed,pass,notes";

impl ProbeReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{},{},{}",
            self.probe, self.params, self.trials, self.max_ratio, self.witness_seed, self.pass, self.notes
        )
    }
}

type ProbeFn = fn(&ProbeSpec) -> Result<ProbeReport>;

struct Entry {
    name: &'static str,
    kind: ProbeKind,
    n: usize,
    j: i32,
    k: i32,
    trials: usize,
    refine: i32,
    run: ProbeFn,
}

const fn e(name: &'static str, kind: ProbeKind, n: usize, j: i32, k: i32, trials: usize, run: ProbeFn) -> Entry {
    Entry { name, kind, n, j, k, trials, refine: 0, run }
}

const fn os(mut entry: Entry, refine: i32) -> Entry {
    entry.refine = refine;
    entry
}

use ProbeKind::{Empirical as Em, Exact as Ex};

const REGISTRY: &[Entry] = &[
    e("indicator_norm", Ex, 2, 2, 2, 500, indicator_norm),
    e("embedding", Ex, 2, 2, 2, 1000, embedding),
    e("exponent_monotone", Ex, 2, 2, 2, 1000, exponent_monotone),
    e("holder", Ex, 2, 2, 2, 1000, holder),
    e("dilation", Ex, 2, 2, 2, 1000, dilation),
    e("ek_contraction", Ex, 2, 2, 2, 1000, ek_contraction),
    e("tower", Ex, 2, 2, 2, 1000, tower),
    e("conv_mass", Ex, 2, 2, 2, 1000, conv_mass),
    e("attainer", Ex, 2, 2, 2, 200, attainer),
    e("duality_sandwich", Ex, 2, 1, 1, 200, duality_sandwich),
    e("duality_chain", Ex, 2, 1, 1, 500, duality_chain),
    e("single_block", Ex, 2, 2, 1, 200, single_block),
    e("fatou", Ex, 2, 1, 1, 200, fatou),
    e("lattice", Ex, 2, 2, 2, 200, lattice),
    e("martingale", Ex, 2, 2, 2, 200, martingale),
    e("a1_weight", Ex, 1, 0, 2, 1, a1_weight),
    e("translation", Em, 2, 2, 1, 24, translation),
    e("doob", Em, 2, 2, 1, 24, doob),
    os(e("young", Em, 2, 2, 1, 16, young), 1),
    e("hl_maximal", Em, 2, 2, 1, 16, hl_maximal),
    e("iterated_maximal", Em, 2, 2, 1, 24, iterated_maximal),
    e("weighted_iterated", Em, 2, 2, 1, 24, weighted_iterated),
    e("vector_maximal", Em, 2, 2, 1, 12, vector_maximal),
    e("double_vector_maximal", Em, 2, 2, 1, 8, double_vector_maximal),
    e("vector_iterated", Em, 2, 2, 1, 16, vector_iterated),
    os(e("hilbert_bm", Em, 1, 3, 2, 24, hilbert_bm), 2),
    os(e("riesz_bm", Em, 2, 1, 0, 12, riesz_bm), 2),
    os(e("hilbert_block", Em, 1, 3, 1, 16, hilbert_block), 2),
    os(e("riesz_block", Em, 2, 1, 0, 8, riesz_block), 2),
    e("maximal_block", Em, 1, 3, 1, 16, maximal_block),
    e("frac_integral", Em, 1, 3, 2, 24, frac_integral_probe),
    e("pointwise_potential", Em, 1, 3, 2, 24, pointwise_potential),
    e("shifted_grid", Em, 1, 3, 1, 16, shifted_grid),
];

/// Every registered probe name, in suite order.
pub fn probe_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name).collect()
}

pub fn probe_kind(name: &str) -> Result<ProbeKind> {
    Ok(entry(name)?.kind)
}

fn entry(name: &str) -> Result<&'static Entry> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownProbe(name.to_string()))
}

impl ProbeSpec {
    /// Registered defaults for a probe.
    pub fn default_for(name: &str) -> Result<Self> {
        let e = entry(name)?;
        Ok(Self { name: name.to_string(), trials: e.trials, seed: 1, gen: GenSpec::new(e.n, e.j, e.k), refine: e.refine })
    }
}

/// Runs one probe.
pub fn probe(spec: &ProbeSpec) -> Result<ProbeReport> {
    (entry(&spec.name)?.run)(spec)
}

// ---------------------------------------------------------------------------
// shared machinery

fn sp(p: &[f64], t: f64, r: f64) -> SpaceParams {
    SpaceParams::new(ExponentVector::new(p.to_vec()).expect("valid exponents"), t, r).expect("valid params")
}

fn fmt_p(p: &SpaceParams) -> String {
    let ps: Vec<String> = p.pbar.as_slice().iter().map(|x| format!("{x}")).collect();
    format!("p={} t={} r={}", ps.join(";"), p.t, p.r)
}

fn grid_tag(g: &GenSpec) -> String {
    format!("n={} J={} K={}", g.n, g.j, g.k)
}

fn aux_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15)
}

fn seeds(spec: &ProbeSpec) -> Vec<u64> {
    (0..spec.trials).map(|i| spec.seed.wrapping_add(i as u64)).collect()
}

fn worst(results: &[(u64, f64)]) -> (u64, f64) {
    results.iter().fold((results.first().map_or(0, |r| r.0), f64::NEG_INFINITY), |(ws, wv), &(s, v)| {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > wv {
            (s, v)
        } else {
            (ws, wv)
        }
    })
}

fn ratio_sym(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        (a / b).max(b / a)
    }
}

fn run_exact(spec: &ProbeSpec, params: String, trial: impl Fn(u64) -> Result<f64> + Sync) -> Result<ProbeReport> {
    let results: Vec<(u64, f64)> = seeds(spec).par_iter().map(|&s| Ok((s, trial(s)?))).collect::<Result<_>>()?;
    let (ws, mr) = worst(&results);
    let mr = if results.is_empty() { 1.0 } else { mr };
    Ok(ProbeReport {
        probe: spec.name.clone(),
        params,
        trials: spec.trials,
        max_ratio: mr,
        witness_seed: ws,
        pass: mr <= 1.0 + EXACT_TOL,
        notes: "exact".into(),
    })
}

/// `trial(seed, extra)` is evaluated on the inputs refined by `extra` levels.
fn run_empirical(spec: &ProbeSpec, params: String, trial: impl Fn(u64, i32) -> Result<f64> + Sync) -> Result<ProbeReport> {
    let at = |extra: i32| -> Result<(u64, f64)> {
        let results: Vec<(u64, f64)> =
            seeds(spec).par_iter().map(|&s| Ok((s, trial(s, extra)?))).collect::<Result<_>>()?;
        Ok(worst(&results))
    };
    let (ws, m0) = at(spec.refine)?;
    let (_, m1) = at(spec.refine + 1)?;
    let change = ((m1 - m0) / m0).abs();
    let pass = spec.trials > 0 && m0.is_finite() && m1.is_finite() && change <= REFINE_TOL;
    Ok(ProbeReport {
        probe: spec.name.clone(),
        params,
        trials: spec.trials,
        max_ratio: m0,
        witness_seed: ws,
        pass,
        notes: format!("J={}:{:.6e};J={}:{:.6e};change={:.4}", spec.gen.j + spec.refine, m0, spec.gen.j + spec.refine + 1, m1, change),
    })
}

fn random_f(spec: &ProbeSpec, seed: u64) -> Result<StepFunction> {
    gen_random_step(&spec.gen, seed)
}

fn random_nonneg(spec: &ProbeSpec, seed: u64) -> Result<StepFunction> {
    gen_random_step(&GenSpec { signed: false, ..spec.gen.clone() }, seed)
}

/// Random nonzero function (falls back to a denser draw when the first one is empty).
fn random_nonzero(spec: &ProbeSpec, seed: u64, nonneg: bool) -> Result<StepFunction> {
    let g = GenSpec { signed: spec.gen.signed && !nonneg, ..spec.gen.clone() };
    let f = gen_random_step(&g, seed)?;
    if !f.is_zero() {
        return Ok(f);
    }
    gen_random_step(&GenSpec { sparsity: 1.0, ..g }, seed)
}

fn refined(f: &StepFunction, extra: i32) -> Result<StepFunction> {
    f.refine_dyadic(f.level() + extra)
}

fn random_window_cube(rng: &mut ChaCha8Rng, n: usize, j_lo: i32, j_hi: i32, k: i32) -> DyadicCube {
    let level = rng.random_range(j_lo..=j_hi);
    let count = 1i64 << (k + level);
    DyadicCube::new(level, (0..n).map(|_| rng.random_range(0..count)).collect())
}

// ---------------------------------------------------------------------------
// exact probes

/// `||chi_Q||_{p_bar} = |Q|^sigma` for random cubes and exponent vectors.
fn indicator_norm(spec: &ProbeSpec) -> Result<ProbeReport> {
    let g = &spec.gen;
    run_exact(spec, grid_tag(g), |s| {
        let mut rng = aux_rng(s);
        let q = random_window_cube(&mut rng, g.n, -g.k, g.j, g.k);
        let f = StepFunction::indicator(g.n, g.j, g.k, &q)?;
        let ps: Vec<f64> =
            (0..g.n).map(|_| if rng.random::<f64>() < 0.1 { f64::INFINITY } else { rng.random_range(1.0..8.0) }).collect();
        let p = ExponentVector::new(ps)?;
        Ok(ratio_sym(mixed_norm(&f, &p)?, indicator_mixed_norm(q.level, &p)))
    })
}

/// `||f||_{t, r2} <= ||f||_{t, r1}` for `r1 <= r2`, including the Morrey endpoint.
fn embedding(spec: &ProbeSpec) -> Result<ProbeReport> {
    let (a, b, c) = (sp(&[2.0, 4.0], 4.0, 6.0), sp(&[2.0, 4.0], 4.0, 8.0), sp(&[2.0, 4.0], 4.0, f64::INFINITY));
    run_exact(spec, format!("{} r2=8;inf {}", fmt_p(&a), grid_tag(&spec.gen)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let base = bm_norm(&f, &a)?;
        Ok((bm_norm(&f, &b)? / base).max(morrey_norm(&f, &c)? / base))
    })
}

/// Per cube `||f chi_Q||_p <= l(Q)^{sum 1/p - sum 1/s} ||f chi_Q||_s` for `p <= s`, and the
/// resulting norm inequality.
fn exponent_monotone(spec: &ProbeSpec) -> Result<ProbeReport> {
    let (pp, ss) = (sp(&[2.0, 3.0], 6.0, 8.0), sp(&[3.0, 6.0], 6.0, 8.0));
    let g = &spec.gen;
    run_exact(spec, format!("{} s=3;6 {}", fmt_p(&pp), grid_tag(g)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let mut worst_r: f64 = bm_norm(&f, &pp)? / bm_norm(&f, &ss)?;
        let gap = pp.pbar.sum_recip() - ss.pbar.sum_recip();
        for j in -g.k..=g.j {
            let a = cube_norms(&f, j, None, pp.pbar.as_slice())?;
            let b = cube_norms(&f, j, None, ss.pbar.as_slice())?;
            let side_pow = pow2(-(j as f64) * gap);
            for (x, y) in a.iter().zip(&b) {
                if *x > 0.0 {
                    worst_r = worst_r.max(x / (side_pow * y));
                }
            }
        }
        Ok(worst_r)
    })
}

/// Mixed Hölder `||fg||_r <= ||f||_p ||g||_q` and equality for the Hölder dual.
fn holder(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = ExponentVector::new(vec![2.0, 4.0])?;
    let q = ExponentVector::new(vec![3.0, 3.0])?;
    let r = ExponentVector::new(vec![1.2, 12.0 / 7.0])?;
    let g = &spec.gen;
    run_exact(spec, format!("p=2;4 q=3;3 {}", grid_tag(g)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let h = random_nonzero(spec, s.wrapping_add(1 << 32), false)?;
        let ineq = mixed_norm(&f.mul(&h)?, &r)? / (mixed_norm(&f, &p)? * mixed_norm(&h, &q)?);
        let window = DyadicCube::new(-g.k, vec![0; g.n]);
        let d = holder_dual(&f, &window, &p)?;
        let eq = ratio_sym(pairing(&f, &d)?, mixed_norm(&f, &p)?);
        let unit = ratio_sym(mixed_norm(&d, &p.conjugate()?)?, 1.0);
        Ok(ineq.max(eq).max(unit))
    })
}

/// `||f(2^k .)|| = 2^{-kn/t} ||f||`.
fn dilation(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    let g = &spec.gen;
    run_exact(spec, format!("{} k=-1;1 {}", fmt_p(&p), grid_tag(g)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let base = bm_norm(&f, &p)?;
        let mut worst_r: f64 = 1.0;
        for k in [-1, 1] {
            if g.k - k < 0 {
                continue;
            }
            let d = bm_norm(&f.dilate_dyadic(k)?, &p)?;
            worst_r = worst_r.max(ratio_sym(d, pow2(-(k as f64) * g.n as f64 / p.t) * base));
        }
        Ok(worst_r)
    })
}

/// `||E_k f||_{p_bar} <= ||f||_{p_bar}` for every level, including one past the window.
fn ek_contraction(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = ExponentVector::new(vec![1.5, 3.0])?;
    let g = &spec.gen;
    run_exact(spec, format!("p=1.5;3 {}", grid_tag(g)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let base = mixed_norm(&f, &p)?;
        (-g.k - 1..=g.j).map(|k| Ok(mixed_norm(&cond_expect(&f, k)?, &p)? / base)).try_fold(0.0f64, |m, r: Result<f64>| Ok(m.max(r?)))
    })
}

/// `E_j E_k = E_{min(j,k)}` and `int E_k f = int f`.
fn tower(spec: &ProbeSpec) -> Result<ProbeReport> {
    let g = &spec.gen;
    run_exact(spec, grid_tag(g), |s| {
        let f = random_nonzero(spec, s, false)?;
        let scale = f.max_abs();
        let mut dev: f64 = 0.0;
        for j in -g.k..=g.j {
            let ej = cond_expect(&f, j)?;
            dev = dev.max((ej.integral() - f.integral()).abs() / (scale * pow2(g.k as f64 * g.n as f64)));
            for k in -g.k..=g.j {
                let lhs = cond_expect(&ej, k)?;
                let rhs = cond_expect(&f, j.min(k))?;
                let d = lhs.values().iter().zip(rhs.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                dev = dev.max(d / scale);
            }
        }
        Ok(1.0 + dev)
    })
}

/// `int E_J(f * g) = int f int g`, and `||E_J(f*g)||_1 = ||f||_1 ||g||_1` for nonnegative inputs.
fn conv_mass(spec: &ProbeSpec) -> Result<ProbeReport> {
    let one = ExponentVector::uniform(spec.gen.n, 1.0)?;
    run_exact(spec, grid_tag(&spec.gen), |s| {
        let f = random_nonzero(spec, s, false)?;
        let h = random_nonzero(spec, s.wrapping_add(1 << 32), false)?;
        let c = convolve_project(&f, &h)?;
        let scale = f.abs().integral() * h.abs().integral();
        let signed = 1.0 + (c.integral() - f.integral() * h.integral()).abs() / scale;
        let (fa, ha) = (f.abs(), h.abs());
        let l1 = ratio_sym(mixed_norm(&convolve_project(&fa, &ha)?, &one)?, mixed_norm(&fa, &one)? * mixed_norm(&ha, &one)?);
        Ok(signed.max(l1))
    })
}

/// The Hölder attainer pairs to `|Q|^{1/t-sigma} ||f chi_Q||` and has dual norm `|Q|^{1/t-sigma}`.
fn attainer(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[1.5, 3.0], 4.0, 8.0);
    let g = &spec.gen;
    let dual = p.pbar.conjugate()?;
    run_exact(spec, format!("{} {}", fmt_p(&p), grid_tag(g)), |s| {
        let mut rng = aux_rng(s);
        let q = random_window_cube(&mut rng, g.n, -g.k, g.j, g.k);
        let f = random_f(spec, s)?;
        let fq = f.restrict(&q)?;
        if fq.is_zero() {
            return Ok(1.0);
        }
        let a = crate::blocks::holder_attainer(&f, &q, &p)?;
        let c = pow2(-(q.level as f64) * g.n as f64 * p.cube_exponent());
        let r1 = ratio_sym(pairing(&fq, &a)?, c * mixed_norm(&fq, &p.pbar)?);
        let r2 = ratio_sym(mixed_norm(&a, &dual)?, c);
        Ok(r1.max(r2))
    })
}

fn duality_params() -> SpaceParams {
    sp(&[2.0, 3.0], 4.0, 8.0)
}

/// `h_norm_lower <= h_norm_upper`.
fn duality_sandwich(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = duality_params();
    run_exact(spec, format!("{} budget=8 {}", fmt_p(&p), grid_tag(&spec.gen)), |s| {
        let g = random_nonzero(spec, s, false)?;
        let (lo, _) = h_norm_lower(&g, &p, 8, s)?;
        let (up, _) = h_norm_upper(&g, &p)?;
        Ok(lo / up)
    })
}

/// `|int f g| <= h_norm_upper(g) ||f||`.
fn duality_chain(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = duality_params();
    run_exact(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let g = random_nonzero(spec, s.wrapping_add(1 << 32), false)?;
        let (up, _) = h_norm_upper(&g, &p)?;
        Ok(pairing(&f, &g)?.abs() / (up * bm_norm(&f, &p)?))
    })
}

/// A block has block-space norm at most one.
fn single_block(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = duality_params();
    let g = &spec.gen;
    run_exact(spec, format!("{} {}", fmt_p(&p), grid_tag(g)), |s| {
        let mut rng = aux_rng(s);
        let q = random_window_cube(&mut rng, g.n, -g.k, g.j, g.k);
        let f = random_nonzero(spec, s, false)?.restrict(&q)?;
        let (_, b) = block_split(&f, &q, &p)?;
        Ok(h_norm_upper(&b, &p)?.0)
    })
}

/// Revealing the cells of `f` one at a time never decreases the norm and ends at `||f||`.
fn fatou(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    run_exact(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let mut order: Vec<usize> = (0..f.len()).filter(|&l| f.values()[l] != 0.0).collect();
        let mut rng = aux_rng(s);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut cur = f.map(|_| 0.0);
        let mut prev = 0.0;
        let mut worst_r: f64 = 0.0;
        for &l in &order {
            cur.values_mut()[l] = f.values()[l];
            let v = bm_norm(&cur, &p)?;
            worst_r = worst_r.max(prev / v);
            prev = v;
        }
        // the last rung is f itself, bit for bit
        let end = if prev == bm_norm(&f, &p)? { 1.0 } else { f64::INFINITY };
        Ok(worst_r.max(end))
    })
}

/// `|g| <= |f|` implies `||g|| <= ||f||`.
fn lattice(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    run_exact(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s| {
        let f = random_nonzero(spec, s, false)?;
        let damp = random_nonneg(spec, s.wrapping_add(1 << 32))?;
        let g = f.mul(&damp)?;
        Ok(bm_norm(&g, &p)? / bm_norm(&f, &p)?)
    })
}

/// `||f - E_k f||` is finite for every window level and vanishes at `k = J`.
///
/// The sequence need not be monotone; the largest step-to-step growth is reported in
/// the notes (and as `max_ratio`) but not asserted.
fn martingale(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    let g = &spec.gen;
    let results: Vec<(u64, bool, f64)> = seeds(spec)
        .par_iter()
        .map(|&s| {
            let f = random_nonzero(spec, s, false)?;
            let vals: Vec<f64> =
                (-g.k..=g.j).map(|k| bm_norm(&f.sub(&cond_expect(&f, k)?)?, &p)).collect::<Result<_>>()?;
            let ok = vals.iter().all(|v| v.is_finite()) && *vals.last().unwrap() == 0.0;
            let growth = vals.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            Ok((s, ok, growth))
        })
        .collect::<Result<_>>()?;
    let failed = results.iter().find(|r| !r.1);
    let (ws, growth) = worst(&results.iter().map(|r| (r.0, r.2)).collect::<Vec<_>>());
    Ok(ProbeReport {
        probe: spec.name.clone(),
        params: format!("{} {}", fmt_p(&p), grid_tag(g)),
        trials: spec.trials,
        max_ratio: growth,
        witness_seed: failed.map_or(ws, |r| r.0),
        pass: spec.trials == 0 || failed.is_none(),
        notes: format!("zero_at_J={};max_step_growth={:.6}", failed.is_none(), growth),
    })
}

/// `(M chi_[0,1))^s` is A1 with a window-independent constant for `s < 1`, and its A1
/// ratio grows with the window for `s > 1`.
fn a1_weight(spec: &ProbeSpec) -> Result<ProbeReport> {
    let k = spec.gen.k;
    let ratio = |s: f64, kk: i32| -> Result<f64> {
        let w = AxisWeightProfile::maximal_indicator_power(0.0, 1.0, pow2(kk as f64), s)?;
        a1_ratio(&w, kk, -kk..=spec.gen.j + 3)
    };
    let small: Vec<f64> = [k, k + 2, k + 4].iter().map(|&kk| ratio(0.5, kk)).collect::<Result<_>>()?;
    let (big0, big2) = (ratio(2.0, k)?, ratio(2.0, k + 2)?);
    let growth = big2 / big0;
    let bounded = small.iter().all(|v| v.is_finite()) && small[2] <= small[1] * 1.5;
    Ok(ProbeReport {
        probe: spec.name.clone(),
        params: format!("s=0.5;2 K={k}"),
        trials: spec.trials,
        max_ratio: small.iter().fold(0.0, |m: f64, v| m.max(*v)),
        witness_seed: spec.seed,
        pass: bounded && growth >= 1.5,
        notes: format!("s=0.5:K={}:{:.4};K={}:{:.4};s=2_growth={:.3}", k, small[0], k + 4, small[2], growth),
    })
}

// ---------------------------------------------------------------------------
// empirical probes

fn translation(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    run_empirical(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let mut rng = aux_rng(s);
        let base_cells = 1usize << (spec.gen.j + spec.gen.k);
        let tau: Vec<usize> = (0..spec.gen.n).map(|_| 2 * rng.random_range(0..base_cells / 2) + 1).collect();
        let f = refined(&random_nonzero(spec, s, false)?, extra)?;
        // the same offset in space, counted in cells of the refined grid
        let tau: Vec<usize> = tau.iter().map(|t| t << extra).collect();
        Ok(ratio_sym(bm_norm(&f.translate(&tau)?, &p)?, bm_norm(&f, &p)?))
    })
}

fn doob(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = ExponentVector::new(vec![2.0, 3.0])?;
    run_empirical(spec, format!("p=2;3 {}", grid_tag(&spec.gen)), |s, extra| {
        let f = refined(&random_nonzero(spec, s, false)?, extra)?;
        Ok(mixed_norm(&doob_maximal(&f.abs())?, &p)? / mixed_norm(&f, &p)?)
    })
}

fn young(spec: &ProbeSpec) -> Result<ProbeReport> {
    let out = sp(&[2.0, 2.0], 3.0, 9.0);
    let fp = sp(&[4.0 / 3.0, 4.0 / 3.0], 1.5, 1.8);
    run_empirical(spec, format!("out:{} in:{} {}", fmt_p(&out), fmt_p(&fp), grid_tag(&spec.gen)), |s, extra| {
        let f = refined(&random_nonzero(spec, s, false)?, extra)?;
        let g = refined(&random_nonzero(spec, s.wrapping_add(1 << 32), false)?, extra)?;
        let c = convolve_project(&f, &g)?;
        Ok(bm_norm(&c, &out)? / (bm_norm(&f, &fp)? * bm_norm(&g, &fp)?))
    })
}

/// Refined input padded by one window level so the maximal function has room.
fn padded(spec: &ProbeSpec, s: u64, extra: i32, nonneg: bool) -> Result<StepFunction> {
    let f = random_nonzero(spec, s, nonneg)?;
    refined(&f, extra)?.extend_window(f.window() + 1)
}

fn hl_maximal(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    run_empirical(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = padded(spec, s, extra, false)?;
        let m = hl_maximal_lower(&f)?;
        Ok(bm_norm_bracket(&m, &p, f.level() + 2)?.upper / bm_norm(&f, &p)?)
    })
}

fn iterated_params() -> SpaceParams {
    // sigma - 1/t + 1/r = 5/24 < 1/3 = 1/max p
    sp(&[2.0, 3.0], 3.0, 8.0)
}

fn iterated_maximal(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = iterated_params();
    run_empirical(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = padded(spec, s, extra, false)?;
        Ok(bm_norm(&iterated_maximal_grid(&f)?, &p)? / bm_norm(&f, &p)?)
    })
}

fn weighted_iterated(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = iterated_params();
    let eta = 0.27;
    let g = &spec.gen;
    run_empirical(spec, format!("{} eta={eta} {}", fmt_p(&p), grid_tag(g)), |s, extra| {
        let mut rng = aux_rng(s);
        let q = random_window_cube(&mut rng, g.n, 0, g.j, g.k);
        let f = padded(spec, s, extra, false)?;
        let corner = q.lower_corner();
        let rect: Vec<(f64, f64)> = corner.iter().map(|&a| (a, a + q.side())).collect();
        let w = mit_chi_weight(&rect, eta, f.window(), Some(&p.pbar))?;
        let m = iterated_maximal_grid(&f)?;
        Ok(weighted_mixed_norm(&m, &p.pbar, &w)? / weighted_mixed_norm(&f, &p.pbar, &w)?)
    })
}

fn random_vector(spec: &ProbeSpec, s: u64, extra: i32, count: usize) -> Result<VectorStepFunction> {
    VectorStepFunction::new(
        (0..count).map(|i| padded(spec, s.wrapping_add((i as u64) << 40), extra, false)).collect::<Result<_>>()?,
    )
}

fn vector_maximal(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    let u = 2.0;
    run_empirical(spec, format!("{} u={u} N=3 {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let fv = random_vector(spec, s, extra, 3)?;
        let mv = fv.map(hl_maximal_lower)?;
        let j_cut = fv.components()[0].level() + 2;
        Ok(vector_bm_norm_bracket(&mv, &p, u, j_cut)?.upper / vector_bm_norm(&fv, &p, u)?)
    })
}

/// Cellwise `(sum_b (sum_a |f_ab|^{u1})^{u2/u1})^{1/u2}`.
fn double_combine(rows: &[VectorStepFunction], u1: f64, u2: f64) -> Result<StepFunction> {
    let inner: Vec<StepFunction> = rows.iter().map(|r| r.pointwise_norm(u1)).collect();
    Ok(VectorStepFunction::new(inner)?.pointwise_norm(u2))
}

fn double_vector_maximal(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    let (u1, u2) = (2.0, 3.0);
    run_empirical(spec, format!("{} u1={u1} u2={u2} N=2x2 {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let rows: Vec<VectorStepFunction> =
            (0..2u64).map(|b| random_vector(spec, s.wrapping_add(b << 48), extra, 2)).collect::<Result<_>>()?;
        let mrows: Vec<VectorStepFunction> = rows.iter().map(|r| r.map(hl_maximal_lower)).collect::<Result<_>>()?;
        let lhs = double_combine(&mrows, u1, u2)?;
        let rhs = double_combine(&rows, u1, u2)?;
        Ok(bm_norm_bracket(&lhs, &p, rhs.level() + 2)?.upper / bm_norm(&rhs, &p)?)
    })
}

fn vector_iterated(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = iterated_params();
    let u = 2.0;
    run_empirical(spec, format!("{} u={u} N=3 {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let fv = random_vector(spec, s, extra, 3)?;
        let mv = fv.map(iterated_maximal_grid)?;
        Ok(vector_bm_norm(&mv, &p, u)? / vector_bm_norm(&fv, &p, u)?)
    })
}

fn one_d_params() -> SpaceParams {
    sp(&[2.0], 3.0, 6.0)
}

fn hilbert_bm(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = one_d_params();
    run_empirical(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = padded(spec, s, extra, false)?;
        Ok(bm_norm(&singular_apply(&f, &SingularKernel::Hilbert1D)?, &p)? / bm_norm(&f, &p)?)
    })
}

fn riesz_bm(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = sp(&[2.0, 4.0], 4.0, 8.0);
    let eps = 0.75 * pow2(-spec.gen.j as f64);
    run_empirical(spec, format!("{} axis=0 eps={eps} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = padded(spec, s, extra, false)?;
        let r = singular_apply(&f, &SingularKernel::TruncatedRiesz { axis: 0, eps })?;
        Ok(bm_norm(&r, &p)? / bm_norm(&f, &p)?)
    })
}

fn block_probe(
    spec: &ProbeSpec,
    p: SpaceParams,
    tag: String,
    op: impl Fn(&StepFunction) -> Result<StepFunction> + Sync,
) -> Result<ProbeReport> {
    run_empirical(spec, format!("{} budget=8 {tag}{}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let g = padded(spec, s, extra, false)?;
        let (lower, _) = h_norm_lower(&op(&g)?, &p, 8, s)?;
        let (upper, _) = h_norm_upper(&g, &p)?;
        Ok(lower / upper)
    })
}

fn hilbert_block(spec: &ProbeSpec) -> Result<ProbeReport> {
    block_probe(spec, one_d_params(), String::new(), |g| singular_apply(g, &SingularKernel::Hilbert1D))
}

fn riesz_block(spec: &ProbeSpec) -> Result<ProbeReport> {
    let eps = 0.75 * pow2(-spec.gen.j as f64);
    let kernel = SingularKernel::TruncatedRiesz { axis: 0, eps };
    block_probe(spec, sp(&[2.0, 4.0], 4.0, 8.0), format!("axis=0 eps={eps} "), move |g| singular_apply(g, &kernel))
}

fn maximal_block(spec: &ProbeSpec) -> Result<ProbeReport> {
    block_probe(spec, one_d_params(), String::new(), iterated_maximal_grid)
}

fn frac_integral_probe(spec: &ProbeSpec) -> Result<ProbeReport> {
    // 1/t2 = 1/t1 - alpha/n with t1 = 3, alpha = 0.2, n = 1; the other exponents scale by t2/t1
    let alpha = 0.2;
    let src = sp(&[2.0], 3.0, 6.0);
    let dst = sp(&[5.0], 7.5, 15.0);
    run_empirical(spec, format!("in:{} out:{} alpha={alpha} {}", fmt_p(&src), fmt_p(&dst), grid_tag(&spec.gen)), |s, extra| {
        let f = padded(spec, s, extra, false)?;
        Ok(bm_norm(&frac_integral(&f, alpha)?, &dst)? / bm_norm(&f, &src)?)
    })
}

/// `I_alpha f <= C ||f||_Morrey^{t alpha/n} (M f)^{1 - t alpha/n}` cellwise, with the
/// lower maximal proxy (which can only inflate the ratio).
fn pointwise_potential(spec: &ProbeSpec) -> Result<ProbeReport> {
    let alpha = 0.2;
    let p = sp(&[2.0], 3.0, f64::INFINITY);
    let theta = p.t * alpha;
    run_empirical(spec, format!("{} alpha={alpha} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = refined(&random_nonzero(spec, s, true)?, extra)?;
        let i = frac_integral(&f, alpha)?;
        let m = hl_maximal_lower(&f)?;
        let mn = morrey_norm(&f, &p)?.powf(theta);
        Ok((0..f.len())
            .map(|c| {
                let mf = m.values()[3 * c + 1];
                if mf > 0.0 {
                    i.values()[c] / (mn * mf.powf(1.0 - theta))
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max))
    })
}

/// Two-sided comparison of the shifted-system norms with the standard one.
fn shifted_grid(spec: &ProbeSpec) -> Result<ProbeReport> {
    let p = one_d_params();
    run_empirical(spec, format!("{} {}", fmt_p(&p), grid_tag(&spec.gen)), |s, extra| {
        let f = refined(&random_nonzero(spec, s, false)?, extra)?;
        let base = bm_norm(&f, &p)?;
        let mut worst_r: f64 = 1.0;
        for a in all_shifts(f.dim()).iter().skip(1) {
            let b = shifted_bm_norm_bracket(&f, &p, a, f.level() + 2)?;
            worst_r = worst_r.max(b.upper / base).max(base / b.lower);
        }
        Ok(worst_r)
    })
}

/// Cubes of the window, coarse to fine (used by the acceptance tests).
pub fn window_cubes(n: usize, j: i32, k: i32) -> Vec<DyadicCube> {
    (-k..=j).flat_map(|l| cubes_in_window(l, k, n, None)).collect()
}
