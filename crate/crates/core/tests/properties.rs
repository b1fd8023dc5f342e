use proptest::prelude::*;

use mixnorm::blocks::{holder_dual, pairing};
use mixnorm::grid::text::{from_text, to_text};
use mixnorm::grid::{all_shifts, cubes_in_window, DyadicCube, ExponentVector, SpaceParams, StepFunction};
use mixnorm::norms::{bm_norm, bm_norm_bracket, mixed_norm, partial_norms};
use mixnorm::operators::{cond_expect, convolve_project, doob_maximal, frac_integral, iterated_maximal_grid};

// ---------------------------------------------------------------------------
// brute-force oracles, deliberately naive

/// Restriction of `f` to the level-`j` cube with index `m` (cells of `f`, axis 0 fastest).
fn sub_block(f: &StepFunction, j: i32, m: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let n = f.dim();
    let per = f.cells_per_axis();
    let w = 1usize << (f.level() - j);
    let mut out = Vec::with_capacity(w.pow(n as u32));
    let mut idx = vec![0usize; n];
    for lin in 0..w.pow(n as u32) {
        let mut rest = lin;
        for a in 0..n {
            idx[a] = m[a] * w + rest % w;
            rest /= w;
        }
        let flat = idx.iter().rev().fold(0usize, |acc, &i| acc * per + i);
        out.push(f.values()[flat]);
    }
    (out, vec![w; n])
}

/// Mixed norm of `f chi_Q` for the level-`j` cube `m`; every axis reduction carries the cell width.
fn naive_cube_norm(f: &StepFunction, j: i32, m: &[usize], pbar: &[f64]) -> f64 {
    let (vals, dims) = sub_block(f, j, m);
    let h = f.cell_width();
    let mut cur = vals;
    let mut d = dims.clone();
    for &p in pbar {
        let len = d.remove(0);
        cur = cur
            .chunks(len)
            .map(|row| {
                if p.is_infinite() {
                    row.iter().fold(0.0f64, |mx, v| mx.max(v.abs()))
                } else {
                    (h * row.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
                }
            })
            .collect();
    }
    cur[0]
}

/// `||f||_{M}` by direct summation, level by level, until both tails are negligible.
fn naive_bm(f: &StepFunction, pbar: &[f64], t: f64, r: f64) -> f64 {
    let n = f.dim();
    let nf = n as f64;
    let sigma = pbar.iter().map(|p| 1.0 / p).sum::<f64>() / nf;
    let (jj, kk) = (f.level(), f.window());
    let full = naive_cube_norm(f, -kk, &vec![0; n], pbar);
    let mut terms: Vec<f64> = Vec::new();
    for j in -kk..=jj {
        let count = 1usize << (kk + j);
        for lin in 0..count.pow(n as u32) {
            let m: Vec<usize> = (0..n).map(|a| (lin / count.pow(a as u32)) % count).collect();
            let vol = (2f64).powf(-(j as f64) * nf);
            terms.push(vol.powf(1.0 / t - sigma) * naive_cube_norm(f, j, &m, pbar));
        }
    }
    let cells_max = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if r.is_infinite() {
        let fine = cells_max * (2f64).powf(-((jj + 1) as f64) * nf / t);
        let coarse = (2f64).powf((kk + 1) as f64 * nf * (1.0 / t - sigma)) * full;
        return terms.into_iter().chain([fine, coarse]).fold(0.0, f64::max);
    }
    let mut total: f64 = terms.iter().map(|x| x.powf(r)).sum();
    let cell_r: f64 = f.values().iter().map(|v| v.abs().powf(r)).sum();
    // both tails are geometric; keep adding levels until the terms stop registering
    for j in jj + 1.. {
        // 2^{(j-J)n} subcubes per cell, each weighted 2^{-jnr/t}
        let term = cell_r * (2f64).powf((j - jj) as f64 * nf * (1.0 - r / t) - jj as f64 * nf * r / t);
        total += term;
        if term <= 1e-19 * total {
            break;
        }
    }
    for j in (i32::MIN..-kk).rev() {
        let term = (2f64).powf(-(j as f64) * nf * r * (1.0 / t - sigma)) * full.powf(r);
        total += term;
        if term <= 1e-19 * total {
            break;
        }
    }
    total.powf(1.0 / r)
}

// ---------------------------------------------------------------------------
// strategies

fn step_fn(n: usize, j: i32, k: i32) -> impl Strategy<Value = StepFunction> {
    let cells = 1usize << ((j + k) as usize * n);
    prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], cells)
        .prop_map(move |v| StepFunction::new(n, j, k, 0, v).unwrap())
}

fn any_step() -> impl Strategy<Value = StepFunction> {
    (1usize..=2, 0i32..=2, 0i32..=1).prop_flat_map(|(n, j, k)| step_fn(n, j, k))
}

fn nonzero_step() -> impl Strategy<Value = StepFunction> {
    any_step().prop_filter("nonzero", |f| !f.is_zero())
}

fn exponents(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1.0f64..8.0, Just(f64::INFINITY), Just(2.0)], n)
        .prop_filter("some finite exponent", |v| v.iter().any(|p| p.is_finite()))
}

/// `(f, p, t, r)` inside the nontrivial regime; `r = inf` about a fifth of the time.
fn space_and_fn() -> impl Strategy<Value = (StepFunction, Vec<f64>, f64, f64)> {
    nonzero_step().prop_flat_map(|f| {
        let n = f.dim();
        (Just(f), exponents(n), 0.05f64..3.0, 0.05f64..6.0, 0u8..5).prop_map(move |(f, p, dt, dr, coin)| {
            let threshold = n as f64 / p.iter().map(|x| 1.0 / x).sum::<f64>();
            let t = threshold + dt;
            let r = if coin == 0 { f64::INFINITY } else { t + dr };
            (f, p, t, r)
        })
    })
}

fn params(p: &[f64], t: f64, r: f64) -> SpaceParams {
    SpaceParams::new(ExponentVector::new(p.to_vec()).unwrap(), t, r).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn bm_norm_matches_level_by_level_sum((f, p, t, r) in space_and_fn()) {
        let got = bm_norm(&f, &params(&p, t, r)).unwrap();
        let want = naive_bm(&f, &p, t, r);
        prop_assert!(rel(got, want) < 1e-10, "got {got}, oracle {want}");
    }

    #[test]
    fn bracket_contains_norm((f, p, t, r) in space_and_fn(), extra in 0i32..3) {
        prop_assume!(r.is_finite());
        let sp = params(&p, t, r);
        let v = bm_norm(&f, &sp).unwrap();
        let b = bm_norm_bracket(&f, &sp, f.level() - 1 + extra).unwrap();
        prop_assert!(b.contains(v, 1e-12), "{:?} vs {v}", b);
    }

    #[test]
    fn text_round_trip_is_byte_identical(f in any_step(), approx in any::<bool>()) {
        let mut f = f;
        f.approximate = approx;
        let s = to_text(&f);
        let back = from_text(&s).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(to_text(&back), s);
    }

    #[test]
    fn restrict_is_idempotent(f in any_step(), level_off in 0i32..3, seed in any::<u64>()) {
        let level = (-f.window() + level_off).min(f.level());
        let count = 1i64 << (f.window() + level);
        let m: Vec<i64> = (0..f.dim()).map(|a| ((seed >> (8 * a)) as i64).rem_euclid(count)).collect();
        let q = DyadicCube::new(level, m);
        let once = f.restrict(&q).unwrap();
        prop_assert_eq!(once.restrict(&q).unwrap(), once);
    }

    #[test]
    fn dilation_round_trip(f in any_step(), k in -2i32..=1) {
        prop_assume!(f.window() - k >= 0 && f.window() + f.level() >= 0);
        let back = f.dilate_dyadic(k).unwrap().dilate_dyadic(-k).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn partial_norms_end_at_the_full_norm(f in any_step(), seed in 0usize..64) {
        let opts = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
        let p: Vec<f64> = (0..f.dim()).map(|a| opts[(seed >> (3 * a)) % opts.len()]).collect();
        let pv = ExponentVector::new(p).unwrap();
        let stages = partial_norms(&f, &pv).unwrap();
        let full = mixed_norm(&f, &pv).unwrap();
        prop_assert!(rel(stages[f.dim() - 1][0], full) < 1e-12);
    }

    #[test]
    fn conditional_expectation_contracts(f in any_step(), seed in 0usize..64) {
        let opts = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
        let p: Vec<f64> = (0..f.dim()).map(|a| opts[(seed >> (3 * a)) % opts.len()]).collect();
        let pv = ExponentVector::new(p).unwrap();
        let base = mixed_norm(&f, &pv).unwrap();
        for k in -f.window() - 1..=f.level() {
            let e = mixed_norm(&cond_expect(&f, k).unwrap(), &pv).unwrap();
            prop_assert!(e <= base * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn doob_dominates_every_average(f in any_step()) {
        let m = doob_maximal(&f).unwrap();
        for k in -f.window()..=f.level() {
            let e = cond_expect(&f, k).unwrap();
            for (a, b) in m.values().iter().zip(e.values()) {
                prop_assert!(a >= b, "level {k}: {a} < {b}");
            }
        }
    }

    #[test]
    fn convolution_preserves_mass((f, g) in (1usize..=2, 0i32..=2, 0i32..=1).prop_flat_map(|(n, j, k)| (step_fn(n, j, k), step_fn(n, j, k)))) {
        let c = convolve_project(&f, &g).unwrap();
        let scale = f.abs().integral() * g.abs().integral();
        prop_assert!((c.integral() - f.integral() * g.integral()).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn holder_dual_attains_the_norm(f in nonzero_step(), a in 1.2f64..6.0, b in 1.2f64..6.0) {
        let p: Vec<f64> = [a, b][..f.dim()].to_vec();
        let pv = ExponentVector::new(p).unwrap();
        let window = DyadicCube::new(-f.window(), vec![0; f.dim()]);
        let d = holder_dual(&f, &window, &pv).unwrap();
        prop_assert!(rel(pairing(&f, &d).unwrap(), mixed_norm(&f, &pv).unwrap()) < 1e-10);
        prop_assert!(rel(mixed_norm(&d, &pv.conjugate().unwrap()).unwrap(), 1.0) < 1e-10);
    }

    #[test]
    fn martingale_error_vanishes_at_the_finest_level((f, p, t, r) in space_and_fn()) {
        let sp = params(&p, t, r);
        let top = bm_norm(&f.sub(&cond_expect(&f, f.level()).unwrap()).unwrap(), &sp).unwrap();
        prop_assert_eq!(top, 0.0);
        for k in -f.window()..f.level() {
            prop_assert!(bm_norm(&f.sub(&cond_expect(&f, k).unwrap()).unwrap(), &sp).unwrap().is_finite());
        }
    }

    #[test]
    fn window_cubes_tile_the_window(n in 1usize..=2, k in 0i32..=2, off in 0i32..=3, shift_seed in 0usize..9) {
        let j = -k + off - 1;
        let shifts = all_shifts(n);
        let shift = &shifts[shift_seed % shifts.len()];
        let cubes = cubes_in_window(j, k, n, Some(shift));
        let w = (2f64).powi(k);
        let clip = |c: &DyadicCube| -> Vec<(f64, f64)> {
            c.lower_corner().iter().map(|&lo| (lo.max(0.0), (lo + c.side()).min(w))).collect()
        };
        let covered: f64 = cubes.iter().map(|c| clip(c).iter().map(|(a, b)| (b - a).max(0.0)).product::<f64>()).sum();
        prop_assert!((covered - w.powi(n as i32)).abs() < 1e-9, "covered {covered}");
        for (i, a) in cubes.iter().enumerate() {
            prop_assert!(clip(a).iter().all(|(lo, hi)| hi > lo), "cube {:?} misses the window", a);
            for b in &cubes[i + 1..] {
                let overlap: f64 = clip(a).iter().zip(clip(b)).map(|((a0, a1), (b0, b1))| (a1.min(b1) - a0.max(b0)).max(0.0)).product();
                prop_assert!(overlap < 1e-12);
            }
        }
    }
}

#[test]
fn every_window_cube_sits_in_a_shifted_cube_at_most_six_to_the_n_larger() {
    for n in 1..=2usize {
        let (jmax, k) = (2, 1);
        for j in -k..=jmax {
            for q in cubes_in_window(j, k, n, None) {
                let found = all_shifts(n).iter().any(|a| {
                    (j - 2..=j).any(|l| {
                        let side_ratio = 1i64 << (j - l);
                        let base: Vec<i64> = q.m.iter().map(|&m| m.div_euclid(side_ratio)).collect();
                        (0..3usize.pow(n as u32)).any(|code| {
                            let m: Vec<i64> = (0..n).map(|ax| base[ax] - 1 + ((code / 3usize.pow(ax as u32)) % 3) as i64).collect();
                            let r = DyadicCube::shifted(l, m, a.clone()).unwrap();
                            r.contains(&q) && r.volume() <= 6f64.powi(n as i32) * q.volume()
                        })
                    })
                });
                assert!(found, "no shifted cover for {q:?}");
            }
        }
    }
}

#[test]
fn shifted_containment_is_exact_at_thirds() {
    // [1/3, 4/3) contains [1/2, 1) but not [0, 1/2)
    let r = DyadicCube::shifted(0, vec![0], vec![1]).unwrap();
    assert!(r.contains(&DyadicCube::new(1, vec![1])));
    assert!(!r.contains(&DyadicCube::new(1, vec![0])));
    assert!(r.contains(&DyadicCube::new(2, vec![4])));
    assert!(!r.contains(&DyadicCube::new(2, vec![1])));
}

/// Graded midpoint rule for `int_a^b |x - y|^{alpha - 1} dy`: dyadic shells around `x`
/// down to distance `1e-24`, 2000 midpoints per shell.
fn graded_riesz(x: f64, a: f64, b: f64, alpha: f64) -> f64 {
    let side = |lo: f64, hi: f64| -> f64 {
        // integral of u^{alpha-1} over distances [lo, hi]
        if hi <= lo {
            return 0.0;
        }
        let mut total = 0.0;
        let mut outer = hi;
        while outer > lo && outer > 1e-24 {
            let inner = (outer / 2.0).max(lo);
            let steps = 2000;
            let h = (outer - inner) / steps as f64;
            total += (0..steps).map(|i| (inner + (i as f64 + 0.5) * h).powf(alpha - 1.0)).sum::<f64>() * h;
            outer = inner;
        }
        total
    };
    if x <= a {
        side(a - x, b - x)
    } else if x >= b {
        side(x - b, x - a)
    } else {
        side(0.0, x - a) + side(0.0, b - x)
    }
}

#[test]
fn one_d_fractional_integral_matches_graded_quadrature() {
    let alpha = 0.5;
    let vals: Vec<f64> = (0..128).map(|i| match i % 37 { 0 => 1.0, 5 => -0.5, 11 => 0.25, _ => 0.0 }).collect();
    let f = StepFunction::new(1, 5, 2, 0, vals).unwrap();
    let g = frac_integral(&f, alpha).unwrap();
    let h = f.cell_width();
    let mut worst: f64 = 0.0;
    for c in 0..100 {
        let x = (c as f64 + 0.5) * h;
        let pieces: Vec<(f64, f64)> = f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (*v, graded_riesz(x, i as f64 * h, (i + 1) as f64 * h, alpha)))
            .collect();
        let want: f64 = pieces.iter().map(|(v, w)| v * w).sum();
        let scale: f64 = pieces.iter().map(|(v, w)| v.abs() * w).sum();
        worst = worst.max((g.values()[c] - want).abs() / scale);
    }
    assert!(worst < 1e-6, "worst relative error {worst}");
}

#[test]
fn iterated_maximal_dominates_rectangle_averages() {
    let vals: Vec<f64> = (0..64).map(|i| (((i * 37 + 11) % 17) as f64 - 8.0) / 8.0).collect();
    let f = StepFunction::new(2, 2, 1, 0, vals).unwrap();
    let m = iterated_maximal_grid(&f).unwrap();
    let abs = f.abs();
    let n = 8usize;
    let at = |x: usize, y: usize| abs.values()[x + n * y];
    for x0 in 0..n {
        for x1 in x0 + 1..=n {
            for y0 in 0..n {
                for y1 in y0 + 1..=n {
                    let mut s = 0.0;
                    for x in x0..x1 {
                        for y in y0..y1 {
                            s += at(x, y);
                        }
                    }
                    let avg = s / ((x1 - x0) * (y1 - y0)) as f64;
                    for x in x0..x1 {
                        for y in y0..y1 {
                            assert!(m.values()[x + n * y] >= avg * (1.0 - 1e-12), "cell ({x},{y})");
                        }
                    }
                }
            }
        }
    }
}

/// The error `||f - E_k f||` is not monotone in `k`: subtracting a local average can
/// sharpen a peak, and fine cubes dominate when `r` is large.
#[test]
fn martingale_error_can_grow_between_levels() {
    let sp = params(&[2.0], 3.0, 6.0);
    let f = StepFunction::new(1, 2, 1, 0, vec![0.0, 0.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0]).unwrap();
    let e = |k: i32| f.sub(&cond_expect(&f, k).unwrap()).unwrap();
    let (coarse, fine) = (e(-1), e(0));
    let lib = bm_norm(&fine, &sp).unwrap() / bm_norm(&coarse, &sp).unwrap();
    let oracle = naive_bm(&fine, &[2.0], 3.0, 6.0) / naive_bm(&coarse, &[2.0], 3.0, 6.0);
    assert!(rel(lib, oracle) < 1e-12);
    assert!(oracle > 1.04, "growth {oracle}");
}
