//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that the lines always reach the
//! terminal. A line marked `expected` records a target that the closed form
//! contradicts; it is printed but does not change the exit status.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use wavedense::boxcalc::{raster_contains, BoxSet, Cuboid};
use wavedense::frames::{construct_frame_with, FrameOptions};
use wavedense::freqfn::{l2_distance, Dilation, FreqFn, GridFn, StepFn};
use wavedense::grammian::{
    centered_index_set, convergence_table, dyadic_sequence, grammian_p, indicator_grammian_counts, lem4_check,
    norm_gram_exact, normalize_u, unit_grammian_sq_exact,
};
use wavedense::orthosys::{construct_ortho_generator, nondensity_fixed_dilation_demo, nondensity_fixed_lattice_demo};
use wavedense::rational::{frac, int, pow, pow2, to_f64};
use wavedense::waveletset::{build_wavelet_set, construct_riesz_generator, riesz_bound_estimate, verify_bundle, verify_congruence, verify_size_bounds, verify_dilation_tiling};
use wavedense::Rat;

// criterion 1
const MEMBERSHIP_QUERIES: usize = 100_000;
const BOX_ALGEBRA_BUDGET: Duration = Duration::from_secs(30);
// criterion 2
const WS_INNER: i64 = 1;
const WS_OUTER: i64 = 4;
const WS_DEPTH: usize = 20;
const WS_MAX_SHIFT: i32 = 3;
// criterion 3
const RANDOM_CASES: usize = 100;
// criterion 4
const K_MAX: u32 = 8;
const FINAL_ERROR_1D: f64 = 0.01;
const FINAL_ERROR_2D: f64 = 0.05;
const ORACLE_TOL: f64 = 1e-12;
// criterion 5
const FRAME_EPS: f64 = 0.1;
const QUADRATURE_TOL: f64 = 1e-6;
const BEURLING_LIMIT: f64 = 0.25;
const FRAME_TESTS: usize = 20;
// criterion 6
const RIESZ_EPS: f64 = 0.5;
const RIESZ_SECTION: usize = 21;
const RIESZ_FLOOR_FACTOR: f64 = 0.9;
// criterion 7
const ORTHO_EPS: f64 = 0.2;
const GRAM_TOL: f64 = 1e-6;
const TRANSLATES: usize = 11;
const OVERLAP_TOL: f64 = 1e-9;
const SCALE_SPAN: i32 = 3;
// criterion 8
const DILATION_DEMO_TOL: f64 = 1e-9;
const LATTICE_DEMO_TOL: f64 = 1e-6;
const LATTICE_DEMO_TARGET: f64 = 0.655;
// every criterion
const CRITERION_BUDGET: Duration = Duration::from_secs(300);

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    expected_failure: bool,
    detail: String,
}

type Outcome = Result<Vec<Line>, String>;

fn line(id: &'static str, title: &'static str, pass: bool, detail: String) -> Line {
    Line { id, title, pass, expected_failure: false, detail }
}

/// Unit-norm Gaussian `e^{-ω²/2}` on 4096 cells of `[-8, 8)`.
fn gaussian() -> FreqFn {
    let dom = Cuboid::interval(int(-8), int(8)).unwrap();
    let g = GridFn::sample(dom, vec![4096], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
    let g = FreqFn::Grid(g);
    g.scale(1.0 / g.l2_norm())
}

fn random_rat(rng: &mut ChaCha8Rng, span: i64, dens: &[i64]) -> Rat {
    let q = dens[rng.gen_range(0..dens.len())];
    frac(rng.gen_range(-span * q..=span * q), q)
}

fn random_set(rng: &mut ChaCha8Rng) -> (Vec<Cuboid>, BoxSet) {
    let n = rng.gen_range(1..5);
    let mut raw = Vec::new();
    while raw.len() < n {
        let (a, b, c, d) = (
            random_rat(rng, 3, &[1, 2, 3, 4]),
            random_rat(rng, 3, &[1, 2, 3, 4]),
            random_rat(rng, 3, &[1, 2, 3, 4]),
            random_rat(rng, 3, &[1, 2, 3, 4]),
        );
        let lo = vec![a.clone().min(b.clone()), c.clone().min(d.clone())];
        let hi = vec![a.max(b), c.max(d)];
        if let Some(x) = Cuboid::nonempty(lo, hi) {
            raw.push(x);
        }
    }
    let set = BoxSet::normalize(2, raw.clone()).unwrap();
    (raw, set)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut disagreements = 0usize;
    let mut measure_failures = 0usize;
    let mut queries = 0usize;
    while queries < MEMBERSHIP_QUERIES {
        let (ra, a) = random_set(&mut rng);
        let (rb, b) = random_set(&mut rng);
        let (rc, c) = random_set(&mut rng);
        let e = a.union(&b).unwrap().subtract(&c).unwrap().intersect(&a.union(&c).unwrap()).unwrap();
        let sym = a.subtract(&b).unwrap().union(&b.subtract(&a).unwrap()).unwrap();
        let i = a.intersect(&b).unwrap();
        let u = a.union(&b).unwrap();
        if u.measure() != a.measure() + b.measure() - i.measure() || sym.measure() + i.measure() * int(2) != a.measure() + b.measure() {
            measure_failures += 1;
        }
        for _ in 0..1000 {
            let p = vec![random_rat(&mut rng, 4, &[1, 2, 3, 5, 7, 8, 12]), random_rat(&mut rng, 4, &[1, 2, 3, 5, 7, 8, 12])];
            let inside = |raw: &[Cuboid]| raw.iter().any(|x| x.contains(&p));
            let (x, y, z) = (inside(&ra), inside(&rb), inside(&rc));
            if raster_contains(&e, &p) != ((x || y) && !z && (x || z)) || raster_contains(&sym, &p) != (x != y) {
                disagreements += 1;
            }
            queries += 1;
        }
    }
    let t = start.elapsed();
    Ok(vec![line(
        "1",
        "box algebra agrees with raster membership",
        disagreements == 0 && measure_failures == 0 && t < BOX_ALGEBRA_BUDGET,
        format!("{queries} queries, {disagreements} disagreements, {measure_failures} measure failures, {:.2}s", t.as_secs_f64()),
    )])
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for d in [1usize, 2] {
        let (r, big_r) = (int(WS_INNER), int(WS_OUTER));
        let b = build_wavelet_set(&r, &big_r, WS_DEPTH, d).map_err(|e| e.to_string())?;
        let t = pow(&(&r / &big_r), d as u32);
        let slack = pow(&t, WS_DEPTH as u32) / (Rat::one() - &t);
        let rd = pow(&r, d as u32);
        let limit = &rd * &rd / (pow(&big_r, d as u32) - &rd);
        let sum: Rat = b.levels[1..].iter().flatten().map(Cuboid::measure).sum();
        let gap = &limit - &sum;
        let measure_ok = gap >= Rat::zero() && gap <= slack && limit < rd;
        let size_ok = verify_size_bounds(&b.levels, &r, &big_r).pass;
        let cong = verify_congruence(&b.u, &b.congruence_side).map_err(|e| e.to_string())?;
        let cong_ok = cong.max_multiplicity <= 1 && cong.exception_measure <= &b.tail * int(2);
        let tiling = verify_dilation_tiling(&b.u, &b.dilation, &b.congruence_side, WS_MAX_SHIFT as u32).map_err(|e| e.to_string())?;
        let shifts: Vec<i32> = tiling.overlap_values.iter().map(|(j, _)| *j).collect();
        let tiling_ok = tiling.max_overlap() <= b.tail
            && (1..=WS_MAX_SHIFT).all(|j| shifts.contains(&j) && shifts.contains(&-j));
        let bundle_ok = verify_bundle(&b).map_err(|e| e.to_string())?.all_pass();
        ok &= measure_ok && size_ok && cong_ok && tiling_ok && bundle_ok;
        notes.push(format!(
            "d={d}: gap {:.2e} ≤ {:.2e}, multiplicity ≤ {}, exception {:.2e}, overlap {:.2e}",
            to_f64(&gap),
            to_f64(&slack),
            cong.max_multiplicity,
            to_f64(&cong.exception_measure),
            to_f64(&tiling.max_overlap())
        ));
    }
    Ok(vec![line("2", "wavelet set geometry is exact", ok, notes.join("; "))])
}

fn random_step(rng: &mut ChaCha8Rng, d: usize) -> StepFn {
    let side: usize = if d == 1 { 24 } else { 6 };
    let cells = side.pow(d as u32);
    let mut pieces = Vec::new();
    for k in 0..cells {
        if rng.gen_bool(0.6) {
            continue;
        }
        let idx: Vec<i64> = (0..d).map(|a| ((k / side.pow(a as u32)) % side) as i64).collect();
        let w = if d == 1 { frac(1, 4) } else { frac(1, 2) };
        let lo: Vec<Rat> = idx.iter().map(|&i| &w * int(i - side as i64 / 2)).collect();
        let hi: Vec<Rat> = lo.iter().map(|x| x + &w).collect();
        let v = Complex64::new(rng.gen_range(-8i32..8) as f64 / 4.0, rng.gen_range(-8i32..8) as f64 / 8.0);
        pieces.push((Cuboid::new(lo, hi).unwrap(), v));
    }
    StepFn::new(d, pieces).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = |e: wavedense::Error| e.to_string();

    let mut norm_fail = 0;
    for k in 0..RANDOM_CASES {
        let d = 1 + k % 2;
        let g = random_step(&mut rng, d);
        let b: Vec<Rat> = (0..d).map(|_| pow2(rng.gen_range(-3..4))).collect();
        let (lhs, rhs) = norm_gram_exact(&g, &b).map_err(e)?;
        norm_fail += usize::from(lhs != rhs);
    }

    let mut count_fail = 0;
    for _ in 0..RANDOM_CASES {
        let lo = random_rat(&mut rng, 5, &[1, 2, 3, 7, 10]);
        let hi = &lo + frac(rng.gen_range(1..60), rng.gen_range(1..12));
        let b = frac(1, rng.gen_range(1..9));
        let c = indicator_grammian_counts(&Cuboid::interval(lo.clone(), hi.clone()).unwrap(), std::slice::from_ref(&b)).map_err(e)?;
        let (ni, no) = brute_counts(&lo, &hi, &b);
        let rest = (&hi - &lo) - &b * Rat::from_integer(c.n_i.clone());
        let ok = c.n_i == ni && c.n_o == no && rest >= Rat::zero() && rest <= &b * Rat::from_integer(c.n_o.clone());
        count_fail += usize::from(!ok);
    }

    let mut dominance_fail = 0;
    for k in 0..RANDOM_CASES {
        let d = 1 + k % 2;
        let g = FreqFn::Step(random_step(&mut rng, d));
        let h = FreqFn::Step(random_step(&mut rng, d));
        let b = vec![pow2(rng.gen_range(-2..3)); d];
        let (lhs, rhs) = lem4_check(&g, &h, &b).map_err(e)?;
        dominance_fail += usize::from(rhs > lhs * (1.0 + 1e-12));
    }

    let mut inexact = 0;
    let mut cells = 0;
    let mut support_fail = 0;
    let mut worst_float = 0.0f64;
    for k in 0..RANDOM_CASES {
        let d = 1 + k % 2;
        let g = random_step(&mut rng, d);
        if g.pieces().is_empty() {
            continue;
        }
        let b = vec![pow2(rng.gen_range(-2..3)); d];
        let sums = unit_grammian_sq_exact(&g, &b).map_err(e)?;
        cells += sums.len();
        inexact += sums.iter().filter(|s| **s != Rat::one()).count();
        let g = FreqFn::Step(g);
        let u = normalize_u(&g, &b).map_err(e)?;
        let ub = grammian_p(&u, &b, 2.0).map_err(e)?;
        let gb = grammian_p(&g, &b, 2.0).map_err(e)?;
        worst_float = worst_float.max(ub.sup_deviation_on_support(1.0));
        support_fail += usize::from(ub.support_measure() != gb.support_measure());
    }
    let unit_ok = inexact == 0 && cells > 0 && support_fail == 0;

    Ok(vec![
        line("3a", "norm identity exact on random step functions", norm_fail == 0, format!("{norm_fail}/{RANDOM_CASES} mismatches")),
        line("3b", "shift counts bracket the measure exactly", count_fail == 0, format!("{count_fail}/{RANDOM_CASES} mismatches")),
        line("3c", "Grammian difference dominated by distance", dominance_fail == 0, format!("{dominance_fail}/{RANDOM_CASES} violations")),
        line(
            "3d",
            "normalized generator has unit Grammian on its support",
            unit_ok,
            format!("{inexact} of {cells} cells differ from 1 exactly, float evaluation within {worst_float:.1e}, {support_fail} support changes"),
        ),
    ])
}

fn brute_counts(lo: &Rat, hi: &Rat, b: &Rat) -> (BigInt, BigInt) {
    let mut s: BigInt = (lo / b).floor().to_integer() - 1;
    let last: BigInt = (hi / b).ceil().to_integer() + 1;
    let (mut inner, mut edge) = (BigInt::zero(), BigInt::zero());
    while s <= last {
        let a = b * Rat::from_integer(s.clone());
        let c = &a + b;
        if *lo <= a && c <= *hi {
            inner += 1;
        } else if a < *hi && *lo < c {
            edge += 1;
        }
        s += 1;
    }
    (inner, edge)
}

/// Per axis, `#{s : b(ω+s) ∈ [0, L)}` is `n + 1` on `[0, θ)` and `n` on
/// `[θ, 1)` with `n + θ = L/b`.
fn axis_counts(len: &Rat, b: &Rat) -> [(f64, f64); 2] {
    let q = len / b;
    let n = q.floor();
    let theta = to_f64(&(&q - &n));
    let n = to_f64(&n);
    [(theta, n + 1.0), (1.0 - theta, n)]
}

/// `‖f_{b,p} − ‖f‖_p‖_{L^p(Q)}` for the indicator of `[0, L)^d`.
fn indicator_error(len: &Rat, b: &Rat, d: usize, p: f64) -> f64 {
    let axis = axis_counts(len, b);
    let det = to_f64(b).powi(d as i32);
    let target = to_f64(len).powi(d as i32).powf(1.0 / p);
    let mut total = 0.0;
    let regions: Vec<(f64, f64)> = if d == 1 {
        axis.to_vec()
    } else {
        axis.iter().flat_map(|&(w1, c1)| axis.iter().map(move |&(w2, c2)| (w1 * w2, c1 * c2))).collect()
    };
    for (w, c) in regions {
        total += w * ((det * c).powf(1.0 / p) - target).abs().powf(p);
    }
    total.powf(1.0 / p)
}

fn criterion_4() -> Outcome {
    let len = frac(13, 10);
    let mut lines = Vec::new();
    for d in [1usize, 2] {
        let bx = if d == 1 { Cuboid::interval(int(0), len.clone()) } else { Cuboid::cube(int(0), len.clone(), 2) }.unwrap();
        let f = FreqFn::Step(StepFn::indicator(&BoxSet::from_box(bx), Complex64::new(1.0, 0.0)));
        let bs = dyadic_sequence(K_MAX, d);
        let mut ok = true;
        let mut finals = Vec::new();
        for p in [1.0, 2.0] {
            let rows = convergence_table(&f, p, &bs).map_err(|e| e.to_string())?;
            let errs: Vec<f64> = rows.iter().map(|r| r.lp_error).collect();
            let oracle: Vec<f64> = bs.iter().map(|b| indicator_error(&len, &b[0], d, p)).collect();
            let matches = errs.iter().zip(&oracle).all(|(e, o)| (e - o).abs() <= ORACLE_TOL);
            let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
            let limit = if d == 1 { FINAL_ERROR_1D } else { FINAL_ERROR_2D };
            let last = errs[K_MAX as usize - 1];
            let counts_ok = d > 1
                || bs.iter().all(|b| {
                    let c = indicator_grammian_counts(&Cuboid::interval(int(0), len.clone()).unwrap(), b).unwrap();
                    c.n_i == (&len / &b[0]).floor().to_integer() && c.n_o == BigInt::one()
                });
            ok &= matches && decreasing && last < limit && counts_ok;
            finals.push(format!("p={p}: {last:.3e} < {limit}"));
        }
        let title = if d == 1 { "Grammian error of χ[0,13/10) decreases to below 0.01" } else { "Grammian error of χ[0,13/10)² decreases to below 0.05" };
        lines.push(line(if d == 1 { "4a" } else { "4b" }, title, ok, finals.join(", ")));
    }
    Ok(lines)
}

/// Midpoint sum of `|f − g|²` on a `2^-16` grid covering both supports.
fn quadrature_distance(f: &FreqFn, g: &FreqFn) -> f64 {
    let (bf, bg) = (f.bounding_box().unwrap(), g.bounding_box().unwrap());
    let lo = bf.lo_f64()[0].min(bg.lo_f64()[0]).floor();
    let hi = bf.hi_f64()[0].max(bg.hi_f64()[0]).ceil();
    let h = 2f64.powi(-16);
    let n = ((hi - lo) / h).round() as usize;
    let mut s = 0.0;
    for i in 0..n {
        let x = [lo + (i as f64 + 0.5) * h];
        s += (f.eval(&x) - g.eval(&x)).norm_sqr();
    }
    (s * h).sqrt()
}

fn criterion_5() -> Outcome {
    let f = gaussian();
    let a = Dilation::scalar(int(2), 1).unwrap();
    let mut opts = FrameOptions::for_dim(1);
    opts.tests = FRAME_TESTS;
    let out = construct_frame_with(&f, FRAME_EPS, &a, &opts).map_err(|e| e.to_string())?;
    let rep = &out.report;
    let quad = quadrature_distance(&f, &out.psi);
    let est = &rep.estimate;
    Ok(vec![
        line(
            "5a",
            "frame generator within 0.1 of the Gaussian",
            rep.distance < FRAME_EPS && (quad - rep.distance).abs() < QUADRATURE_TOL,
            format!("recorded {:.9}, quadrature {:.9}", rep.distance, quad),
        ),
        line(
            "5b",
            "frame hypotheses and empirical lower bound",
            rep.beurling_product < BEURLING_LIMIT && rep.scale_sum.p > 0.0 && est.ratios.len() == FRAME_TESTS && est.m_est > 0.0,
            format!(
                "ρR = {:.4}, p = {:.4}, mEst = {:.4} over {} tests, all checks pass: {}",
                rep.beurling_product,
                rep.scale_sum.p,
                est.m_est,
                est.ratios.len(),
                rep.checks.all_pass()
            ),
        ),
    ])
}

fn criterion_6() -> Outcome {
    let f = gaussian();
    let out = construct_riesz_generator(&f, RIESZ_EPS).map_err(|e| e.to_string())?;
    let psi = FreqFn::Step(out.psi.clone());
    let dist = l2_distance(&f, &psi).map_err(|e| e.to_string())?;
    let cap = RIESZ_EPS * RIESZ_EPS / 16.0;
    let budgets: Vec<(String, f64)> = out
        .report
        .quantities
        .iter()
        .filter(|(k, _)| k.starts_with("budget."))
        .map(|(k, v)| (k.clone(), v.as_f64().unwrap_or(f64::INFINITY)))
        .collect();
    let budget_ok = budgets.len() == 4 && budgets.iter().all(|(_, v)| *v < cap);
    let index = centered_index_set((RIESZ_SECTION as i64 - 1) / 2, 1);
    let (lo, _) = riesz_bound_estimate(&psi, &out.translations, &index).map_err(|e| e.to_string())?;
    let floor = out.params.lambda.powi(2) * RIESZ_FLOOR_FACTOR;
    Ok(vec![
        line("6a", "Riesz generator within 0.5 of the Gaussian", dist < RIESZ_EPS, format!("‖f − ψ‖ = {dist:.6}")),
        line(
            "6b",
            "four budget terms under ε²/16",
            budget_ok,
            budgets.iter().map(|(k, v)| format!("{} {v:.3e}", k.trim_start_matches("budget."))).collect::<Vec<_>>().join(", "),
        ),
        line(
            "6c",
            "finite-section Riesz lower bound at least 0.9 λ²",
            index.len() == RIESZ_SECTION && lo >= floor,
            format!("{lo:.4e} ≥ {floor:.4e} on {} exponentials", index.len()),
        ),
    ])
}

fn criterion_7() -> Outcome {
    let f = gaussian();
    let out = construct_ortho_generator(&f, ORTHO_EPS).map_err(|e| e.to_string())?;
    let rep = &out.report;
    let direct = l2_distance(&f, &out.psi).map_err(|e| e.to_string())?;

    // ∫ |ψ̂|² e^{-2πi kγω} on a 2^-16 grid
    let gamma = to_f64(&out.lattice.diag().expect("diagonal lattice")[0]);
    let bb = out.psi.bounding_box().unwrap();
    let (lo, hi) = (bb.lo_f64()[0], bb.hi_f64()[0]);
    let h = 2f64.powi(-16);
    let n = ((hi - lo) / h).ceil() as usize;
    let weights: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * h;
            (x, out.psi.eval(&[x]).norm_sqr() * h)
        })
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let mut quad_dev = 0.0f64;
    for k in 0..TRANSLATES as i64 {
        let t = -2.0 * std::f64::consts::PI * k as f64 * gamma;
        let g: Complex64 = weights.iter().map(|&(x, w)| Complex64::from_polar(w, t * x)).sum();
        quad_dev = quad_dev.max((g - if k == 0 { 1.0 } else { 0.0 }).norm());
    }

    let (near, far) = out.psi.support_radii().unwrap();
    let a = to_f64(out.dilation.scalar_value().expect("scalar dilation"));
    let pairs = rep.dilation_overlaps.len();
    let worst = rep.dilation_overlaps.iter().map(|o| o.2).fold(0.0, f64::max);
    let spans = rep.dilation_overlaps.iter().map(|o| (o.1 - o.0).abs()).max().unwrap_or(0);
    Ok(vec![
        line(
            "7a",
            "orthonormal generator within 0.2 of the Gaussian",
            rep.total_distance < ORTHO_EPS && (direct - rep.total_distance).abs() < 1e-12,
            format!("total {:.6}", rep.total_distance),
        ),
        line(
            "7b",
            "11 translates are orthonormal",
            rep.translate_gram_deviation < GRAM_TOL && quad_dev < GRAM_TOL,
            format!("Gram deviation {:.2e}, quadrature {:.2e}", rep.translate_gram_deviation, quad_dev),
        ),
        line(
            "7c",
            "distinct scales have disjoint supports",
            worst < OVERLAP_TOL && spans == SCALE_SPAN && pairs > 0 && a * near >= far,
            format!("max overlap {worst:e} over {pairs} pairs, a = {a}, a·r = {:.4} ≥ R = {far:.4}", a * near),
        ),
    ])
}

fn criterion_8() -> Outcome {
    let band = FreqFn::Step(StepFn::indicator(
        &BoxSet::from_box(Cuboid::interval(int(1), int(3)).unwrap()),
        Complex64::new(0.5f64.sqrt(), 0.0),
    ));
    let v = nondensity_fixed_dilation_demo(&band, &Dilation::scalar(int(2), 1).unwrap()).map_err(|e| e.to_string())?;
    let low = FreqFn::Step(StepFn::indicator(
        &BoxSet::from_box(Cuboid::interval(int(0), frac(1, 2)).unwrap()),
        Complex64::new(2f64.sqrt(), 0.0),
    ));
    let w = nondensity_fixed_lattice_demo(&low, &[int(1)]).map_err(|e| e.to_string())?;
    // g_b = √2 on [0,1/2) and 0 on [1/2,1)
    let closed = ((2f64.sqrt() - 1.0).powi(2) / 2.0 + 0.5).sqrt();
    let mut literal = line(
        "8c",
        "fixed-lattice demo equals 0.655",
        (w - LATTICE_DEMO_TARGET).abs() < LATTICE_DEMO_TOL,
        format!("got {w:.6}; √((√2−1)²/2 + 1/2) = {closed:.6}"),
    );
    literal.expected_failure = true;
    Ok(vec![
        line("8a", "fixed-dilation demo equals 1/(2√2)", (v - 1.0 / 8f64.sqrt()).abs() < DILATION_DEMO_TOL, format!("{v:.12}")),
        line("8b", "fixed-lattice demo equals its closed form", (w - closed).abs() < LATTICE_DEMO_TOL, format!("{w:.12} vs {closed:.12}")),
        literal,
    ])
}

fn digest<T: serde::Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn criterion_9() -> Outcome {
    let f = gaussian();
    let a = Dilation::scalar(int(2), 1).unwrap();
    let mut opts = FrameOptions::for_dim(1);
    opts.tests = 8;
    opts.seed = 42;
    let mut hashes = Vec::new();
    for threads in [1, 1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let h = pool.install(|| -> Result<[String; 3], String> {
            let e = |e: wavedense::Error| e.to_string();
            Ok([
                digest(&construct_frame_with(&f, FRAME_EPS, &a, &opts).map_err(e)?.report),
                digest(&construct_riesz_generator(&f, RIESZ_EPS).map_err(e)?.report),
                digest(&construct_ortho_generator(&f, ORTHO_EPS).map_err(e)?.report),
            ])
        })?;
        hashes.push(h);
    }
    let same = hashes.windows(2).all(|w| w[0] == w[1]);
    Ok(vec![line(
        "9",
        "repeated seeded runs give identical reports",
        same,
        format!("frame {}…, riesz {}…, ortho {}…", &hashes[0][0][..12], &hashes[0][1][..12], &hashes[0][2][..12]),
    )])
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let start = Instant::now();
        let lines = match run() {
            Ok(lines) => lines,
            Err(e) => vec![Line { id: "", title: "error", pass: false, expected_failure: false, detail: e }],
        };
        let t = start.elapsed();
        for l in &lines {
            let tag = match (l.pass, l.expected_failure) {
                (true, _) => "PASS",
                (false, false) => "FAIL",
                (false, true) => "FAIL (expected)",
            };
            let id = if l.id.is_empty() { id } else { l.id };
            println!("[{tag}] criterion {id}: {} ({})", l.title, l.detail);
            if !l.pass && !l.expected_failure {
                failed += 1;
            }
        }
        if t > CRITERION_BUDGET {
            println!("[FAIL] criterion {id}: took {:.1}s", t.as_secs_f64());
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance line(s) failed");
        std::process::exit(1);
    }
}
