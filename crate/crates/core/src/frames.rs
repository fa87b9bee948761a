//! Frame generators for a fixed expansive dilation.
//!
//! The target is cut to the Euclidean annulus `U = {r ≤ |ω| ≤ R}` and floored
//! at `λ` there. The translation lattice is chosen fine enough that the
//! exponentials it indexes form a frame on the ball of radius `R`, which with
//! the scale-sum bounds makes the affine system a frame.
//!
//! One-dimensional step functions keep the exact annulus `[-R,-r) ∪ [r,R)`.
//! Everything else works on a grid, with cells assigned to `U` by their centers.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boxcalc::{BoxSet, Cuboid};
use crate::error::{Error, Result};
use crate::freqfn::{self, AffineSystemSpec, Dilation, FreqFn, GridFn, Lattice, Region, Translations};
use crate::linalg;
use crate::rational::{self, Rat};
use crate::report::{Check, Report};
use crate::waveletset;

const MAX_CELLS: usize = 1 << 24;
const MAX_SAMPLES: usize = 1 << 22;

/// Parameters of the frame construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameParams {
    pub epsilon: f64,
    #[serde(with = "rational::serde_rat")]
    pub r: Rat,
    #[serde(rename = "R", with = "rational::serde_rat")]
    pub big_r: Rat,
    pub lambda: f64,
    /// `μ(U)` as represented (exact annulus or union of grid cells).
    pub u_measure: f64,
    pub dilation: Dilation,
    /// Any translation gap below this satisfies the exponential frame criterion.
    pub gap_target: f64,
    /// `∫_{|ω| > R} |ĝ|²`.
    pub outer_tail: f64,
    /// `∫_{|ω| < r} |ĝ|²`.
    pub inner_tail: f64,
    /// Refinement factor applied to the input grid; 1 on the exact path.
    pub refine: usize,
}

enum Work {
    Exact(FreqFn),
    Grid(GridFn),
}

fn working_input(f: &FreqFn) -> Result<Work> {
    match f {
        FreqFn::Step(s) if s.dim() == 1 => Ok(Work::Exact(f.clone())),
        FreqFn::Grid(g) => Ok(Work::Grid(g.clone())),
        FreqFn::Step(s) => {
            let bb = f.bounding_box().ok_or(Error::ZeroFunction)?;
            Ok(Work::Grid(f.to_grid(bb, vec![64; s.dim()])?))
        }
    }
}

/// Crops to `[-R, R)^d` and refines until the cell diagonal is at most `r/4`.
fn working_grid(g: &GridFn, big_r: &Rat, r: f64) -> Result<(GridFn, usize)> {
    let d = g.dim();
    let framed = g.reframe(&Cuboid::centered(big_r.clone(), d)?)?;
    let diag = framed.step_f64().iter().map(|h| h * h).sum::<f64>().sqrt();
    let mut factor = 1usize;
    while diag / factor as f64 > r / 4.0 {
        factor *= 2;
        if framed.len().saturating_mul(factor.saturating_pow(d as u32)) > MAX_CELLS {
            return Err(Error::Budget(format!(
                "annulus inner radius {r} needs more than {MAX_CELLS} grid cells"
            )));
        }
    }
    Ok((framed.refine(factor), factor))
}

fn in_annulus(g: &GridFn, k: usize, r: f64, big_r: f64) -> bool {
    let n = linalg::norm2(&g.cell_center(k));
    n >= r && n <= big_r
}

/// `[-R, -r) ∪ [r, R)`.
fn exact_annulus(r: &Rat, big_r: &Rat) -> Result<BoxSet> {
    BoxSet::normalize(
        1,
        vec![
            Cuboid::interval(-big_r.clone(), -r.clone())?,
            Cuboid::interval(r.clone(), big_r.clone())?,
        ],
    )
}

struct Terms {
    outer: f64,
    inner: f64,
    u_measure: f64,
    refine: usize,
}

fn terms(f: &FreqFn, work: &Work, r: &Rat, big_r: &Rat) -> Result<Terms> {
    match work {
        Work::Exact(g) => {
            let ball = BoxSet::from_box(Cuboid::interval(-big_r.clone(), big_r.clone())?);
            let hole = BoxSet::from_box(Cuboid::interval(-r.clone(), r.clone())?);
            Ok(Terms {
                outer: freqfn::tail_energy(g, &Region::Boxes(ball))?,
                inner: freqfn::energy_within(g, &hole)?,
                u_measure: rational::to_f64(&exact_annulus(r, big_r)?.measure()),
                refine: 1,
            })
        }
        Work::Grid(g) => {
            let (rf, bf) = (rational::to_f64(r), rational::to_f64(big_r));
            let (w, refine) = working_grid(g, big_r, rf)?;
            let source = match f {
                FreqFn::Grid(_) => f.clone(),
                FreqFn::Step(_) => FreqFn::Grid(g.clone()),
            };
            let cropped = freqfn::tail_energy(&source, &Region::Boxes(BoxSet::from_box(w.domain().clone())))?;
            let cell = rational::to_f64(&w.cell_measure());
            let (mut outer, mut inner, mut count) = (0.0, 0.0, 0usize);
            for k in 0..w.len() {
                let n = linalg::norm2(&w.cell_center(k));
                let e = w.values()[k].norm_sqr() * cell;
                if n > bf {
                    outer += e;
                } else if n < rf {
                    inner += e;
                } else {
                    count += 1;
                }
            }
            Ok(Terms {
                outer: cropped + outer,
                inner,
                u_measure: count as f64 * cell,
                refine,
            })
        }
    }
}

fn first_r(big_r: &Rat, a: &Dilation, norm_a: f64) -> Result<Rat> {
    if let Some(s) = a.scalar_value() {
        return Ok(big_r / s.abs());
    }
    let target = rational::to_f64(big_r) / norm_a;
    let mut k = target.log2().floor() as i32;
    while rational::to_f64(&rational::pow2(k)) > target {
        k -= 1;
    }
    Ok(rational::pow2(k))
}

/// `R = 2^k` for the first `k ≥ 0` with the energy outside the ball below
/// `ε²/16`, then `r` from `R/‖a‖` halved until the energy inside the hole is
/// below `ε²/16`, and `λ` with `4λ²μ(U) = ε²/16`.
pub fn choose_frame_params(f: &FreqFn, epsilon: f64, a: &Dilation) -> Result<FrameParams> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.dim(),
        });
    }
    a.require_expansive()?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let budget = epsilon * epsilon / 16.0;
    let norm_a = linalg::op_norm(a.matrix());
    let work = working_input(f)?;
    let two = Rat::from_integer(2.into());
    for k in 0..=60 {
        let big_r = rational::pow2(k);
        let mut r = first_r(&big_r, a, norm_a)?;
        for _ in 0..200 {
            let t = terms(f, &work, &r, &big_r)?;
            if t.outer >= budget {
                break;
            }
            if t.inner < budget && t.u_measure > 0.0 {
                let lambda = (epsilon * epsilon / (64.0 * t.u_measure)).sqrt();
                return Ok(FrameParams {
                    epsilon,
                    gap_target: 0.25 / rational::to_f64(&big_r),
                    r,
                    big_r,
                    lambda,
                    u_measure: t.u_measure,
                    dilation: a.clone(),
                    outer_tail: t.outer,
                    inner_tail: t.inner,
                    refine: t.refine,
                });
            }
            r /= &two;
        }
    }
    Err(Error::Budget("no admissible annulus found".into()))
}

/// `ĝ` on `U ∩ {|ĝ| > λ}`, `λ` on the rest of `U`, zero elsewhere. Also
/// returns the level-set term `∫_U |ĝ − h|²`.
pub fn build_h(g: &FreqFn, params: &FrameParams) -> Result<(FreqFn, f64)> {
    let lambda = params.lambda;
    match working_input(g)? {
        Work::Exact(g) => {
            let u = exact_annulus(&params.r, &params.big_r)?;
            let (h, term) = waveletset::floor_on_set(&g, &u, lambda)?;
            Ok((FreqFn::Step(h), term))
        }
        Work::Grid(grid) => {
            let (rf, bf) = (rational::to_f64(&params.r), rational::to_f64(&params.big_r));
            let (w, _) = working_grid(&grid, &params.big_r, rf)?;
            let cell = rational::to_f64(&w.cell_measure());
            let lam = Complex64::new(lambda, 0.0);
            let mut term = 0.0;
            let values = (0..w.len())
                .map(|k| {
                    let v = w.values()[k];
                    if !in_annulus(&w, k, rf, bf) {
                        Complex64::zero()
                    } else if v.norm() > lambda {
                        v
                    } else {
                        term += (v - lam).norm_sqr() * cell;
                        lam
                    }
                })
                .collect();
            let h = GridFn::new(w.domain().clone(), w.cells().to_vec(), values)?;
            Ok((FreqFn::Grid(h), term))
        }
    }
}

/// Extremes of `Σ_j |h(b^j ω)|²`, `b = (a^{-1})^T`, over sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleSum {
    pub p: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
    pub points: usize,
    /// Sample points whose sum vanishes.
    pub covering_failures: usize,
    pub levels: (i32, i32),
}

impl ScaleSum {
    pub fn covers(&self) -> bool {
        self.covering_failures == 0 && self.p > 0.0
    }
}

fn default_points_per_axis(d: usize) -> usize {
    match d {
        1 => 4001,
        2 => 101,
        _ => 21,
    }
}

/// Sample offset within a cell, far from any dyadic or rational boundary.
const OFFSET: f64 = 0.618_033_988_749_894_8;

/// Smallest `J ≥ 0` such that `pred(j)` holds for 8 consecutive `j > J`.
fn level_bound(mut pred: impl FnMut(i32) -> Result<bool>) -> Result<i32> {
    let mut run = 0;
    let mut j = 1;
    while run < 8 {
        if pred(j)? {
            run += 1;
        } else {
            run = 0;
        }
        j += 1;
        if j > 10_000 {
            return Err(Error::Budget("scale range does not close".into()));
        }
    }
    Ok(j - 9)
}

/// Sums over the scales that can reach the support of `h` from the annulus
/// the sample points lie in; points with `|ω| < r_h` are skipped since they
/// are dilates of points already sampled.
pub fn check_scale_sum(h: &FreqFn, a: &Dilation, points_per_axis: Option<usize>) -> Result<ScaleSum> {
    let d = h.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
    }
    a.require_expansive()?;
    let (near, far) = h.support_radii().ok_or(Error::ZeroFunction)?;
    if !(near > 0.0) {
        return Err(Error::InvalidParameter("support of h touches the origin".into()));
    }
    // Every orbit meets {ρ ≤ |ω| ≤ ‖a‖ρ}, so this box holds a full period.
    let span = far.max(near * linalg::op_norm(a.matrix()));
    let n = points_per_axis.unwrap_or_else(|| default_points_per_axis(d));
    let step = 2.0 * span / n as f64;
    let mut points = Vec::new();
    let total = n.pow(d as u32);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = vec![0.0; d];
        for x in p.iter_mut() {
            *x = -span + ((rest % n) as f64 + OFFSET) * step;
            rest /= n;
        }
        if linalg::norm2(&p) >= near {
            points.push(p);
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points in the support annulus".into()));
    }
    let (pmin, pmax) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        let n = linalg::norm2(p);
        (lo.min(n), hi.max(n))
    });
    let b = a.frequency_matrix()?;
    let up = level_bound(|j| Ok(linalg::op_norm(&linalg::int_pow(&b, j)?) * pmax < near))?;
    let down = level_bound(|j| Ok(linalg::min_singular(&linalg::int_pow(&b, -j)?) * pmin > far))?;
    let mats: Vec<DMatrix<f64>> = (-down..=up).map(|j| linalg::int_pow(&b, j)).collect::<Result<_>>()?;
    let sums: Vec<f64> = points
        .par_iter()
        .map(|p| mats.iter().map(|m| h.eval(&linalg::mat_vec(m, p)).norm_sqr()).sum())
        .collect();
    let p = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let big_p = sums.iter().copied().fold(0.0, f64::max);
    Ok(ScaleSum {
        p,
        big_p,
        points: sums.len(),
        covering_failures: sums.iter().filter(|&&s| s == 0.0).count(),
        levels: (-down, up),
    })
}

/// Largest dyadic `c` with `ρ(cℤ^d)·R = ½√d·c·R < 1/4`.
pub fn beurling_lattice(radius: f64, dim: usize) -> Result<Lattice> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter("support radius must be positive".into()));
    }
    let bound = 1.0 / (2.0 * (dim as f64).sqrt() * radius);
    let mut k = bound.log2().floor() as i32 + 1;
    while rational::to_f64(&rational::pow2(k)) >= bound {
        k -= 1;
    }
    Lattice::scalar(rational::pow2(k), dim)
}

/// Frequency samples of `ψ̂` over one period of the dual lattice, with the
/// aliased copies `η + Dk` grouped per sample.
struct Sampler {
    dim: usize,
    eta: Vec<f64>,
    psi_conj: Vec<Complex64>,
    starts: Vec<usize>,
    weight: f64,
    aliased: bool,
}

impl Sampler {
    fn new(psi: &FreqFn, lattice: &Lattice) -> Result<Self> {
        let d = psi.dim();
        let bb = psi.bounding_box().ok_or(Error::ZeroFunction)?;
        let (lo, hi) = (bb.lo_f64(), bb.hi_f64());
        let mut spacing: Vec<f64> = match psi {
            FreqFn::Grid(g) => g.step_f64().iter().map(|h| h / 2.0).collect(),
            FreqFn::Step(_) => {
                let n = if d == 1 { 4096.0 } else { 256.0 };
                (0..d).map(|a| (hi[a] - lo[a]) / n).collect()
            }
        };
        let widths: Vec<f64> = (0..d).map(|a| hi[a] - lo[a]).collect();
        let (domain, shifts, aliased): (Vec<f64>, Vec<Vec<f64>>, bool) = match lattice.diag() {
            Some(c) => {
                let periods: Vec<f64> = c.iter().map(|c| 1.0 / rational::to_f64(c).abs()).collect();
                if (0..d).all(|a| widths[a] <= periods[a]) {
                    (widths.clone(), vec![vec![0.0; d]], false)
                } else {
                    let counts: Vec<usize> =
                        (0..d).map(|a| (widths[a] / periods[a]).ceil().max(1.0) as usize).collect();
                    let mut shifts = vec![Vec::new()];
                    for a in 0..d {
                        shifts = shifts
                            .into_iter()
                            .flat_map(|s: Vec<f64>| {
                                let p = periods[a];
                                (0..counts[a]).map(move |k| {
                                    let mut t = s.clone();
                                    t.push(k as f64 * p);
                                    t
                                })
                            })
                            .collect();
                    }
                    (periods, shifts, true)
                }
            }
            None => {
                let dual = linalg::inverse(&lattice.matrix())?.transpose();
                let diam = linalg::norm2(&widths);
                let shortest = neighbour_indices(d)
                    .iter()
                    .map(|k| linalg::norm2(&linalg::mat_vec(&dual, k)))
                    .fold(f64::INFINITY, f64::min);
                if shortest <= diam {
                    return Err(Error::Unsupported(
                        "aliased frame sums are computed for diagonal lattices only".into(),
                    ));
                }
                (widths.clone(), vec![vec![0.0; d]], false)
            }
        };
        let mut counts: Vec<usize> = (0..d).map(|a| (domain[a] / spacing[a]).ceil().max(1.0) as usize).collect();
        while counts.iter().product::<usize>().saturating_mul(shifts.len()) > MAX_SAMPLES {
            for (c, s) in counts.iter_mut().zip(spacing.iter_mut()) {
                *s *= 2.0;
                *c = (*c).div_ceil(2);
            }
        }
        let step: Vec<f64> = (0..d).map(|a| domain[a] / counts[a] as f64).collect();
        let total: usize = counts.iter().product();
        let mut eta = Vec::new();
        let mut psi_conj = Vec::new();
        let mut starts = vec![0];
        let mut p = vec![0.0; d];
        let mut x = vec![0.0; d];
        for flat in 0..total {
            let mut rest = flat;
            for a in 0..d {
                p[a] = lo[a] + ((rest % counts[a]) as f64 + 0.5) * step[a];
                rest /= counts[a];
            }
            for s in &shifts {
                for a in 0..d {
                    x[a] = p[a] + s[a];
                }
                let v = psi.eval(&x);
                if v != Complex64::zero() {
                    eta.extend_from_slice(&x);
                    psi_conj.push(v.conj());
                }
            }
            if psi_conj.len() > *starts.last().expect("nonempty") {
                starts.push(psi_conj.len());
            }
        }
        Ok(Sampler {
            dim: d,
            eta,
            psi_conj,
            starts,
            weight: step.iter().product(),
            aliased,
        })
    }

    /// `F(η) = f̂(Mη)·conj ψ̂(η)` at every stored point.
    fn values(&self, f: &FreqFn, m: &DMatrix<f64>) -> Vec<Complex64> {
        let d = self.dim;
        let mut y = vec![0.0; d];
        self.psi_conj
            .iter()
            .enumerate()
            .map(|(e, &pc)| {
                let x = &self.eta[e * d..(e + 1) * d];
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = (0..d).map(|k| m[(i, k)] * x[k]).sum();
                }
                let v = f.eval(&y);
                if v == Complex64::zero() {
                    v
                } else {
                    v * pc
                }
            })
            .collect()
    }

    /// `∫_{period} |Σ_k F(η + Dk)|²`.
    fn periodized_energy(&self, values: &[Complex64]) -> f64 {
        self.starts
            .windows(2)
            .map(|w| values[w[0]..w[1]].iter().sum::<Complex64>().norm_sqr())
            .sum::<f64>()
            * self.weight
    }
}

fn neighbour_indices(d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<f64>| {
                (-2..=2).map(move |k| {
                    let mut w = v.clone();
                    w.push(k as f64);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0.0));
    out
}

/// Direct truncated lattice sum, compared against the periodized value for
/// the first test function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeCheck {
    pub truncation: i64,
    pub truncated_sum: f64,
    pub full_sum: f64,
}

/// Empirical frame bounds over a family of test functions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameEstimate {
    pub m_est: f64,
    #[serde(rename = "M_est")]
    pub big_m_est: f64,
    /// `Σ_{j,γ} |⟨f, ψ_{j,γ}⟩|² / ‖f‖²` per test.
    pub ratios: Vec<f64>,
    /// Scales contributing to each test.
    pub levels: Vec<(i32, i32)>,
    /// Every scale that can contribute is summed and the lattice sum is
    /// evaluated in closed form, so nothing is truncated.
    pub truncation_bound: f64,
    pub aliased: bool,
    pub lattice_check: Option<LatticeCheck>,
}

fn touching_levels(test: &FreqFn, psi_radii: (f64, f64), b: &DMatrix<f64>, j_trunc: i32) -> Result<Vec<i32>> {
    let (tn, tf) = test.support_radii().ok_or(Error::ZeroFunction)?;
    if !(tn > 0.0) {
        return Err(Error::BandLimit("test function support touches the origin".into()));
    }
    let (rn, rf) = psi_radii;
    let reaches = |j: i32| -> Result<bool> {
        let m = linalg::int_pow(b, j)?;
        Ok(linalg::op_norm(&m) * tf * (1.0 + 1e-12) >= rn && linalg::min_singular(&m) * tn * (1.0 - 1e-12) <= rf)
    };
    let up = level_bound(|j| Ok(linalg::op_norm(&linalg::int_pow(b, j)?) * tf * (1.0 + 1e-12) < rn))?;
    let down = level_bound(|j| Ok(linalg::min_singular(&linalg::int_pow(b, -j)?) * tn * (1.0 - 1e-12) > rf))?;
    let mut out = Vec::new();
    for j in -down..=up {
        if reaches(j)? {
            if j.abs() > j_trunc {
                return Err(Error::BandLimit(format!(
                    "test function reaches scale {j}, beyond the truncation {j_trunc}"
                )));
            }
            out.push(j);
        }
    }
    Ok(out)
}

/// `Σ_{j,γ} |⟨f, D_{a^j} T_γ ψ⟩|² / ‖f‖²` for each test, min and max.
///
/// Substituting `η = b^j ω` turns level `j` into `|det a|^j Σ_γ |F̂_j(γ)|²` with
/// `F_j(η) = f̂((a^T)^j η)·conj ψ̂(η)`, and Parseval on the dual torus sums
/// over `γ` exactly. Tests must not reach scales beyond `j_trunc`.
pub fn frame_sum_estimate(
    spec: &AffineSystemSpec,
    tests: &[FreqFn],
    j_trunc: i32,
    lattice_trunc: Option<i64>,
) -> Result<FrameEstimate> {
    let psi = &spec.generator;
    let d = psi.dim();
    let Translations::Lattice(lattice) = &spec.translations else {
        return Err(Error::Unsupported("frame sums need a lattice of translations".into()));
    };
    if tests.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    for t in tests {
        if t.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: t.dim() });
        }
    }
    let radii = psi.support_radii().ok_or(Error::ZeroFunction)?;
    let b = spec.dilation.frequency_matrix()?;
    let at = spec.dilation.matrix().transpose();
    let det_a = spec.dilation.det_abs();
    let levels: Vec<Vec<i32>> =
        tests.iter().map(|t| touching_levels(t, radii, &b, j_trunc)).collect::<Result<_>>()?;
    let sampler = Sampler::new(psi, lattice)?;
    let dual_volume = 1.0 / lattice.det_abs();
    let ratios: Vec<f64> = tests
        .par_iter()
        .zip(&levels)
        .map(|(t, js)| {
            let norm = t.l2_norm();
            let per_level: Vec<f64> = js
                .par_iter()
                .map(|&j| {
                    let m = linalg::int_pow(&at, j).expect("invertible");
                    let vals = sampler.values(t, &m);
                    det_a.powi(j) * dual_volume * sampler.periodized_energy(&vals)
                })
                .collect();
            let total: f64 = per_level.iter().sum();
            total / (norm * norm)
        })
        .collect();
    let lattice_check = match lattice_trunc {
        Some(l) if l >= 0 => {
            let t = &tests[0];
            let truncated: f64 = levels[0]
                .iter()
                .map(|&j| {
                    let m = linalg::int_pow(&at, j)?;
                    let vals = sampler.values(t, &m);
                    Ok(det_a.powi(j) * truncated_lattice_sum(&sampler, &vals, lattice, l))
                })
                .sum::<Result<f64>>()?;
            let norm = t.l2_norm();
            Some(LatticeCheck {
                truncation: l,
                truncated_sum: truncated / (norm * norm),
                full_sum: ratios[0],
            })
        }
        _ => None,
    };
    Ok(FrameEstimate {
        m_est: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        big_m_est: ratios.iter().copied().fold(0.0, f64::max),
        levels: levels
            .iter()
            .map(|js| (js.first().copied().unwrap_or(0), js.last().copied().unwrap_or(0)))
            .collect(),
        ratios,
        truncation_bound: 0.0,
        aliased: sampler.aliased,
        lattice_check,
    })
}

/// `Σ_{|k|∞ ≤ L} |∫ F(η) e^{2πi (Ck)·η} dη|²` by quadrature.
fn truncated_lattice_sum(s: &Sampler, values: &[Complex64], lattice: &Lattice, l: i64) -> f64 {
    let d = s.dim;
    let ct = lattice.matrix().transpose();
    let side = (2 * l + 1) as usize;
    let size = side.pow(d as u32);
    // Fixed chunks summed in order keep the result independent of scheduling.
    let partials: Vec<Vec<Complex64>> = values
        .par_chunks(4096)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = vec![Complex64::zero(); size];
            for (i, &v) in chunk.iter().enumerate() {
                if v == Complex64::zero() {
                    continue;
                }
                let e = c * 4096 + i;
                let y = linalg::mat_vec(&ct, &s.eta[e * d..(e + 1) * d]);
                let tables: Vec<Vec<Complex64>> = y
                    .iter()
                    .map(|&ya| {
                        let w = Complex64::from_polar(1.0, 2.0 * PI * ya);
                        let mut z = Complex64::from_polar(1.0, -2.0 * PI * ya * l as f64);
                        (0..side)
                            .map(|_| {
                                let out = z;
                                z *= w;
                                out
                            })
                            .collect()
                    })
                    .collect();
                for (flat, slot) in acc.iter_mut().enumerate() {
                    let mut rest = flat;
                    let mut z = v;
                    for t in &tables {
                        z *= t[rest % side];
                        rest /= side;
                    }
                    *slot += z;
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![Complex64::zero(); size];
    for p in partials {
        for (x, y) in acc.iter_mut().zip(p) {
            *x += y;
        }
    }
    acc.iter().map(|z| (z * s.weight).norm_sqr()).sum()
}

/// Random grid functions supported in the annulus `{r_ψ/‖a‖ ≤ |ω| ≤ ‖a‖R_ψ}`
/// with uniformly random complex values on about half of the cells.
pub fn random_band_limited_tests(psi: &FreqFn, a: &Dilation, count: usize, seed: u64) -> Result<Vec<FreqFn>> {
    let d = psi.dim();
    let (near, far) = psi.support_radii().ok_or(Error::ZeroFunction)?;
    let norm_a = linalg::op_norm(a.matrix());
    let (t0, t1) = (near / norm_a, far * norm_a);
    let half = rational::approximate(t1, 1 << 20)?;
    let cells = if d == 1 { 64 } else { 16 };
    let domain = Cuboid::centered(half, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = GridFn::new(domain.clone(), vec![cells; d], vec![Complex64::zero(); cells.pow(d as u32)])?;
    let admissible: Vec<usize> = (0..template.len())
        .filter(|&k| {
            let (n, f) = template.cell_radii(k);
            n >= t0 && n > 0.0 && f <= t1 * (1.0 + 1e-12)
        })
        .collect();
    if admissible.is_empty() {
        return Err(Error::InvalidParameter("no room for band-limited test functions".into()));
    }
    (0..count)
        .map(|_| {
            let mut values = vec![Complex64::zero(); template.len()];
            for &k in &admissible {
                if rng.gen_bool(0.5) {
                    values[k] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let k = admissible[rng.gen_range(0..admissible.len())];
            if values.iter().all(|v| *v == Complex64::zero()) {
                values[k] = Complex64::one();
            }
            Ok(FreqFn::Grid(GridFn::new(domain.clone(), vec![cells; d], values)?))
        })
        .collect()
}

/// Knobs for the empirical frame-bound run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameOptions {
    pub tests: usize,
    pub seed: u64,
    pub j_trunc: i32,
    pub lattice_trunc: Option<i64>,
}

impl FrameOptions {
    pub fn for_dim(d: usize) -> Self {
        FrameOptions {
            tests: 20,
            seed: 0,
            j_trunc: 64,
            lattice_trunc: Some(match d {
                1 => 64,
                2 => 4,
                _ => 1,
            }),
        }
    }
}

/// Summary of the frame construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub distance: f64,
    pub gap_used: f64,
    pub beurling_product: f64,
    pub scale_sum: ScaleSum,
    pub estimate: FrameEstimate,
    pub checks: Report,
}

#[derive(Clone, Debug)]
pub struct FrameOutcome {
    pub psi: FreqFn,
    pub lattice: Lattice,
    pub params: FrameParams,
    pub report: FrameReport,
}

pub fn construct_frame_generator(f: &FreqFn, epsilon: f64, a: &Dilation) -> Result<FrameOutcome> {
    construct_frame_with(f, epsilon, a, &FrameOptions::for_dim(f.dim()))
}

pub fn construct_frame_with(f: &FreqFn, epsilon: f64, a: &Dilation, opts: &FrameOptions) -> Result<FrameOutcome> {
    let d = f.dim();
    let params = choose_frame_params(f, epsilon, a)?;
    let (psi, level_term) = build_h(f, &params)?;
    let distance = freqfn::l2_distance(f, &psi)?;
    let (near, far) = psi.support_radii().ok_or(Error::ZeroFunction)?;
    let lattice = beurling_lattice(far, d)?;
    let gap = freqfn::gap_of_lattice(&lattice)?;
    let scale = check_scale_sum(&psi, a, None)?;
    let spec = AffineSystemSpec::new(psi.clone(), a.clone(), Translations::Lattice(lattice.clone()))?;
    let tests = random_band_limited_tests(&psi, a, opts.tests, opts.seed)?;
    let est = frame_sum_estimate(&spec, &tests, opts.j_trunc, opts.lattice_trunc)?;

    let eps2 = epsilon * epsilon;
    let (r, big_r) = (rational::to_f64(&params.r), rational::to_f64(&params.big_r));
    let lambda = params.lambda;
    let mut rep = Report::new("frame generator");
    rep.push(Check::le("annulus inside dilate", "r‖a‖ ≤ R", r * linalg::op_norm(a.matrix()), big_r));
    rep.push(Check::lt("tail outside ball", "∫_{|ω|>R} |ĝ|² < ε²/16", params.outer_tail, eps2 / 16.0));
    rep.push(Check::lt("tail inside hole", "∫_{|ω|<r} |ĝ|² < ε²/16", params.inner_tail, eps2 / 16.0));
    rep.push(Check::lt(
        "tail total",
        "∫_{ℝ^d∖U} |ĝ|² < ε²/8",
        params.outer_tail + params.inner_tail,
        eps2 / 8.0,
    ));
    let floor_bound = 4.0 * lambda * lambda * params.u_measure;
    rep.push(Check::le("level-set term", "∫_U |ĝ − h|² ≤ 4λ²μ(U)", level_term, floor_bound * (1.0 + 1e-12)));
    rep.push(Check::lt("level-set budget", "4λ²μ(U) < ε²/8", floor_bound, eps2 / 8.0));
    rep.push(Check::lt("distance budget", "‖ĝ − h‖² < ε²/4", distance * distance, eps2 / 4.0));
    rep.push(Check::lt("distance", "‖f̂ − ψ̂‖₂ < ε", distance, epsilon));
    rep.push(Check::ge("lower value bound", "|ψ̂| ≥ λ on supp ψ̂", psi.inf_abs_on_support(), lambda * (1.0 - 1e-12)));
    rep.push(Check::gt("origin outside support", "dist(0, supp ψ̂) > 0", near, 0.0));
    rep.push(Check::holds("bounded support", "supp ψ̂ bounded", far.is_finite()));
    rep.push(Check::lt("beurling", "ρ(X)·R_ψ < 1/4", gap.rho * far, 0.25));
    rep.push(Check::gt("scale sum lower", "p = min Σ_j |ψ̂(b^jω)|² > 0", scale.p, 0.0));
    rep.push(Check::lt("scale sum upper", "P = max Σ_j |ψ̂(b^jω)|² < ∞", scale.big_p, f64::INFINITY));
    rep.push(Check::gt("frame lower estimate", "m_est > 0", est.m_est, 0.0));
    rep.push(Check::lt("frame upper estimate", "M_est < ∞", est.big_m_est, f64::INFINITY));
    if let Some(lc) = &est.lattice_check {
        rep.push(Check::le(
            "lattice sum cross-check",
            "truncated lattice sum ≤ periodized sum",
            lc.truncated_sum,
            lc.full_sum * (1.0 + 1e-9),
        ));
        rep.record("estimate.lattice_truncated", lc.truncated_sum);
    }
    rep.record("epsilon", epsilon);
    rep.record("distance", distance);
    rep.record("lambda", lambda);
    rep.record("r", rational::format(&params.r));
    rep.record("R", rational::format(&params.big_r));
    rep.record("u_measure", params.u_measure);
    rep.record("grid_refinement", params.refine);
    rep.record("budget.outer_tail", params.outer_tail);
    rep.record("budget.inner_tail", params.inner_tail);
    rep.record("budget.level_set_term", level_term);
    rep.record("support.inner_radius", near);
    rep.record("support.outer_radius", far);
    rep.record("lattice", &lattice);
    rep.record("gap", gap.rho);
    rep.record("beurling_product", gap.rho * far);
    rep.record("scale_sum.p", scale.p);
    rep.record("scale_sum.P", scale.big_p);
    rep.record("scale_sum.points", scale.points);
    rep.record("estimate.m", est.m_est);
    rep.record("estimate.M", est.big_m_est);
    rep.record("estimate.ratio", est.big_m_est / est.m_est);
    rep.record("estimate.tests", est.ratios.len());
    rep.record("estimate.seed", opts.seed);
    rep.record("estimate.truncation_bound", est.truncation_bound);

    let report = FrameReport {
        distance,
        gap_used: gap.rho,
        beurling_product: gap.rho * far,
        scale_sum: scale,
        estimate: est,
        checks: rep,
    };
    Ok(FrameOutcome {
        psi,
        lattice,
        params,
        report,
    })
}
