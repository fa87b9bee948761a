//! Wavelet sets built from the iteration `A_{i+1} = (r/R)·T̃(A_i)` and Riesz
//! generators supported on them.
//!
//! `A_0 = [-r/2, r/2)^d` is kept as its `2^d` quadrant boxes. `T̃` moves a box in
//! the quadrant with sign pattern `σ` by `R·σ`. The wavelet set is
//! `U = a(∪A_i) ∖ ∪A_i` with `a = R/r`; it is congruent to `[-R/2, R/2)^d` modulo
//! `Rℤ^d` and its dilates by `a` tile `ℝ^d ∖ {0}`. Everything here is exact
//! rational geometry; only the generator's values are floats.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxcalc::{BoxSet, Cuboid};
use crate::error::{Error, Result};
use crate::freqfn::{self, Dilation, FreqFn, Lattice, Piece, Region, StepFn};
use crate::grammian;
use crate::linalg;
use crate::rational::{self, Rat};
use crate::report::{Check, Report};

/// Sign pattern of the quadrant holding `b`: `x_i ≥ 0` counts as positive.
fn quadrant(b: &Cuboid) -> Result<Vec<bool>> {
    (0..b.dim())
        .map(|a| {
            if !b.lo()[a].is_negative() {
                Ok(true)
            } else if !b.hi()[a].is_positive() {
                Ok(false)
            } else {
                Err(Error::Straddle { axis: a })
            }
        })
        .collect()
}

/// Cuts every box along the coordinate hyperplanes.
pub fn split_quadrants(set: &BoxSet) -> Vec<Cuboid> {
    let zero = Rat::zero();
    let mut out = Vec::new();
    for b in set.boxes() {
        let mut parts = vec![b.clone()];
        for a in 0..b.dim() {
            let mut next = Vec::new();
            for p in parts {
                if p.lo()[a] < zero && p.hi()[a] > zero {
                    let mut hi = p.hi().to_vec();
                    hi[a] = zero.clone();
                    let mut lo = p.lo().to_vec();
                    lo[a] = zero.clone();
                    next.push(Cuboid::new(p.lo().to_vec(), hi).expect("nonempty half"));
                    next.push(Cuboid::new(lo, p.hi().to_vec()).expect("nonempty half"));
                } else {
                    next.push(p);
                }
            }
            parts = next;
        }
        out.extend(parts);
    }
    out
}

/// `T̃` on quadrant boxes.
pub fn tilde_t_boxes(boxes: &[Cuboid], big_r: &Rat) -> Result<Vec<Cuboid>> {
    boxes
        .iter()
        .map(|b| {
            let shift: Vec<Rat> = quadrant(b)?
                .into_iter()
                .map(|pos| if pos { big_r.clone() } else { -big_r.clone() })
                .collect();
            Ok(b.translate(&shift))
        })
        .collect()
}

/// `T̃` on a box set whose boxes avoid the coordinate hyperplanes.
pub fn tilde_t(set: &BoxSet, big_r: &Rat) -> Result<BoxSet> {
    BoxSet::normalize(set.dim(), tilde_t_boxes(set.boxes(), big_r)?)
}

fn check_radii(r: &Rat, big_r: &Rat) -> Result<()> {
    if !r.is_positive() || r * Rat::from_integer(3.into()) >= *big_r {
        return Err(Error::InvalidParameter(format!("need 0 < r < R/3, got r = {r}, R = {big_r}")));
    }
    Ok(())
}

/// `A_0, …, A_N`, each as its `2^d` quadrant boxes.
pub fn iterate_a(r: &Rat, big_r: &Rat, depth: usize, dim: usize) -> Result<Vec<Vec<Cuboid>>> {
    check_radii(r, big_r)?;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let half = r / Rat::from_integer(2.into());
    let a0 = split_quadrants(&BoxSet::from_box(Cuboid::centered(half, dim)?));
    let ratio = vec![r / big_r; dim];
    let zero = vec![Rat::zero(); dim];
    let mut levels = vec![a0];
    for _ in 0..depth {
        let prev = levels.last().expect("nonempty");
        let next = tilde_t_boxes(prev, big_r)?
            .iter()
            .map(|b| b.affine(&ratio, &zero))
            .collect::<Result<Vec<_>>>()?;
        levels.push(next);
    }
    Ok(levels)
}

/// `Σ_{i≥N} μ(A_i) = r^d ρ^N / (1 − ρ)` with `ρ = (r/R)^d`.
pub fn geometric_tail(r: &Rat, big_r: &Rat, depth: usize, dim: usize) -> Rat {
    let rho = rational::pow(&(r / big_r), dim as u32);
    rational::pow(r, dim as u32) * rational::pow(&rho, depth as u32) / (Rat::one() - rho)
}

/// `Σ_{i≥1} μ(A_i) = r^d r^d / (R^d − r^d)`.
pub fn limit_measure(r: &Rat, big_r: &Rat, dim: usize) -> Rat {
    let rd = rational::pow(r, dim as u32);
    &rd * &rd / (rational::pow(big_r, dim as u32) - &rd)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeBounds {
    pub pass: bool,
    /// Smallest `min‖x‖∞ − lower` over boxes of `A_n`, `n ≥ 1`.
    #[serde(with = "rational::serde_rat")]
    pub worst_lower_margin: Rat,
    /// Smallest `upper − max‖x‖∞`.
    #[serde(with = "rational::serde_rat")]
    pub worst_upper_margin: Rat,
}

/// Checks `rR/(R−r)(1−t^n) ≤ ‖x‖∞ ≤ rR/(R−r)(1 − t^n(r+R)/(2R))`, `t = r/R`,
/// on every box of `A_n` with `n ≥ 1`.
pub fn verify_size_bounds(levels: &[Vec<Cuboid>], r: &Rat, big_r: &Rat) -> SizeBounds {
    let c = r * big_r / (big_r - r);
    let t = r / big_r;
    let mut lower_margin: Option<Rat> = None;
    let mut upper_margin: Option<Rat> = None;
    for (n, level) in levels.iter().enumerate().skip(1) {
        let tn = rational::pow(&t, n as u32);
        let lower = &c * (Rat::one() - &tn);
        let upper = &c * (Rat::one() - &tn * (r + big_r) / (big_r * Rat::from_integer(2.into())));
        for b in level {
            let (lo, hi) = b.sup_norm_range();
            let ml = lo - &lower;
            let mu = &upper - hi;
            if lower_margin.as_ref().is_none_or(|m| ml < *m) {
                lower_margin = Some(ml);
            }
            if upper_margin.as_ref().is_none_or(|m| mu < *m) {
                upper_margin = Some(mu);
            }
        }
    }
    let lm = lower_margin.unwrap_or_else(Rat::zero);
    let um = upper_margin.unwrap_or_else(Rat::zero);
    SizeBounds {
        pass: !lm.is_negative() && !um.is_negative(),
        worst_lower_margin: lm,
        worst_upper_margin: um,
    }
}

/// The truncated construction and everything needed to re-verify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletSetBundle {
    pub dim: usize,
    #[serde(with = "rational::serde_rat")]
    pub r: Rat,
    #[serde(rename = "R", with = "rational::serde_rat")]
    pub big_r: Rat,
    pub depth: usize,
    pub levels: Vec<Vec<Cuboid>>,
    pub u: BoxSet,
    /// Scalar dilation `a = R/r`.
    #[serde(with = "rational::serde_rat")]
    pub dilation: Rat,
    /// Side of the congruence lattice `Rℤ^d`.
    #[serde(with = "rational::serde_rat")]
    pub congruence_side: Rat,
    /// Spacing of the translation lattice `(1/R)ℤ^d`.
    #[serde(with = "rational::serde_rat")]
    pub translation_step: Rat,
    /// `Σ_{i≥N} μ(A_i)`: bound on every truncation defect.
    #[serde(with = "rational::serde_rat")]
    pub tail: Rat,
}

pub fn build_wavelet_set(r: &Rat, big_r: &Rat, depth: usize, dim: usize) -> Result<WaveletSetBundle> {
    let levels = iterate_a(r, big_r, depth, dim)?;
    let all: Vec<Cuboid> = levels.iter().flatten().cloned().collect();
    let union = BoxSet::normalize(dim, all)?;
    let a = big_r / r;
    let u = union.scale(&a)?.subtract(&union)?;
    Ok(WaveletSetBundle {
        dim,
        r: r.clone(),
        big_r: big_r.clone(),
        depth,
        levels,
        u,
        dilation: a,
        congruence_side: big_r.clone(),
        translation_step: big_r.recip(),
        tail: geometric_tail(r, big_r, depth, dim),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongruenceReport {
    pub max_multiplicity: u64,
    /// Measure of the cube where the multiplicity is not 1.
    #[serde(with = "rational::serde_rat")]
    pub exception_measure: Rat,
    pub pieces: usize,
}

/// Folds `set` into `[-R/2, R/2)^d` modulo `Rℤ^d`.
pub fn verify_congruence(set: &BoxSet, side: &Rat) -> Result<CongruenceReport> {
    let d = set.dim();
    let anchor = vec![-side / Rat::from_integer(2.into()); d];
    let folded = set.fold_mod(side, &anchor)?;
    let cube = rational::pow(side, d as u32);
    let mut single = Rat::zero();
    let mut max_multiplicity = 0;
    for (b, m) in &folded {
        max_multiplicity = max_multiplicity.max(*m);
        if *m == 1 {
            single += b.measure();
        }
    }
    let pieces = set.congruence_partition(side, &anchor)?.len();
    Ok(CongruenceReport {
        max_multiplicity,
        exception_measure: cube - single,
        pieces,
    })
}

/// The pieces `E_s` with `set = ∪ (E_s + R s)` and `∪ E_s ⊆ [-R/2, R/2)^d`.
pub fn congruence_pieces(set: &BoxSet, side: &Rat) -> Result<Vec<(Vec<BigInt>, BoxSet)>> {
    let anchor = vec![-side / Rat::from_integer(2.into()); set.dim()];
    set.congruence_partition(side, &anchor)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport {
    /// `(j, μ(U ∩ a^j U))` for `1 ≤ |j| ≤ jmax`.
    pub overlaps: Vec<(i32, String)>,
    #[serde(skip)]
    pub overlap_values: Vec<(i32, Rat)>,
    /// `μ(ring ∖ ∪_{|j|≤jmax} a^j U)` for the ring `r' ≤ ‖ω‖∞ < a r'`.
    #[serde(with = "rational::serde_rat")]
    pub coverage_deficit: Rat,
    #[serde(with = "rational::serde_rat")]
    pub ring_inner: Rat,
}

impl TilingReport {
    pub fn max_overlap(&self) -> Rat {
        self.overlap_values
            .iter()
            .map(|(_, m)| m.clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

/// Overlaps of `set` with its dilates and coverage of one dilation ring.
/// `side` is the cube side `R`; the ring's inner radius is `R/(a−1)`.
pub fn verify_dilation_tiling(set: &BoxSet, a: &Rat, side: &Rat, jmax: u32) -> Result<TilingReport> {
    if *a <= Rat::one() {
        return Err(Error::InvalidParameter("dilation factor must exceed 1".into()));
    }
    let d = set.dim();
    let js: Vec<i32> = (1..=jmax as i32).flat_map(|j| [j, -j]).collect();
    let overlap_values: Vec<(i32, Rat)> = js
        .par_iter()
        .map(|&j| {
            let s = if j >= 0 { rational::pow(a, j as u32) } else { rational::pow(a, (-j) as u32).recip() };
            Ok((j, set.intersect(&set.scale(&s)?)?.measure()))
        })
        .collect::<Result<_>>()?;
    let inner = side / (a - Rat::one());
    let half_out = a * &inner;
    let ring = BoxSet::from_box(Cuboid::centered(half_out, d)?)
        .subtract(&BoxSet::from_box(Cuboid::centered(inner.clone(), d)?))?;
    let mut cover = set.clone();
    for &j in &js {
        let s = if j >= 0 { rational::pow(a, j as u32) } else { rational::pow(a, (-j) as u32).recip() };
        cover = cover.union(&set.scale(&s)?)?;
    }
    let coverage_deficit = ring.subtract(&cover)?.measure();
    Ok(TilingReport {
        overlaps: overlap_values.iter().map(|(j, m)| (*j, rational::format(m))).collect(),
        overlap_values,
        coverage_deficit,
        ring_inner: inner,
    })
}

/// Geometry checks of a bundle: disjointness, size bounds, measures,
/// congruence and dilation tiling.
pub fn verify_bundle(bundle: &WaveletSetBundle) -> Result<Report> {
    let mut rep = Report::new("wavelet set");
    let d = bundle.dim;
    let (r, big_r) = (&bundle.r, &bundle.big_r);
    rep.push(Check::holds(
        "r below R/3",
        "3r < R",
        r * Rat::from_integer(3.into()) < *big_r,
    ));
    let counts_ok = bundle.levels.iter().all(|l| l.len() == 1 << d);
    rep.push(Check::holds("quadrant boxes per level", "|A_i| = 2^d", counts_ok));
    let sets: Vec<BoxSet> = bundle
        .levels
        .iter()
        .map(|l| BoxSet::normalize(d, l.clone()))
        .collect::<Result<_>>()?;
    let mut disjoint = true;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].intersect(&sets[j])?.is_empty() {
                disjoint = false;
            }
        }
    }
    rep.push(Check::holds("levels pairwise disjoint", "A_i ∩ A_j = ∅", disjoint));
    let cube = BoxSet::from_box(Cuboid::centered(big_r / Rat::from_integer(2.into()), d)?);
    let ring = cube.subtract(&sets[0])?;
    let inside = sets[1..]
        .iter()
        .map(|s| s.subtract(&ring).map(|x| x.is_empty()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|x| x);
    rep.push(Check::holds("levels inside cube minus A_0", "A_i ⊆ B∞(0,R/2) ∖ A_0", inside));
    let sb = verify_size_bounds(&bundle.levels, r, big_r);
    rep.push(Check::holds("size bounds of A_n", "lower(n) ≤ ‖x‖∞ ≤ upper(n)", sb.pass));
    rep.record("size_bounds", &sb);

    let partial: Rat = sets[1..].iter().map(BoxSet::measure).sum();
    let limit = limit_measure(r, big_r, d);
    let rho = rational::pow(&(r / big_r), d as u32);
    let allowance = rational::pow(&rho, bundle.depth as u32) / (Rat::one() - &rho);
    let gap = (&limit - &partial).abs();
    rep.push(Check::le(
        "measure of levels",
        "|Σμ(A_i) − r^{2d}/(R^d−r^d)| ≤ ρ^N/(1−ρ)",
        rational::to_f64(&gap),
        rational::to_f64(&allowance),
    ));
    rep.record("levels_measure", rational::format(&partial));

    let tail = &bundle.tail;
    let mu = bundle.u.measure();
    let cube_measure = rational::pow(big_r, d as u32);
    rep.push(Check::le(
        "measure of U",
        "|μ(U) − R^d| ≤ tail",
        rational::to_f64(&(&mu - &cube_measure).abs()),
        rational::to_f64(tail),
    ));
    rep.record("u_measure", rational::format(&mu));
    rep.record("tail", rational::format(tail));

    let cong = verify_congruence(&bundle.u, &bundle.congruence_side)?;
    rep.push(Check::le(
        "congruence multiplicity",
        "fold multiplicity ≤ 1",
        cong.max_multiplicity as f64,
        1.0,
    ));
    rep.push(Check::le(
        "congruence exception",
        "μ{multiplicity ≠ 1} ≤ 2·tail",
        rational::to_f64(&cong.exception_measure),
        rational::to_f64(&(tail * Rat::from_integer(2.into()))),
    ));
    rep.record("congruence", &cong);

    let til = verify_dilation_tiling(&bundle.u, &bundle.dilation, &bundle.congruence_side, 3)?;
    for (j, m) in &til.overlap_values {
        rep.push(Check::le(
            &format!("dilation overlap j={j}"),
            "μ(U ∩ a^j U) ≤ tail",
            rational::to_f64(m),
            rational::to_f64(tail),
        ));
    }
    rep.push(Check::le(
        "dilation coverage",
        "μ(ring ∖ ∪_{|j|≤3} a^j U) ≤ tail",
        rational::to_f64(&til.coverage_deficit),
        rational::to_f64(tail),
    ));
    rep.record("tiling", &til);
    Ok(rep)
}

/// Parameters of the Riesz construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RieszParams {
    pub epsilon: f64,
    #[serde(with = "rational::serde_rat")]
    pub r: Rat,
    #[serde(rename = "R", with = "rational::serde_rat")]
    pub big_r: Rat,
    /// `max |ĝ|²` on `[-R/2, R/2)^d`.
    pub m: f64,
    pub lambda: f64,
    pub depth: usize,
    #[serde(with = "rational::serde_rat")]
    pub tail: Rat,
}

fn cube(half: &Rat, d: usize) -> Result<BoxSet> {
    Ok(BoxSet::from_box(Cuboid::centered(half.clone(), d)?))
}

fn max_sq_on(f: &FreqFn, set: &BoxSet) -> f64 {
    let b = set.boxes();
    f.float_pieces()
        .iter()
        .filter(|p| {
            b.iter().any(|c| {
                let (lo, hi) = (c.lo_f64(), c.hi_f64());
                (0..lo.len()).all(|a| p.lo[a] < hi[a] && p.hi[a] > lo[a])
            })
        })
        .map(|p| p.value.norm_sqr())
        .fold(0.0, f64::max)
}

/// `R = 2^k` with small tail outside the cube, then `r` halved from `R/4`
/// until the energy near the origin is small, `λ = ε/(8R^{d/2})`, and `N`
/// the first depth with `Σ_{i≥N} μ(A_i) ≤ tol`.
pub fn choose_riesz_params(f: &FreqFn, epsilon: f64, tol: Option<f64>) -> Result<RieszParams> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let d = f.dim();
    let budget = epsilon * epsilon / 16.0;
    let two = Rat::from_integer(2.into());
    let mut k = -8;
    let big_r = loop {
        let big_r = rational::pow2(k);
        let t = freqfn::tail_energy(f, &Region::Boxes(cube(&(&big_r / &two), d)?))?;
        if t < budget {
            break big_r;
        }
        k += 1;
        if k > 60 {
            return Err(Error::Budget("no cube of side up to 2^60 leaves a small enough tail".into()));
        }
    };
    let m = max_sq_on(f, &cube(&(&big_r / &two), d)?);
    let mut r = &big_r / Rat::from_integer(4.into());
    for _ in 0..200 {
        let near = freqfn::energy_within(f, &cube(&(&r / &two), d)?)?;
        let rd = rational::to_f64(&rational::pow(&r, d as u32));
        if near < budget && m * rd < budget {
            let lambda = epsilon / (8.0 * rational::to_f64(&big_r).powf(d as f64 / 2.0));
            let tol = tol.unwrap_or(1e-9) * rational::to_f64(&rational::pow(&big_r, d as u32));
            let mut depth = 1;
            while rational::to_f64(&geometric_tail(&r, &big_r, depth, d)) > tol {
                depth += 1;
            }
            return Ok(RieszParams {
                epsilon,
                tail: geometric_tail(&r, &big_r, depth, d),
                r,
                big_r,
                m,
                lambda,
                depth,
            });
        }
        r /= &two;
    }
    Err(Error::Budget("no admissible r found".into()))
}

/// `ĝ` on `U ∩ {|ĝ| > λ}`, `λ` on the rest of `U`. Also returns `∫_U |ĝ − ψ̂|²`.
pub fn floor_on_set(g: &FreqFn, set: &BoxSet, lambda: f64) -> Result<(StepFn, f64)> {
    let d = g.dim();
    let level = freqfn::level_set(g, lambda);
    let mut pieces: Vec<Piece> = Vec::new();
    match g {
        FreqFn::Step(s) => {
            for p in s.pieces().iter().filter(|p| p.value.norm() > lambda) {
                for b in set.boxes() {
                    if let Some(region) = p.region.intersect(b) {
                        pieces.push(Piece { region, value: p.value });
                    }
                }
            }
        }
        FreqFn::Grid(grid) => {
            let dom = grid.domain();
            let steps: Vec<Rat> = (0..d).map(|a| grid.step(a)).collect();
            for b in set.boxes() {
                let Some(clip) = b.intersect(dom) else { continue };
                let ranges: Vec<Vec<usize>> = (0..d)
                    .map(|a| {
                        let t0 = (&clip.lo()[a] - &dom.lo()[a]) / &steps[a];
                        let t1 = (&clip.hi()[a] - &dom.lo()[a]) / &steps[a];
                        let i0 = rational::floor_int(&t0);
                        let i1 = rational::ceil_int(&t1);
                        let i0: usize = i0.try_into().unwrap_or(0);
                        let i1: usize = i1.try_into().unwrap_or(0);
                        (i0..i1.min(grid.cells()[a])).collect()
                    })
                    .collect();
                for idx in crate::boxcalc::product(&ranges) {
                    let idx: Vec<usize> = idx.into_iter().copied().collect();
                    let flat = grid.flatten(&idx);
                    let v = grid.values()[flat];
                    if v.norm() > lambda {
                        if let Some(region) = grid.cell_box(flat).intersect(&clip) {
                            pieces.push(Piece { region, value: v });
                        }
                    }
                }
            }
        }
    }
    let rest = set.subtract(&level)?;
    let lam = Complex64::new(lambda, 0.0);
    if lambda > 0.0 {
        pieces.extend(rest.boxes().iter().map(|b| Piece {
            region: b.clone(),
            value: lam,
        }));
    }
    let term = freqfn::distance_sq_to_constant_on(g, &rest, lambda)?;
    Ok((StepFn::from_disjoint(d, pieces), term))
}

/// Result of the Riesz construction.
#[derive(Clone, Debug)]
pub struct RieszOutcome {
    pub psi: StepFn,
    pub dilation: Dilation,
    pub translations: Lattice,
    pub bundle: WaveletSetBundle,
    pub params: RieszParams,
    pub report: Report,
}

/// Exponential index set `[-m, m]^d` used for the finite-section Riesz bounds.
pub fn default_riesz_index(dim: usize) -> Vec<Vec<i64>> {
    grammian::centered_index_set(if dim == 1 { 10 } else { 2 }, dim)
}

/// Extreme eigenvalues of the Gram matrix of `{ψ̂ e^{-2πiγ·ω}}` over the
/// lattice points indexed by `index`.
pub fn riesz_bound_estimate(psi: &FreqFn, lattice: &Lattice, index: &[Vec<i64>]) -> Result<(f64, f64)> {
    let gram = grammian::translate_gram_matrix(psi, lattice, index)?;
    let ev = linalg::hermitian_eigenvalues(&gram);
    let lower = ev[0];
    let upper = *ev.last().expect("nonempty");
    if !(lower > 0.0) {
        return Err(Error::Singular);
    }
    Ok((lower, upper))
}

pub fn construct_riesz_generator(f: &FreqFn, epsilon: f64) -> Result<RieszOutcome> {
    construct_riesz_with(f, epsilon, None, &default_riesz_index(f.dim()))
}

pub fn construct_riesz_with(
    f: &FreqFn,
    epsilon: f64,
    tol: Option<f64>,
    index: &[Vec<i64>],
) -> Result<RieszOutcome> {
    let d = f.dim();
    let params = choose_riesz_params(f, epsilon, tol)?;
    let bundle = build_wavelet_set(&params.r, &params.big_r, params.depth, d)?;
    let lambda = params.lambda;
    let (psi, level_term) = floor_on_set(f, &bundle.u, lambda)?;
    let budget = epsilon * epsilon / 16.0;
    let two = Rat::from_integer(2.into());
    let mut rep = verify_bundle(&bundle)?;
    rep.title = "riesz generator".into();

    let outer = freqfn::tail_energy(f, &Region::Boxes(cube(&(&params.big_r / &two), d)?))?;
    let near = freqfn::energy_within(f, &cube(&(&params.r / &two), d)?)?;
    let inner_union = BoxSet::normalize(d, bundle.levels[1..].iter().flatten().cloned().collect())?;
    let on_levels = freqfn::energy_within(f, &inner_union)?;
    let rd = rational::to_f64(&rational::pow(&params.r, d as u32));
    let bound = params.m * rd;
    rep.push(Check::lt("tail outside cube", "∫_{ℝ^d∖B∞(0,R/2)} |ĝ|² < ε²/16", outer, budget));
    rep.push(Check::lt("energy on A_0", "∫_{B∞(0,r/2)} |ĝ|² < ε²/16", near, budget));
    rep.push(Check::lt("energy bound on later levels", "m r^d < ε²/16", bound, budget));
    rep.push(Check::le("energy on later levels", "∫_{∪A_i} |ĝ|² ≤ m r^d", on_levels, bound));
    rep.push(Check::lt("level-set term", "∫_U |ĝ − ψ̂|² < ε²/16", level_term, budget));

    let psi_f = FreqFn::Step(psi.clone());
    let distance = freqfn::l2_distance(f, &psi_f)?;
    rep.push(Check::lt("distance", "‖f̂ − ψ̂‖₂ < ε", distance, epsilon));
    let inf = psi_f.inf_abs_on_support();
    let sup = psi_f.sup_abs();
    let sup_g = f.sup_abs();
    rep.push(Check::ge("lower value bound", "|ψ̂| ≥ λ on U", inf, lambda));
    rep.push(Check::le("upper value bound", "|ψ̂| ≤ max(λ, sup|ĝ|)", sup, lambda.max(sup_g)));
    let supp_ok = psi.pieces().iter().all(|p| bundle.u.measure_within(&p.region) == p.region.measure());
    rep.push(Check::holds("support inside U", "supp ψ̂ ⊆ U", supp_ok));

    let translations = Lattice::scalar(bundle.translation_step.clone(), d)?;
    let (lower, upper) = riesz_bound_estimate(&psi_f, &translations, index)?;
    let big_rd = rational::to_f64(&rational::pow(&params.big_r, d as u32));
    rep.push(Check::gt("riesz lower bound positive", "λ_min(G) > 0", lower, 0.0));
    rep.push(Check::ge(
        "riesz lower bracket",
        "λ_min(G) ≥ inf|ψ̂|² R^d (1 − 10⁻⁶)",
        lower,
        inf * inf * big_rd * (1.0 - 1e-6),
    ));
    rep.push(Check::le(
        "riesz upper bracket",
        "λ_max(G) ≤ sup|ψ̂|² R^d (1 + 10⁻⁶)",
        upper,
        sup * sup * big_rd * (1.0 + 1e-6),
    ));

    rep.record("epsilon", epsilon);
    rep.record("distance", distance);
    rep.record("lambda", lambda);
    rep.record("r", rational::format(&params.r));
    rep.record("R", rational::format(&params.big_r));
    rep.record("depth", params.depth);
    rep.record("budget.tail_outside_cube", outer);
    rep.record("budget.energy_on_a0", near);
    rep.record("budget.energy_bound_later_levels", bound);
    rep.record("budget.level_set_term", level_term);
    rep.record("riesz.lower", lower);
    rep.record("riesz.upper", upper);
    rep.record("riesz.sections", index.len());

    let dilation = Dilation::scalar(bundle.dilation.clone(), d)?;
    Ok(RieszOutcome {
        psi,
        dilation,
        translations,
        bundle,
        params,
        report: rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn iv(a: Rat, b: Rat) -> Cuboid {
        Cuboid::interval(a, b).unwrap()
    }

    #[test]
    fn tilde_t_examples() {
        let r4 = int(4);
        assert_eq!(tilde_t_boxes(&[iv(int(0), frac(1, 2))], &r4).unwrap(), vec![iv(int(4), frac(9, 2))]);
        assert_eq!(
            tilde_t_boxes(&[iv(frac(-1, 2), int(0))], &r4).unwrap(),
            vec![iv(frac(-9, 2), int(-4))]
        );
        let b = Cuboid::new(vec![int(0), int(-1)], vec![int(1), int(0)]).unwrap();
        let t = tilde_t_boxes(&[b], &r4).unwrap();
        assert_eq!(t[0].lo(), &[int(4), int(-5)]);
        assert!(matches!(
            tilde_t_boxes(&[iv(int(-1), int(1))], &r4),
            Err(Error::Straddle { axis: 0 })
        ));
    }

    #[test]
    fn first_levels_by_hand() {
        let levels = iterate_a(&int(1), &int(4), 2, 1).unwrap();
        let a1 = BoxSet::normalize(1, levels[1].clone()).unwrap();
        assert_eq!(
            a1,
            BoxSet::normalize(1, vec![iv(int(1), frac(9, 8)), iv(frac(-9, 8), int(-1))]).unwrap()
        );
        assert_eq!(a1.measure(), frac(1, 4));
        assert!(levels[2].contains(&iv(frac(5, 4), frac(41, 32))));
        assert!(!crate::boxcalc::raster_contains(&a1, &[frac(9, 8)]));
        assert!(verify_size_bounds(&levels, &int(1), &int(4)).pass);
        assert!(iterate_a(&int(2), &int(4), 1, 1).is_err());
    }

    #[test]
    fn wavelet_set_by_hand() {
        let w = build_wavelet_set(&int(1), &int(4), 2, 1).unwrap();
        let pos = w.u.intersect(&BoxSet::from_box(iv(int(0), int(100)))).unwrap();
        let expect = BoxSet::normalize(
            1,
            vec![
                iv(frac(1, 2), int(1)),
                iv(frac(9, 8), frac(5, 4)),
                iv(frac(41, 32), int(2)),
                iv(int(4), frac(9, 2)),
                iv(int(5), frac(41, 8)),
            ],
        )
        .unwrap();
        assert_eq!(pos, expect);
        assert!(w.u.intersect(&BoxSet::normalize(1, w.levels[0].clone()).unwrap()).unwrap().is_empty());
        assert_eq!(w.u.measure(), int(4) - frac(1, 16));
    }

    #[test]
    fn bundle_checks_pass_in_one_and_two_dimensions() {
        for d in [1, 2] {
            let w = build_wavelet_set(&int(1), &int(4), 6, d).unwrap();
            let rep = verify_bundle(&w).unwrap();
            assert!(rep.all_pass(), "{:?}", rep.failures());
        }
    }

    #[test]
    fn engineered_failures() {
        let c = BoxSet::from_box(Cuboid::centered(int(2), 1).unwrap());
        let cong = verify_congruence(&c, &int(4)).unwrap();
        assert_eq!((cong.max_multiplicity, cong.exception_measure.clone()), (1, int(0)));
        let mut shifted = c.boxes().to_vec();
        shifted.push(iv(int(-1), int(0)).translate(&[int(4)]));
        let over = BoxSet::normalize(1, shifted).unwrap();
        assert_eq!(verify_congruence(&over, &int(4)).unwrap().max_multiplicity, 2);
        let til = verify_dilation_tiling(&c, &int(4), &int(4), 1).unwrap();
        assert!(til.max_overlap() > int(0));
    }

    #[test]
    fn constant_generator_has_orthonormal_exponentials() {
        let w = build_wavelet_set(&int(1), &int(4), 12, 1).unwrap();
        let psi = FreqFn::Step(StepFn::indicator(&w.u, Complex64::new(0.5, 0.0)));
        let lat = Lattice::scalar(w.translation_step.clone(), 1).unwrap();
        let (lo, hi) = riesz_bound_estimate(&psi, &lat, &default_riesz_index(1)).unwrap();
        assert!((lo - 1.0).abs() < 1e-6 && (hi - 1.0).abs() < 1e-6, "{lo} {hi}");
        assert!(riesz_bound_estimate(&psi, &lat, &[]).is_err());
    }

    #[test]
    fn riesz_for_box_target() {
        let f = FreqFn::Step(StepFn::indicator(
            &BoxSet::from_box(iv(int(-2), int(2))),
            Complex64::new(0.5, 0.0),
        ));
        let out = construct_riesz_generator(&f, 0.5).unwrap();
        assert!(out.report.all_pass(), "{:?}", out.report.failures());
    }
}
