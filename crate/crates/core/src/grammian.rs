//! p-Grammians `f_{b,p}(ω) = (|det b| Σ_s |f(b(ω+s))|^p)^{1/p}` on the unit
//! cube, the normalization `u_g`, indicator counting, and Gram matrices of
//! translates.
//!
//! Only positive diagonal rational `b` is accepted. Every piece of `f` is
//! pulled back by `b⁻¹` and folded modulo `ℤ^d` exactly, so the shift sum is
//! finite and needs no cutoff.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::boxcalc::{period_segments, product, CellGrid, Cuboid, PeriodSegment};
use crate::error::{Error, Result};
use crate::freqfn::{FreqFn, GridFn, Lattice, StepFn};
use crate::rational::{self, Rat};

fn check_b(b: &[Rat], dim: usize) -> Result<()> {
    if b.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: b.len(),
        });
    }
    if let Some(axis) = b.iter().position(Zero::is_zero) {
        return Err(Error::ZeroScale { axis });
    }
    if b.iter().any(Signed::is_negative) {
        return Err(Error::InvalidParameter("b must have positive diagonal entries".into()));
    }
    Ok(())
}

/// Operator norm of a diagonal matrix.
pub fn diag_norm(b: &[Rat]) -> f64 {
    b.iter().map(|x| rational::to_f64(x).abs()).fold(0.0, f64::max)
}

fn det(b: &[Rat]) -> Rat {
    b.iter().fold(Rat::one(), |acc, x| acc * x)
}

/// Pieces of `f` folded into the unit cube: per item, the value and one list
/// of period segments per axis.
struct Folded {
    grid: CellGrid,
    /// `(cell ranges, multiplicity, piece index)`
    terms: Vec<(Vec<(usize, usize)>, f64, usize)>,
    values: Vec<Complex64>,
    /// Exact boxes of the pieces, kept only for step functions.
    step_boxes: Option<Vec<Cuboid>>,
}

fn fold(f: &FreqFn, b: &[Rat]) -> Result<Folded> {
    let d = f.dim();
    check_b(b, d)?;
    let zero = Rat::zero();
    let one = Rat::one();
    // pools[a][k]: segments of the k-th interval on axis a
    let mut pools: Vec<Vec<Vec<PeriodSegment>>> = vec![Vec::new(); d];
    let mut items: Vec<(Vec<usize>, Complex64)> = Vec::new();
    let mut step_boxes = None;
    match f {
        FreqFn::Step(s) => {
            for p in s.pieces() {
                let mut idx = Vec::with_capacity(d);
                for a in 0..d {
                    pools[a].push(period_segments(
                        &(&p.region.lo()[a] / &b[a]),
                        &(&p.region.hi()[a] / &b[a]),
                        &zero,
                        &one,
                    ));
                    idx.push(pools[a].len() - 1);
                }
                items.push((idx, p.value));
            }
            step_boxes = Some(s.pieces().iter().map(|p| p.region.clone()).collect());
        }
        FreqFn::Grid(g) => {
            for a in 0..d {
                let h = g.step(a);
                let mut lo = g.domain().lo()[a].clone();
                for _ in 0..g.cells()[a] {
                    let hi = &lo + &h;
                    pools[a].push(period_segments(&(&lo / &b[a]), &(&hi / &b[a]), &zero, &one));
                    lo = hi;
                }
            }
            for (k, &v) in g.values().iter().enumerate() {
                if v != Complex64::zero() {
                    items.push((g.unflatten(k), v));
                }
            }
        }
    }
    let mut breaks: Vec<Vec<Rat>> = vec![vec![zero.clone(), one.clone()]; d];
    for a in 0..d {
        for segs in &pools[a] {
            for s in segs {
                breaks[a].push(s.lo.clone());
                breaks[a].push(s.hi.clone());
            }
        }
    }
    let grid = CellGrid::new(breaks);
    let ranges: Vec<Vec<Vec<(usize, usize, u64)>>> = (0..d)
        .map(|a| {
            pools[a]
                .iter()
                .map(|segs| {
                    segs.iter()
                        .map(|s| (grid.break_index(a, &s.lo), grid.break_index(a, &s.hi), s.count))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut terms = Vec::new();
    let mut values = Vec::with_capacity(items.len());
    for (item, (idx, v)) in items.into_iter().enumerate() {
        let axes: Vec<Vec<(usize, usize, u64)>> =
            (0..d).map(|a| ranges[a][idx[a]].clone()).collect();
        for combo in product(&axes) {
            let mult = combo.iter().map(|r| r.2 as f64).product();
            terms.push((combo.iter().map(|r| (r.0, r.1)).collect(), mult, item));
        }
        values.push(v);
    }
    Ok(Folded {
        grid,
        terms,
        values,
        step_boxes,
    })
}

/// A `ℤ^d`-periodic function given by its values on a rectilinear partition
/// of `Q = [0,1)^d`.
#[derive(Clone, Debug)]
pub struct PeriodicFn {
    grid: CellGrid,
    values: Vec<f64>,
    support: Vec<bool>,
    measures: Vec<f64>,
}

impl PeriodicFn {
    fn new(grid: CellGrid, values: Vec<f64>, support: Vec<bool>) -> Self {
        let measures = (0..grid.len())
            .map(|k| rational::to_f64(&grid.cell_measure(k)))
            .collect();
        PeriodicFn {
            grid,
            values,
            support,
            measures,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Cells of the partition with their values.
    pub fn cells(&self) -> Vec<(Cuboid, f64)> {
        self.grid.merged_runs(&self.values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The periodic extension evaluated at `ω`.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut idx = Vec::with_capacity(self.dim());
        for (a, &x) in point.iter().enumerate() {
            let t = x - x.floor();
            let br = &self.grid.breaks[a];
            let pos = br.partition_point(|r| rational::to_f64(r) <= t);
            idx.push(pos.saturating_sub(1).min(self.grid.shape[a] - 1));
        }
        self.values[self.grid.flatten(&idx)]
    }

    /// `E ∩ Q` where `E = {value > 0}`, decided from exact support counts.
    pub fn support(&self) -> crate::boxcalc::BoxSet {
        let raw = (0..self.grid.len())
            .filter(|&k| self.support[k])
            .map(|k| self.grid.cell(k))
            .collect();
        crate::boxcalc::BoxSet::normalize(self.dim(), raw).expect("cells share a dimension")
    }

    pub fn support_measure(&self) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.support[k])
            .map(|k| self.measures[k])
            .sum()
    }

    /// Whether the value is positive on all of `Q`.
    pub fn has_full_support(&self) -> bool {
        self.support.iter().all(|&s| s)
    }

    /// `(∫_Q |value − c|^p)^{1/p}`.
    pub fn lp_distance_to_const(&self, c: f64, p: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.measures)
            .map(|(v, m)| (v - c).abs().powf(p) * m)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `max_Q |value − c|` over cells of positive measure.
    pub fn sup_distance_to_const(&self, c: f64) -> f64 {
        self.values.iter().map(|v| (v - c).abs()).fold(0.0, f64::max)
    }

    /// `‖value − χ_{E∩Q}‖_{L²(Q)}`.
    pub fn l2_distance_to_support_indicator(&self) -> f64 {
        (0..self.values.len())
            .map(|k| {
                let t = if self.support[k] { 1.0 } else { 0.0 };
                (self.values[k] - t).powi(2) * self.measures[k]
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_distance_to_const(0.0, p)
    }

    /// `max |value − t|` over the support, with `t` the target on the support.
    pub fn sup_deviation_on_support(&self, target: f64) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.support[k])
            .map(|k| (self.values[k] - target).abs())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖_{L²(Q)}` on the common refinement.
    pub fn l2_distance(&self, other: &PeriodicFn) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let breaks: Vec<Vec<Rat>> = (0..self.dim())
            .map(|a| {
                let mut v = self.grid.breaks[a].clone();
                v.extend(other.grid.breaks[a].iter().cloned());
                v
            })
            .collect();
        let common = CellGrid::new(breaks);
        let mut s = 0.0;
        for k in 0..common.len() {
            let cell = common.cell(k);
            let i: Vec<usize> = (0..self.dim())
                .map(|a| self.grid.locate(a, &cell.lo()[a]).expect("inside Q"))
                .collect();
            let j: Vec<usize> = (0..self.dim())
                .map(|a| other.grid.locate(a, &cell.lo()[a]).expect("inside Q"))
                .collect();
            let diff = self.values[self.grid.flatten(&i)] - other.values[other.grid.flatten(&j)];
            s += diff * diff * rational::to_f64(&cell.measure());
        }
        Ok(s.sqrt())
    }

    /// The restriction to `Q` as a step function.
    pub fn to_step(&self) -> StepFn {
        let pieces = self
            .cells()
            .into_iter()
            .map(|(c, v)| (c, Complex64::new(v, 0.0)))
            .collect();
        StepFn::new(self.dim(), pieces).expect("cells of a partition are disjoint")
    }
}

/// `f_{b,p}` on `Q`.
pub fn grammian_p(f: &FreqFn, b: &[Rat], p: f64) -> Result<PeriodicFn> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    let folded = fold(f, b)?;
    let detb = rational::to_f64(&det(b));
    let powers: Vec<f64> = folded.values.iter().map(|v| v.norm().powf(p)).collect();
    let sums: Vec<f64> = folded.grid.accumulate(
        folded
            .terms
            .iter()
            .map(|(r, mult, item)| (r.clone(), detb * mult * powers[*item])),
    );
    let counts: Vec<i64> = folded
        .grid
        .accumulate(folded.terms.iter().map(|(r, _, _)| (r.clone(), 1i64)));
    let support: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    let values = sums
        .iter()
        .zip(&support)
        .map(|(&s, &on)| if on { s.max(0.0).powf(1.0 / p) } else { 0.0 })
        .collect();
    Ok(PeriodicFn::new(folded.grid, values, support))
}

/// Exact `(‖g_b‖²_{L²(Q)}, ‖g‖²₂)` for a step function; the two agree.
pub fn norm_gram_exact(g: &StepFn, b: &[Rat]) -> Result<(Rat, Rat)> {
    let f = FreqFn::Step(g.clone());
    let folded = fold(&f, b)?;
    let detb = det(b);
    let energy: Vec<Rat> = folded.values.iter().map(|&v| exact_sq(v)).collect::<Result<_>>()?;
    let sums: Vec<Rat> = folded.grid.accumulate(folded.terms.iter().map(|(r, mult, item)| {
        let m = Rat::from_integer(BigInt::from(*mult as u64));
        (r.clone(), &detb * m * &energy[*item])
    }));
    let lhs: Rat = sums
        .iter()
        .enumerate()
        .map(|(k, s)| s * folded.grid.cell_measure(k))
        .sum();
    let boxes = folded.step_boxes.expect("step input");
    let rhs: Rat = boxes.iter().zip(&energy).map(|(c, e)| c.measure() * e).sum();
    Ok((lhs, rhs))
}

/// Shift counts for an indicator: `n_i` cells `bQ + bs` inside `I` and `n_o`
/// cells meeting both `I` and its complement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrammianCounts {
    #[serde(serialize_with = "ser_big")]
    pub n_i: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub n_o: BigInt,
    #[serde(with = "rational::serde_rat")]
    pub det_b: Rat,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl GrammianCounts {
    /// `|det b| n_i ≤ μ(I) ≤ |det b| (n_i + n_o)`, exactly.
    pub fn brackets(&self, measure: &Rat) -> bool {
        let inner = &self.det_b * Rat::from_integer(self.n_i.clone());
        let outer = &self.det_b * Rat::from_integer(&self.n_i + &self.n_o);
        &inner <= measure && measure <= &outer
    }
}

pub fn indicator_grammian_counts(interval: &Cuboid, b: &[Rat]) -> Result<GrammianCounts> {
    check_b(b, interval.dim())?;
    let mut inside = BigInt::one();
    let mut touch = BigInt::one();
    for a in 0..interval.dim() {
        let lo = &interval.lo()[a] / &b[a];
        let hi = &interval.hi()[a] / &b[a];
        let i = rational::floor_int(&hi) - rational::ceil_int(&lo);
        inside *= i.max(BigInt::zero());
        touch *= rational::ceil_int(&hi) - rational::floor_int(&lo);
    }
    Ok(GrammianCounts {
        n_o: touch - &inside,
        n_i: inside,
        det_b: det(b),
    })
}

/// `u_g = g / g_b(b⁻¹·)` on `bE(g,b)`, zero elsewhere.
///
/// A grid stays a grid when every pulled-back cell sits inside one cell of the
/// Grammian's partition; otherwise the result is a step function.
pub fn normalize_u(g: &FreqFn, b: &[Rat]) -> Result<FreqFn> {
    let gb = grammian_p(g, b, 2.0)?;
    if let FreqFn::Grid(grid) = g {
        if let Some(u) = normalize_grid(grid, b, &gb) {
            return Ok(FreqFn::Grid(u));
        }
    }
    let step = match g {
        FreqFn::Step(s) => s.clone(),
        FreqFn::Grid(_) => StepFn::new(g.dim(), g.pieces())?,
    };
    normalize_step(&step, b, &gb).map(FreqFn::Step)
}

fn normalize_grid(g: &GridFn, b: &[Rat], gb: &PeriodicFn) -> Option<GridFn> {
    let d = g.dim();
    let mut cell_of: Vec<Vec<usize>> = Vec::with_capacity(d);
    for a in 0..d {
        let h = g.step(a);
        let mut lo = g.domain().lo()[a].clone();
        let mut v = Vec::with_capacity(g.cells()[a]);
        for _ in 0..g.cells()[a] {
            let hi = &lo + &h;
            let x0 = &lo / &b[a];
            let x1 = &hi / &b[a];
            let k = rational::floor_int(&x0);
            let t0 = &x0 - Rat::from_integer(k.clone());
            let t1 = &x1 - Rat::from_integer(k);
            let j = gb.grid.locate(a, &t0)?;
            if t1 > gb.grid.breaks[a][j + 1] {
                return None;
            }
            v.push(j);
            lo = hi;
        }
        cell_of.push(v);
    }
    Some(g.map_values(|k, z| {
        if z == Complex64::zero() {
            return z;
        }
        let idx = g.unflatten(k);
        let j: Vec<usize> = (0..d).map(|a| cell_of[a][idx[a]]).collect();
        let flat = gb.grid.flatten(&j);
        if gb.support[flat] && gb.values[flat] > 0.0 {
            z / gb.values[flat]
        } else {
            Complex64::zero()
        }
    }))
}

const MAX_SPLIT_PIECES: usize = 4_000_000;

/// Splits every piece of `s` along the pulled-back cells of `grid`:
/// `(region, piece index, flat cell)`.
fn split_by_cells(s: &StepFn, b: &[Rat], grid: &CellGrid) -> Result<Vec<(Cuboid, usize, usize)>> {
    let d = s.dim();
    let mut out = Vec::new();
    for (i, p) in s.pieces().iter().enumerate() {
        // per axis: (lo, hi, periodic cell) in pulled-back coordinates
        let mut axes: Vec<Vec<(Rat, Rat, usize)>> = Vec::with_capacity(d);
        for a in 0..d {
            let x0 = &p.region.lo()[a] / &b[a];
            let x1 = &p.region.hi()[a] / &b[a];
            let breaks = &grid.breaks[a];
            let mut parts = Vec::new();
            let mut k = rational::floor_int(&x0);
            let k_end = rational::ceil_int(&x1);
            while k < k_end {
                let base = Rat::from_integer(k.clone());
                for j in 0..breaks.len() - 1 {
                    let lo = (&base + &breaks[j]).max(x0.clone());
                    let hi = (&base + &breaks[j + 1]).min(x1.clone());
                    if lo < hi {
                        parts.push((lo, hi, j));
                    }
                }
                k += 1;
                if parts.len() > MAX_SPLIT_PIECES {
                    return Err(Error::Unsupported("normalization would need too many pieces".into()));
                }
            }
            axes.push(parts);
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if out.len() + total > MAX_SPLIT_PIECES {
            return Err(Error::Unsupported("normalization would need too many pieces".into()));
        }
        for combo in product(&axes) {
            let j: Vec<usize> = combo.iter().map(|c| c.2).collect();
            let lo = combo.iter().enumerate().map(|(a, c)| &c.0 * &b[a]).collect();
            let hi = combo.iter().enumerate().map(|(a, c)| &c.1 * &b[a]).collect();
            out.push((Cuboid::new(lo, hi)?, i, grid.flatten(&j)));
        }
    }
    Ok(out)
}

fn normalize_step(s: &StepFn, b: &[Rat], gb: &PeriodicFn) -> Result<StepFn> {
    let out = split_by_cells(s, b, &gb.grid)?
        .into_iter()
        .filter(|(_, _, cell)| gb.support[*cell] && gb.values[*cell] > 0.0)
        .map(|(region, i, cell)| crate::freqfn::Piece {
            region,
            value: s.pieces()[i].value / gb.values[cell],
        })
        .collect();
    Ok(StepFn::from_disjoint(s.dim(), out))
}

fn exact_sq(v: Complex64) -> Result<Rat> {
    Ok(rational::from_f64(v.re)?.pow(2) + rational::from_f64(v.im)?.pow(2))
}

/// `(u_g)_b²` on every cell of `E(g,b)`, in exact arithmetic.
///
/// `|u_g|² = |g|² / g_b²` is rational whenever `|g|²` is, so the squared
/// moduli of the normalized generator are built and refolded without rounding.
pub fn unit_grammian_sq_exact(g: &StepFn, b: &[Rat]) -> Result<Vec<Rat>> {
    let d = g.dim();
    let detb = det(b);
    let folded = fold(&FreqFn::Step(g.clone()), b)?;
    let energy: Vec<Rat> = folded.values.iter().map(|&v| exact_sq(v)).collect::<Result<_>>()?;
    let g_sq: Vec<Rat> = folded.grid.accumulate(folded.terms.iter().map(|(r, mult, item)| {
        let m = Rat::from_integer(BigInt::from(*mult as u64));
        (r.clone(), &detb * m * &energy[*item])
    }));
    let mut u_sq = Vec::new();
    let mut regions = Vec::new();
    for (region, i, cell) in split_by_cells(g, b, &folded.grid)? {
        if g_sq[cell].is_positive() {
            u_sq.push(exact_sq(g.pieces()[i].value)? / &g_sq[cell]);
            regions.push((region, Complex64::new(1.0, 0.0)));
        }
    }
    let refolded = fold(&FreqFn::Step(StepFn::new(d, regions)?), b)?;
    let sums: Vec<Rat> = refolded.grid.accumulate(refolded.terms.iter().map(|(r, mult, item)| {
        let m = Rat::from_integer(BigInt::from(*mult as u64));
        (r.clone(), &detb * m * &u_sq[*item])
    }));
    let counts: Vec<i64> = refolded
        .grid
        .accumulate(refolded.terms.iter().map(|(r, _, _)| (r.clone(), 1i64)));
    Ok(sums.into_iter().zip(counts).filter(|(_, c)| *c > 0).map(|(s, _)| s).collect())
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub norm_b: f64,
    pub sup_error: f64,
    pub lp_error: f64,
}

/// Distance of `f_{b,p}` to the constant `‖f‖_p` along a sequence of `b`.
pub fn convergence_table(f: &FreqFn, p: f64, bs: &[Vec<Rat>]) -> Result<Vec<ConvergenceRow>> {
    let norms: Vec<f64> = bs.iter().map(|b| diag_norm(b)).collect();
    if norms.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("‖b‖ must be strictly decreasing".into()));
    }
    let target = f.lp_norm(p)?;
    bs.par_iter()
        .zip(norms)
        .map(|(b, norm_b)| {
            let g = grammian_p(f, b, p)?;
            Ok(ConvergenceRow {
                norm_b,
                sup_error: g.sup_distance_to_const(target),
                lp_error: g.lp_distance_to_const(target, p),
            })
        })
        .collect()
}

/// `b = 2^{-k} I` for `k = 1..=n`.
pub fn dyadic_sequence(n: u32, dim: usize) -> Vec<Vec<Rat>> {
    (1..=n as i32).map(|k| vec![rational::pow2(-k); dim]).collect()
}

/// `∫_I e^{-2πi t ω} dω` for `I = [lo, hi)`.
fn interval_fourier(lo: f64, hi: f64, t: f64) -> Complex64 {
    let h = hi - lo;
    if t == 0.0 {
        return Complex64::new(h, 0.0);
    }
    let x = std::f64::consts::PI * t * h;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    let m = 0.5 * (lo + hi);
    Complex64::from_polar(h * sinc, -2.0 * std::f64::consts::PI * t * m)
}

/// `∫ |ψ̂|² e^{-2πi ω·t} dω`.
pub fn autocorrelation(psi: &FreqFn, t: &[f64]) -> Complex64 {
    match psi {
        FreqFn::Grid(g) => {
            let d = g.dim();
            let h = g.step_f64();
            let lo0 = g.domain().lo_f64();
            let per_axis: Vec<Vec<Complex64>> = (0..d)
                .map(|a| {
                    (0..g.cells()[a])
                        .map(|i| {
                            let lo = lo0[a] + i as f64 * h[a];
                            interval_fourier(lo, lo + h[a], t[a])
                        })
                        .collect()
                })
                .collect();
            let mut acc = Complex64::zero();
            for (k, v) in g.values().iter().enumerate() {
                if *v == Complex64::zero() {
                    continue;
                }
                let idx = g.unflatten(k);
                let mut e = Complex64::new(v.norm_sqr(), 0.0);
                for a in 0..d {
                    e *= per_axis[a][idx[a]];
                }
                acc += e;
            }
            acc
        }
        FreqFn::Step(s) => s
            .pieces()
            .iter()
            .map(|p| {
                let lo = p.region.lo_f64();
                let hi = p.region.hi_f64();
                (0..s.dim()).fold(Complex64::new(p.value.norm_sqr(), 0.0), |acc, a| {
                    acc * interval_fourier(lo[a], hi[a], t[a])
                })
            })
            .sum(),
    }
}

/// Gram matrix `⟨T_γψ, T_γ'ψ⟩` over the lattice points `c k`, `k` in `index`.
pub fn translate_gram_matrix(psi: &FreqFn, lattice: &Lattice, index: &[Vec<i64>]) -> Result<DMatrix<Complex64>> {
    if index.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    if lattice.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: lattice.dim(),
        });
    }
    let n = index.len();
    let mut diffs: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let dk: Vec<i64> = index[i].iter().zip(&index[j]).map(|(a, b)| a - b).collect();
            diffs.push(dk);
        }
    }
    let mut distinct = diffs.clone();
    distinct.sort();
    distinct.dedup();
    let table: Vec<Complex64> = distinct
        .par_iter()
        .map(|dk| autocorrelation(psi, &lattice.point(dk)))
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let pos = distinct.binary_search(&diffs[i * n + j]).expect("listed");
        table[pos]
    }))
}

/// All integer vectors in `[-m, m]^d`.
pub fn centered_index_set(m: i64, dim: usize) -> Vec<Vec<i64>> {
    let axis: Vec<i64> = (-m..=m).collect();
    product(&vec![axis; dim])
        .into_iter()
        .map(|v| v.into_iter().copied().collect())
        .collect()
}

/// `max |G − I|` entrywise.
pub fn identity_deviation(gram: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// `(‖g − h‖₂, ‖g_b − h_b‖_{L²(Q)})`; the first dominates the second.
pub fn lem4_check(g: &FreqFn, h: &FreqFn, b: &[Rat]) -> Result<(f64, f64)> {
    let lhs = crate::freqfn::l2_distance(g, h)?;
    let gb = grammian_p(g, b, 2.0)?;
    let hb = grammian_p(h, b, 2.0)?;
    Ok((lhs, gb.l2_distance(&hb)?))
}
