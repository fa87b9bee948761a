//! Frequency-side functions, their norms and level sets, and the lattice and
//! dilation value types.
//!
//! The target's Fourier transform is taken as given: an input step or grid
//! function *is* the smooth approximant the constructions start from, at
//! distance zero from the target.

mod grid;
mod lattice;
mod step;
mod value;

pub use grid::GridFn;
pub use lattice::{gap_of_lattice, AffineSystemSpec, Dilation, Gap, Lattice, Translations};
pub use step::{Piece, StepFn};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boxcalc::{BoxSet, Cuboid};
use crate::error::{Error, Result};
use crate::rational::{self, Rat};

/// A step function on rational boxes or a cell-constant grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FreqRepr", into = "FreqRepr")]
pub enum FreqFn {
    Step(StepFn),
    Grid(GridFn),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FreqRepr {
    Step(step::StepRepr),
    Grid(grid::GridRepr),
}

impl TryFrom<FreqRepr> for FreqFn {
    type Error = Error;
    fn try_from(r: FreqRepr) -> Result<Self> {
        Ok(match r {
            FreqRepr::Step(s) => FreqFn::Step(s.try_into()?),
            FreqRepr::Grid(g) => FreqFn::Grid(g.try_into()?),
        })
    }
}

impl From<FreqFn> for FreqRepr {
    fn from(f: FreqFn) -> Self {
        match &f {
            FreqFn::Step(s) => FreqRepr::Step(s.into()),
            FreqFn::Grid(g) => FreqRepr::Grid(g.into()),
        }
    }
}

impl From<StepFn> for FreqFn {
    fn from(s: StepFn) -> Self {
        FreqFn::Step(s)
    }
}

impl From<GridFn> for FreqFn {
    fn from(g: GridFn) -> Self {
        FreqFn::Grid(g)
    }
}

/// A nonzero piece with float corners, the working form for integrals.
#[derive(Clone, Debug)]
pub struct FloatPiece {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub value: Complex64,
}

impl FloatPiece {
    pub fn measure(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    fn overlap(&self, other: &FloatPiece) -> f64 {
        let mut m = 1.0;
        for a in 0..self.lo.len() {
            let w = self.hi[a].min(other.hi[a]) - self.lo[a].max(other.lo[a]);
            if w <= 0.0 {
                return 0.0;
            }
            m *= w;
        }
        m
    }
}

/// Region whose complement carries the tail energy.
#[derive(Clone, Debug)]
pub enum Region {
    Boxes(BoxSet),
    /// Closed Euclidean ball about the origin; grid cells are classified by
    /// their centers.
    Ball(f64),
}

impl FreqFn {
    pub fn dim(&self) -> usize {
        match self {
            FreqFn::Step(s) => s.dim(),
            FreqFn::Grid(g) => g.dim(),
        }
    }

    pub fn eval(&self, point: &[f64]) -> Complex64 {
        match self {
            FreqFn::Step(s) => s.eval(point),
            FreqFn::Grid(g) => g.eval(point),
        }
    }

    /// Nonzero pieces with exact rational boxes.
    pub fn pieces(&self) -> Vec<(Cuboid, Complex64)> {
        match self {
            FreqFn::Step(s) => s.pieces().iter().map(|p| (p.region.clone(), p.value)).collect(),
            FreqFn::Grid(g) => (0..g.len())
                .filter(|&k| g.values()[k] != Complex64::new(0.0, 0.0))
                .map(|k| (g.cell_box(k), g.values()[k]))
                .collect(),
        }
    }

    /// Nonzero pieces with float corners.
    pub fn float_pieces(&self) -> Vec<FloatPiece> {
        match self {
            FreqFn::Step(s) => s
                .pieces()
                .iter()
                .map(|p| FloatPiece {
                    lo: p.region.lo_f64(),
                    hi: p.region.hi_f64(),
                    value: p.value,
                })
                .collect(),
            FreqFn::Grid(g) => {
                (0..g.len())
                    .filter(|&k| g.values()[k] != Complex64::new(0.0, 0.0))
                    .map(|k| {
                        let (lo, hi) = g.cell_bounds_f64(k);
                        FloatPiece {
                            lo,
                            hi,
                            value: g.values()[k],
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
        }
        let sum: f64 = match self {
            FreqFn::Step(s) => s
                .pieces()
                .iter()
                .map(|q| q.value.norm().powf(p) * rational::to_f64(&q.region.measure()))
                .sum(),
            FreqFn::Grid(g) => {
                let cell = rational::to_f64(&g.cell_measure());
                g.values().iter().map(|z| z.norm().powf(p)).sum::<f64>() * cell
            }
        };
        Ok(sum.powf(1.0 / p))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0).expect("p = 2 is valid")
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            FreqFn::Step(s) => s.pieces().iter().map(|p| p.value.norm()).fold(0.0, f64::max),
            FreqFn::Grid(g) => g.values().iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub fn inf_abs_on_support(&self) -> f64 {
        let m = match self {
            FreqFn::Step(s) => s.pieces().iter().map(|p| p.value.norm()).fold(f64::INFINITY, f64::min),
            FreqFn::Grid(g) => g
                .values()
                .iter()
                .map(|z| z.norm())
                .filter(|&v| v > 0.0)
                .fold(f64::INFINITY, f64::min),
        };
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup_abs() == 0.0
    }

    pub fn scale(&self, c: f64) -> FreqFn {
        let c = Complex64::new(c, 0.0);
        match self {
            FreqFn::Step(s) => FreqFn::Step(s.map_values(|z| z * c)),
            FreqFn::Grid(g) => FreqFn::Grid(g.map_values(|_, z| z * c)),
        }
    }

    /// Exact support as a box set.
    pub fn support(&self) -> BoxSet {
        level_set(self, 0.0)
    }

    /// Smallest box containing the support, if any.
    pub fn bounding_box(&self) -> Option<Cuboid> {
        let pieces = self.pieces();
        let first = pieces.first()?;
        let mut lo = first.0.lo().to_vec();
        let mut hi = first.0.hi().to_vec();
        for (b, _) in &pieces[1..] {
            for a in 0..lo.len() {
                if b.lo()[a] < lo[a] {
                    lo[a] = b.lo()[a].clone();
                }
                if b.hi()[a] > hi[a] {
                    hi[a] = b.hi()[a].clone();
                }
            }
        }
        Cuboid::new(lo, hi).ok()
    }

    /// Closest and farthest Euclidean distance of the support from the origin.
    pub fn support_radii(&self) -> Option<(f64, f64)> {
        let pieces = self.float_pieces();
        if pieces.is_empty() {
            return None;
        }
        let mut near = f64::INFINITY;
        let mut far: f64 = 0.0;
        for p in &pieces {
            let (n, f) = box_radii(&p.lo, &p.hi);
            near = near.min(n);
            far = far.max(f);
        }
        Some((near, far))
    }

    /// `ω ↦ f(ω / s)` for a nonzero rational `s`.
    pub fn stretch(&self, s: &Rat) -> Result<FreqFn> {
        match self {
            FreqFn::Step(st) => {
                let zero = vec![Rat::from_integer(0.into()); st.dim()];
                let scale = vec![s.clone(); st.dim()];
                let pieces = st
                    .pieces()
                    .iter()
                    .map(|p| Ok((p.region.affine(&scale, &zero)?, p.value)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FreqFn::Step(StepFn::new(st.dim(), pieces)?))
            }
            FreqFn::Grid(g) => {
                let zero = vec![Rat::from_integer(0.into()); g.dim()];
                let scale = vec![s.clone(); g.dim()];
                let dom = g.domain().affine(&scale, &zero)?;
                Ok(FreqFn::Grid(GridFn::new(dom, g.cells().to_vec(), g.values().to_vec())?))
            }
        }
    }

    /// Resamples to a grid at cell centers; step functions become grids.
    pub fn to_grid(&self, domain: Cuboid, cells: Vec<usize>) -> Result<GridFn> {
        GridFn::sample(domain, cells, |x| self.eval(x))
    }
}

pub(crate) fn box_radii(lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for (&l, &h) in lo.iter().zip(hi) {
        let n = if l > 0.0 {
            l
        } else if h < 0.0 {
            -h
        } else {
            0.0
        };
        let f = l.abs().max(h.abs());
        near += n * n;
        far += f * f;
    }
    (near.sqrt(), far.sqrt())
}

fn check_dims(f: &FreqFn, g: &FreqFn) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

fn same_grid<'a>(f: &'a FreqFn, g: &'a FreqFn) -> Option<(&'a GridFn, &'a GridFn)> {
    match (f, g) {
        (FreqFn::Grid(a), FreqFn::Grid(b)) if a.domain() == b.domain() && a.cells() == b.cells() => {
            Some((a, b))
        }
        _ => None,
    }
}

/// Calls `visit(i, j, overlap)` for every pair of overlapping pieces.
pub(crate) fn for_each_overlap(
    a: &[FloatPiece],
    b: &[FloatPiece],
    mut visit: impl FnMut(usize, usize, f64),
) {
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[i].lo[0].total_cmp(&b[j].lo[0]));
    let starts: Vec<f64> = order.iter().map(|&i| b[i].lo[0]).collect();
    let widest = b.iter().map(|p| p.hi[0] - p.lo[0]).fold(0.0, f64::max);
    for (i, p) in a.iter().enumerate() {
        let from = starts.partition_point(|&s| s < p.lo[0] - widest);
        for &j in &order[from..] {
            if b[j].lo[0] >= p.hi[0] {
                break;
            }
            let m = p.overlap(&b[j]);
            if m > 0.0 {
                visit(i, j, m);
            }
        }
    }
}

/// `‖f − g‖₂` as a sum of nonnegative terms over the common refinement.
pub fn l2_distance(f: &FreqFn, g: &FreqFn) -> Result<f64> {
    check_dims(f, g)?;
    if let Some((a, b)) = same_grid(f, g) {
        let cell = rational::to_f64(&a.cell_measure());
        let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
        return Ok((s * cell).sqrt());
    }
    let pa = f.float_pieces();
    let pb = g.float_pieces();
    let mut cover_a = vec![0.0; pa.len()];
    let mut cover_b = vec![0.0; pb.len()];
    let mut both = 0.0;
    for_each_overlap(&pa, &pb, |i, j, m| {
        cover_a[i] += m;
        cover_b[j] += m;
        both += (pa[i].value - pb[j].value).norm_sqr() * m;
    });
    let only = |ps: &[FloatPiece], cover: &[f64]| -> f64 {
        ps.iter()
            .zip(cover)
            .map(|(p, c)| {
                let m = p.measure();
                // summed overlaps of a fully covered piece leave round-off
                let rest = if m - c <= 1e-12 * m { 0.0 } else { m - c };
                p.value.norm_sqr() * rest
            })
            .sum()
    };
    Ok((both + only(&pa, &cover_a) + only(&pb, &cover_b)).sqrt())
}

/// `∫ f · conj(g)`.
pub fn inner(f: &FreqFn, g: &FreqFn) -> Result<Complex64> {
    check_dims(f, g)?;
    if let Some((a, b)) = same_grid(f, g) {
        let cell = rational::to_f64(&a.cell_measure());
        let s: Complex64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum();
        return Ok(s * cell);
    }
    let pa = f.float_pieces();
    let pb = g.float_pieces();
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_overlap(&pa, &pb, |i, j, m| acc += pa[i].value * pb[j].value.conj() * m);
    Ok(acc)
}

/// `{|f| > λ}`: exact for step functions, a union of cells for grids.
pub fn level_set(f: &FreqFn, lambda: f64) -> BoxSet {
    let dim = f.dim();
    let raw: Vec<Cuboid> = match f {
        FreqFn::Step(s) => s
            .pieces()
            .iter()
            .filter(|p| p.value.norm() > lambda)
            .map(|p| p.region.clone())
            .collect(),
        FreqFn::Grid(g) => grid_runs(g, |_, z| z.norm() > lambda),
    };
    BoxSet::normalize(dim, raw).expect("pieces share the function's dimension")
}

/// Cells selected by `keep`, merged into runs along the last axis.
pub(crate) fn grid_runs(g: &GridFn, keep: impl Fn(usize, Complex64) -> bool) -> Vec<Cuboid> {
    let last = g.dim() - 1;
    let row = g.cells()[last];
    let mut out = Vec::new();
    let mut k = 0;
    while k < g.len() {
        if !keep(k, g.values()[k]) {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < g.len() && (k + 1) % row != 0 && keep(k + 1, g.values()[k + 1]) {
            k += 1;
        }
        let first = g.cell_box(start);
        let end = g.cell_box(k);
        let mut hi = first.hi().to_vec();
        hi[last] = end.hi()[last].clone();
        out.push(Cuboid::new(first.lo().to_vec(), hi).expect("nonempty run"));
        k += 1;
    }
    out
}

fn set_pieces(set: &BoxSet, value: f64) -> Vec<FloatPiece> {
    set.boxes()
        .iter()
        .map(|b| FloatPiece {
            lo: b.lo_f64(),
            hi: b.hi_f64(),
            value: Complex64::new(value, 0.0),
        })
        .collect()
}

/// `∫_S |f|²`.
pub fn energy_within(f: &FreqFn, set: &BoxSet) -> Result<f64> {
    check_set_dim(f, set)?;
    let pa = f.float_pieces();
    let mut acc = 0.0;
    for_each_overlap(&pa, &set_pieces(set, 1.0), |i, _, m| acc += pa[i].value.norm_sqr() * m);
    Ok(acc)
}

/// `∫_S |f − c|²` for a real constant `c`.
pub fn distance_sq_to_constant_on(f: &FreqFn, set: &BoxSet, c: f64) -> Result<f64> {
    check_set_dim(f, set)?;
    let pa = f.float_pieces();
    let pb = set_pieces(set, c);
    let mut covered = vec![0.0; pb.len()];
    let mut acc = 0.0;
    for_each_overlap(&pa, &pb, |i, j, m| {
        acc += (pa[i].value - c).norm_sqr() * m;
        covered[j] += m;
    });
    let rest: f64 = pb
        .iter()
        .zip(&covered)
        .map(|(p, cov)| c * c * (p.measure() - cov).max(0.0))
        .sum();
    Ok(acc + rest)
}

fn check_set_dim(f: &FreqFn, set: &BoxSet) -> Result<()> {
    if set.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: set.dim(),
        });
    }
    Ok(())
}

/// `∫ |f|²` over the complement of `region`.
pub fn tail_energy(f: &FreqFn, region: &Region) -> Result<f64> {
    match region {
        Region::Boxes(set) => {
            check_set_dim(f, set)?;
            let pa = f.float_pieces();
            let pb = set_pieces(set, 1.0);
            let mut inside = vec![0.0; pa.len()];
            for_each_overlap(&pa, &pb, |i, _, m| inside[i] += m);
            Ok(pa
                .iter()
                .zip(&inside)
                .map(|(p, c)| p.value.norm_sqr() * (p.measure() - c).max(0.0))
                .sum())
        }
        Region::Ball(radius) => match f {
            FreqFn::Grid(g) => {
                let cell = rational::to_f64(&g.cell_measure());
                let s: f64 = (0..g.len())
                    .filter(|&k| crate::linalg::norm2(&g.cell_center(k)) > *radius)
                    .map(|k| g.values()[k].norm_sqr())
                    .sum();
                Ok(s * cell)
            }
            FreqFn::Step(s) if s.dim() == 1 => {
                let ball = BoxSet::from_box(Cuboid::interval(
                    rational::from_f64(-radius)?,
                    rational::from_f64(*radius)?,
                )?);
                tail_energy(f, &Region::Boxes(ball))
            }
            FreqFn::Step(_) => Err(Error::Unsupported(
                "Euclidean balls are handled on grids; resample the step function first".into(),
            )),
        },
    }
}
