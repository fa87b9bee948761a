//! Exact algebra of finite unions of half-open axis-aligned boxes.
//!
//! A [`Cuboid`] is the product `[lo_0, hi_0) x ... x [lo_{d-1}, hi_{d-1})` with
//! rational corners. A [`BoxSet`] is a finite disjoint union of cuboids kept in a
//! canonical form: the first axis is cut into maximal slabs on which the
//! cross-section is constant, each cross-section is canonical in the remaining
//! axes, and slabs are listed in increasing order. The canonical form depends
//! only on the point set, so `normalize` is idempotent and set equality is
//! structural equality.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CuboidRepr", into = "CuboidRepr")]
pub struct Cuboid {
    lo: Vec<Rat>,
    hi: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct CuboidRepr {
    #[serde(with = "rational::serde_rat_vec")]
    lo: Vec<Rat>,
    #[serde(with = "rational::serde_rat_vec")]
    hi: Vec<Rat>,
}

impl TryFrom<CuboidRepr> for Cuboid {
    type Error = Error;
    fn try_from(r: CuboidRepr) -> Result<Self> {
        Cuboid::new(r.lo, r.hi)
    }
}

impl From<Cuboid> for CuboidRepr {
    fn from(c: Cuboid) -> Self {
        CuboidRepr { lo: c.lo, hi: c.hi }
    }
}

impl Cuboid {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some(axis) = (0..lo.len()).find(|&i| lo[i] >= hi[i]) {
            return Err(Error::EmptyBox { axis });
        }
        Ok(Cuboid { lo, hi })
    }

    /// Like [`Cuboid::new`] but returns `None` for empty products.
    pub fn nonempty(lo: Vec<Rat>, hi: Vec<Rat>) -> Option<Self> {
        if lo.iter().zip(&hi).all(|(l, h)| l < h) {
            Some(Cuboid { lo, hi })
        } else {
            None
        }
    }

    /// `[lo, hi)^dim`.
    pub fn cube(lo: Rat, hi: Rat, dim: usize) -> Result<Self> {
        Cuboid::new(vec![lo; dim], vec![hi; dim])
    }

    /// The sup-norm ball `[-half, half)^dim`.
    pub fn centered(half: Rat, dim: usize) -> Result<Self> {
        Cuboid::cube(-half.clone(), half, dim)
    }

    pub fn interval(lo: Rat, hi: Rat) -> Result<Self> {
        Cuboid::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rat] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rat] {
        &self.hi
    }

    pub fn measure(&self) -> Rat {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(Rat::one(), |acc, (l, h)| acc * (h - l))
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| l <= x && x < h)
    }

    pub fn contains_f64(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (l, h))| rational::to_f64(l) <= x && x < rational::to_f64(h))
    }

    pub fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let lo: Vec<Rat> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(b).clone())
            .collect();
        let hi: Vec<Rat> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(b).clone())
            .collect();
        Cuboid::nonempty(lo, hi)
    }

    pub fn is_subset_of(&self, other: &Cuboid) -> bool {
        (0..self.dim()).all(|i| other.lo[i] <= self.lo[i] && self.hi[i] <= other.hi[i])
    }

    pub fn translate(&self, shift: &[Rat]) -> Cuboid {
        Cuboid {
            lo: self.lo.iter().zip(shift).map(|(x, s)| x + s).collect(),
            hi: self.hi.iter().zip(shift).map(|(x, s)| x + s).collect(),
        }
    }

    /// Image under `x -> scale * x + shift` (diagonal scale). Negative entries
    /// reflect the axis; the image stays half-open toward its new lower end.
    pub fn affine(&self, scale: &[Rat], shift: &[Rat]) -> Result<Cuboid> {
        let d = self.dim();
        if scale.len() != d || shift.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: scale.len().min(shift.len()),
            });
        }
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            if scale[i].is_zero() {
                return Err(Error::ZeroScale { axis: i });
            }
            let a = &self.lo[i] * &scale[i] + &shift[i];
            let b = &self.hi[i] * &scale[i] + &shift[i];
            if scale[i].is_positive() {
                lo.push(a);
                hi.push(b);
            } else {
                lo.push(b);
                hi.push(a);
            }
        }
        Ok(Cuboid { lo, hi })
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        self.lo.iter().map(rational::to_f64).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        self.hi.iter().map(rational::to_f64).collect()
    }

    /// Smallest and largest sup-norm over the closure of the box.
    pub fn sup_norm_range(&self) -> (Rat, Rat) {
        let mut min = Rat::zero();
        let mut max = Rat::zero();
        for (l, h) in self.lo.iter().zip(&self.hi) {
            let axis_min = if l.is_positive() {
                l.clone()
            } else if h.is_negative() {
                -h.clone()
            } else {
                Rat::zero()
            };
            let axis_max = l.abs().max(h.abs());
            if axis_min > min {
                min = axis_min;
            }
            if axis_max > max {
                max = axis_max;
            }
        }
        (min, max)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BoxSetRepr", into = "BoxSetRepr")]
pub struct BoxSet {
    dim: usize,
    boxes: Vec<Cuboid>,
}

#[derive(Serialize, Deserialize)]
struct BoxSetRepr {
    dim: usize,
    boxes: Vec<Cuboid>,
}

impl TryFrom<BoxSetRepr> for BoxSet {
    type Error = Error;
    fn try_from(r: BoxSetRepr) -> Result<Self> {
        BoxSet::normalize(r.dim, r.boxes)
    }
}

impl From<BoxSet> for BoxSetRepr {
    fn from(s: BoxSet) -> Self {
        BoxSetRepr {
            dim: s.dim,
            boxes: s.boxes,
        }
    }
}

type RawBox = (Vec<Rat>, Vec<Rat>);

impl BoxSet {
    pub fn empty(dim: usize) -> Self {
        BoxSet {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn from_box(b: Cuboid) -> Self {
        BoxSet {
            dim: b.dim(),
            boxes: vec![b],
        }
    }

    /// Canonical disjoint form of an arbitrary (possibly overlapping) list.
    pub fn normalize(dim: usize, raw: Vec<Cuboid>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        check_dims(dim, &raw)?;
        let tagged: Vec<(&Cuboid, bool)> = raw.iter().map(|b| (b, true)).collect();
        Ok(Self::assemble(dim, sweep(&tagged, 0, dim, &|a, _| a)))
    }

    fn assemble(dim: usize, raw: Vec<RawBox>) -> Self {
        BoxSet {
            dim,
            boxes: raw.into_iter().map(|(lo, hi)| Cuboid { lo, hi }).collect(),
        }
    }

    fn combine(&self, other: &BoxSet, op: &dyn Fn(bool, bool) -> bool) -> Result<BoxSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let tagged: Vec<(&Cuboid, bool)> = self
            .boxes
            .iter()
            .map(|b| (b, true))
            .chain(other.boxes.iter().map(|b| (b, false)))
            .collect();
        Ok(Self::assemble(self.dim, sweep(&tagged, 0, self.dim, op)))
    }

    pub fn union(&self, other: &BoxSet) -> Result<BoxSet> {
        self.combine(other, &|a, b| a || b)
    }

    pub fn intersect(&self, other: &BoxSet) -> Result<BoxSet> {
        self.combine(other, &|a, b| a && b)
    }

    pub fn subtract(&self, other: &BoxSet) -> Result<BoxSet> {
        self.combine(other, &|a, b| a && !b)
    }

    pub fn union_all<'a>(dim: usize, sets: impl IntoIterator<Item = &'a BoxSet>) -> Result<BoxSet> {
        let mut raw = Vec::new();
        for s in sets {
            if s.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim,
                });
            }
            raw.extend(s.boxes.iter().cloned());
        }
        BoxSet::normalize(dim, raw)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Cuboid] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> Rat {
        self.boxes.iter().map(Cuboid::measure).sum()
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        self.boxes.iter().any(|b| b.contains(point))
    }

    /// Measure of the intersection with a single box, without building it.
    pub fn measure_within(&self, b: &Cuboid) -> Rat {
        self.boxes
            .iter()
            .filter_map(|x| x.intersect(b))
            .map(|x| x.measure())
            .sum()
    }

    pub fn affine(&self, scale: &[Rat], shift: &[Rat]) -> Result<BoxSet> {
        let raw = self
            .boxes
            .iter()
            .map(|b| b.affine(scale, shift))
            .collect::<Result<Vec<_>>>()?;
        BoxSet::normalize(self.dim, raw)
    }

    pub fn scale(&self, factor: &Rat) -> Result<BoxSet> {
        let scale = vec![factor.clone(); self.dim];
        let shift = vec![Rat::zero(); self.dim];
        self.affine(&scale, &shift)
    }

    pub fn translate(&self, shift: &[Rat]) -> Result<BoxSet> {
        self.affine(&vec![Rat::one(); self.dim], shift)
    }

    /// Covering multiplicity of the set under translations by `side * Z^d`,
    /// reported as a partition of the cube `anchor + [0, side)^d`.
    ///
    /// `sum(multiplicity * measure)` over the result equals `self.measure()`.
    pub fn fold_mod(&self, side: &Rat, anchor: &[Rat]) -> Result<Vec<(Cuboid, u64)>> {
        if !side.is_positive() {
            return Err(Error::InvalidParameter("fold period must be positive".into()));
        }
        if anchor.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: anchor.len(),
            });
        }
        let d = self.dim;
        let mut pieces: Vec<(Vec<PeriodSegment>, u64)> = Vec::new();
        for b in &self.boxes {
            let axes: Vec<Vec<PeriodSegment>> = (0..d)
                .map(|i| period_segments(&b.lo[i], &b.hi[i], &anchor[i], side))
                .collect();
            for combo in product(&axes) {
                let mult = combo.iter().map(|s| s.count).product::<u64>();
                pieces.push((combo.into_iter().cloned().collect(), mult));
            }
        }
        let mut breaks: Vec<Vec<Rat>> = (0..d)
            .map(|i| vec![anchor[i].clone(), &anchor[i] + side])
            .collect();
        for (segs, _) in &pieces {
            for (i, s) in segs.iter().enumerate() {
                breaks[i].push(s.lo.clone());
                breaks[i].push(s.hi.clone());
            }
        }
        let grid = CellGrid::new(breaks);
        let counts: Vec<i64> = grid.accumulate(pieces.iter().map(|(segs, mult)| {
            let ranges = segs
                .iter()
                .enumerate()
                .map(|(i, s)| (grid.break_index(i, &s.lo), grid.break_index(i, &s.hi)))
                .collect();
            (ranges, *mult as i64)
        }));
        Ok(grid.merged_runs(&counts)
            .into_iter()
            .map(|(b, m)| (b, m as u64))
            .collect())
    }

    /// Pieces `E_s = self ∩ (anchor + side*s + [0, side)^d)`, shifted back into the
    /// anchored cube, keyed by the integer vector `s`.
    pub fn congruence_partition(
        &self,
        side: &Rat,
        anchor: &[Rat],
    ) -> Result<Vec<(Vec<BigInt>, BoxSet)>> {
        if !side.is_positive() {
            return Err(Error::InvalidParameter("fold period must be positive".into()));
        }
        let d = self.dim;
        let mut by_cell: std::collections::BTreeMap<Vec<BigInt>, Vec<Cuboid>> =
            std::collections::BTreeMap::new();
        for b in &self.boxes {
            let axes: Vec<Vec<(BigInt, Rat, Rat)>> = (0..d)
                .map(|i| {
                    let k0 = rational::floor_int(&((&b.lo[i] - &anchor[i]) / side));
                    let k1 = rational::ceil_int(&((&b.hi[i] - &anchor[i]) / side));
                    let mut out = Vec::new();
                    let mut k = k0;
                    while k < k1 {
                        let base = &anchor[i] + side * Rat::from_integer(k.clone());
                        let lo = b.lo[i].clone().max(base.clone());
                        let hi = b.hi[i].clone().min(&base + side);
                        out.push((k.clone(), lo - &base, hi - &base));
                        k += 1;
                    }
                    out
                })
                .collect();
            for combo in product(&axes) {
                let key: Vec<BigInt> = combo.iter().map(|c| c.0.clone()).collect();
                let lo = combo.iter().enumerate().map(|(i, c)| &c.1 + &anchor[i]).collect();
                let hi = combo.iter().enumerate().map(|(i, c)| &c.2 + &anchor[i]).collect();
                by_cell.entry(key).or_default().push(Cuboid { lo, hi });
            }
        }
        by_cell
            .into_iter()
            .map(|(k, raw)| Ok((k, BoxSet::normalize(d, raw)?)))
            .collect()
    }
}

/// Exact membership test, used as an oracle for the set operations.
pub fn raster_contains(set: &BoxSet, point: &[Rat]) -> bool {
    set.contains(point)
}

fn check_dims(dim: usize, raw: &[Cuboid]) -> Result<()> {
    match raw.iter().find(|b| b.dim() != dim) {
        Some(b) => Err(Error::DimensionMismatch {
            expected: dim,
            found: b.dim(),
        }),
        None => Ok(()),
    }
}

/// Slab sweep along `axis`; returns canonical boxes in axes `axis..dim`.
/// Tag `true` marks the left operand. `op(false, false)` must be false.
fn sweep(
    items: &[(&Cuboid, bool)],
    axis: usize,
    dim: usize,
    op: &dyn Fn(bool, bool) -> bool,
) -> Vec<RawBox> {
    if axis == dim {
        let a = items.iter().any(|(_, t)| *t);
        let b = items.iter().any(|(_, t)| !*t);
        return if op(a, b) {
            vec![(Vec::new(), Vec::new())]
        } else {
            Vec::new()
        };
    }
    if items.is_empty() {
        return Vec::new();
    }
    let mut xs: Vec<&Rat> = items
        .iter()
        .flat_map(|(b, _)| [&b.lo[axis], &b.hi[axis]])
        .collect();
    xs.sort();
    xs.dedup();

    let mut by_lo: Vec<usize> = (0..items.len()).collect();
    by_lo.sort_by(|&i, &j| items[i].0.lo[axis].cmp(&items[j].0.lo[axis]));

    let mut next = 0;
    let mut active: Vec<usize> = Vec::new();
    let mut slabs: Vec<(Rat, Rat, Vec<RawBox>)> = Vec::new();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        active.retain(|&i| &items[i].0.hi[axis] > x0);
        while next < by_lo.len() && &items[by_lo[next]].0.lo[axis] <= x0 {
            active.push(by_lo[next]);
            next += 1;
        }
        if active.is_empty() {
            continue;
        }
        let sub_items: Vec<(&Cuboid, bool)> = active.iter().map(|&i| items[i]).collect();
        let sub = sweep(&sub_items, axis + 1, dim, op);
        if sub.is_empty() {
            continue;
        }
        if let Some(last) = slabs.last_mut() {
            if &last.1 == x0 && last.2 == sub {
                last.1 = x1.clone();
                continue;
            }
        }
        slabs.push((x0.clone(), x1.clone(), sub));
    }

    let mut out = Vec::new();
    for (x0, x1, sub) in slabs {
        for (mut lo, mut hi) in sub {
            lo.insert(0, x0.clone());
            hi.insert(0, x1.clone());
            out.push((lo, hi));
        }
    }
    out
}

/// One axis of a box reduced modulo a period. A segment with `count > 1` stands
/// for that many full periods.
#[derive(Clone, Debug)]
pub(crate) struct PeriodSegment {
    pub lo: Rat,
    pub hi: Rat,
    pub count: u64,
}

/// Splits `[lo, hi)` into pieces of `anchor + [0, period)` after reduction.
pub(crate) fn period_segments(lo: &Rat, hi: &Rat, anchor: &Rat, period: &Rat) -> Vec<PeriodSegment> {
    let a = (lo - anchor) / period;
    let b = (hi - anchor) / period;
    let k0 = rational::floor_int(&a);
    let k1 = rational::ceil_int(&b) - BigInt::one();
    let to_local = |t: Rat| anchor + t * period;
    let base0 = Rat::from_integer(k0.clone());
    if k0 == k1 {
        return vec![PeriodSegment {
            lo: to_local(&a - &base0),
            hi: to_local(&b - &base0),
            count: 1,
        }];
    }
    let mut full: u64 = (&k1 - &k0 - BigInt::one()).to_u64().unwrap_or(u64::MAX);
    let mut out = Vec::new();
    let head = &a - &base0;
    if head.is_zero() {
        full += 1;
    } else {
        out.push(PeriodSegment {
            lo: to_local(head),
            hi: to_local(Rat::one()),
            count: 1,
        });
    }
    let tail = &b - Rat::from_integer(k1);
    if tail == Rat::one() {
        full += 1;
    } else {
        out.push(PeriodSegment {
            lo: to_local(Rat::zero()),
            hi: to_local(tail),
            count: 1,
        });
    }
    if full > 0 {
        out.push(PeriodSegment {
            lo: to_local(Rat::zero()),
            hi: to_local(Rat::one()),
            count: full,
        });
    }
    out
}

/// Cartesian product of per-axis choices.
pub(crate) fn product<T>(axes: &[Vec<T>]) -> Vec<Vec<&T>> {
    let mut acc: Vec<Vec<&T>> = vec![Vec::new()];
    for choices in axes {
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for prefix in &acc {
            for c in choices {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// Rectilinear grid from sorted breakpoints; cells indexed row-major with the
/// first axis slowest.
#[derive(Clone, Debug)]
pub(crate) struct CellGrid {
    pub breaks: Vec<Vec<Rat>>,
    pub shape: Vec<usize>,
}

impl CellGrid {
    pub fn new(mut breaks: Vec<Vec<Rat>>) -> Self {
        for b in &mut breaks {
            b.sort();
            b.dedup();
        }
        let shape = breaks.iter().map(|b| b.len().saturating_sub(1)).collect();
        CellGrid { breaks, shape }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn break_index(&self, axis: usize, x: &Rat) -> usize {
        self.breaks[axis]
            .binary_search(x)
            .expect("breakpoint registered in grid")
    }

    /// Cell containing `x` on `axis`, if any.
    pub fn locate(&self, axis: usize, x: &Rat) -> Option<usize> {
        let b = &self.breaks[axis];
        match b.binary_search(x) {
            Ok(i) if i + 1 < b.len() => Some(i),
            Ok(_) => None,
            Err(0) => None,
            Err(i) if i < b.len() => Some(i - 1),
            Err(_) => None,
        }
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = flat % self.shape[i];
            flat /= self.shape[i];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn cell(&self, flat: usize) -> Cuboid {
        let idx = self.unflatten(flat);
        Cuboid {
            lo: idx.iter().enumerate().map(|(a, &i)| self.breaks[a][i].clone()).collect(),
            hi: idx
                .iter()
                .enumerate()
                .map(|(a, &i)| self.breaks[a][i + 1].clone())
                .collect(),
        }
    }

    pub fn cell_measure(&self, flat: usize) -> Rat {
        let idx = self.unflatten(flat);
        idx.iter()
            .enumerate()
            .fold(Rat::one(), |acc, (a, &i)| acc * (&self.breaks[a][i + 1] - &self.breaks[a][i]))
    }

    /// Sums weights over index ranges `[start, end)` per axis using a
    /// d-dimensional difference array.
    pub fn accumulate<T, I>(&self, items: I) -> Vec<T>
    where
        T: Clone + Zero + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
        I: IntoIterator<Item = (Vec<(usize, usize)>, T)>,
    {
        let d = self.dim();
        let ext: Vec<usize> = self.shape.iter().map(|n| n + 1).collect();
        let total: usize = ext.iter().product();
        let mut diff = vec![T::zero(); total];
        let ext_flat = |idx: &[usize]| idx.iter().zip(&ext).fold(0, |acc, (&i, &n)| acc * n + i);
        for (ranges, w) in items {
            for corner in 0..(1usize << d) {
                let mut idx = Vec::with_capacity(d);
                let mut negative = false;
                for (axis, &(s, e)) in ranges.iter().enumerate() {
                    if corner >> axis & 1 == 1 {
                        idx.push(e);
                        negative = !negative;
                    } else {
                        idx.push(s);
                    }
                }
                let k = ext_flat(&idx);
                let cur = std::mem::replace(&mut diff[k], T::zero());
                diff[k] = if negative { cur - w.clone() } else { cur + w.clone() };
            }
        }
        // prefix sums along every axis
        let mut stride = 1;
        for axis in (0..d).rev() {
            let n = ext[axis];
            for k in 0..total {
                if (k / stride) % n != 0 {
                    let prev = diff[k - stride].clone();
                    let cur = std::mem::replace(&mut diff[k], T::zero());
                    diff[k] = cur + prev;
                }
            }
            stride *= n;
        }
        let mut out = Vec::with_capacity(self.len());
        for flat in 0..self.len() {
            let idx = self.unflatten(flat);
            out.push(diff[ext_flat(&idx)].clone());
        }
        out
    }

    /// Cells with their values, merging consecutive equal cells along the last axis.
    pub fn merged_runs<T: Clone + PartialEq>(&self, values: &[T]) -> Vec<(Cuboid, T)> {
        let mut out: Vec<(Cuboid, T)> = Vec::new();
        let last = self.dim() - 1;
        for flat in 0..self.len() {
            let cell = self.cell(flat);
            if let Some((prev, v)) = out.last_mut() {
                let same_row = (0..last).all(|a| prev.lo[a] == cell.lo[a] && prev.hi[a] == cell.hi[a]);
                if same_row && prev.hi[last] == cell.lo[last] && *v == values[flat] {
                    prev.hi[last] = cell.hi[last].clone();
                    continue;
                }
            }
            out.push((cell, values[flat].clone()));
        }
        out
    }
}
