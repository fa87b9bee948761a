use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::boxcalc::Cuboid;
use crate::error::{Error, Result};
use crate::rational::{self, Rat};

use super::value;

/// Samples on a uniform grid over `domain`, constant on each cell, zero outside.
///
/// Cells are stored row-major with the first axis slowest. The domain corners
/// are exact rationals (float input is converted exactly), so every cell is an
/// exact rational box.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    domain: Cuboid,
    cells: Vec<usize>,
    values: Vec<Complex64>,
    lo_f: Vec<f64>,
    hi_f: Vec<f64>,
    step_f: Vec<f64>,
}

impl GridFn {
    pub fn new(domain: Cuboid, cells: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if cells.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: cells.len(),
            });
        }
        if cells.contains(&0) {
            return Err(Error::InvalidParameter("cell counts must be positive".into()));
        }
        let n: usize = cells.iter().product();
        if values.len() != n {
            return Err(Error::InvalidParameter(format!(
                "grid expects {n} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite grid sample".into()));
        }
        let lo_f = domain.lo_f64();
        let hi_f = domain.hi_f64();
        let step_f = (0..domain.dim())
            .map(|i| rational::to_f64(&((&domain.hi()[i] - &domain.lo()[i]) / Rat::from(num_bigint::BigInt::from(cells[i])))))
            .collect();
        Ok(GridFn {
            domain,
            cells,
            values,
            lo_f,
            hi_f,
            step_f,
        })
    }

    /// Samples `f` at cell centers.
    pub fn sample(domain: Cuboid, cells: Vec<usize>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let n: usize = cells.iter().product();
        let probe = GridFn::new(domain.clone(), cells.clone(), vec![Complex64::zero(); n])?;
        let values = (0..n).map(|k| f(&probe.cell_center(k))).collect();
        GridFn::new(domain, cells, values)
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn domain(&self) -> &Cuboid {
        &self.domain
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self, axis: usize) -> Rat {
        (&self.domain.hi()[axis] - &self.domain.lo()[axis])
            / Rat::from(num_bigint::BigInt::from(self.cells[axis]))
    }

    pub fn step_f64(&self) -> &[f64] {
        &self.step_f
    }

    pub fn cell_measure(&self) -> Rat {
        (0..self.dim()).fold(Rat::from(num_bigint::BigInt::from(1)), |acc, i| acc * self.step(i))
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = flat % self.cells[i];
            flat /= self.cells[i];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.cells).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn cell_box(&self, flat: usize) -> Cuboid {
        let idx = self.unflatten(flat);
        let lo: Vec<Rat> = idx
            .iter()
            .enumerate()
            .map(|(a, &i)| &self.domain.lo()[a] + self.step(a) * Rat::from(num_bigint::BigInt::from(i)))
            .collect();
        let hi = lo.iter().enumerate().map(|(a, l)| l + self.step(a)).collect();
        Cuboid::new(lo, hi).expect("grid cells are nonempty")
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.lo_f[a] + (i as f64 + 0.5) * self.step_f[a])
            .collect()
    }

    /// Float corners from `lo + (hi − lo)·i/n`, so that equal rational
    /// boundaries of different grids on one domain give equal floats.
    pub fn cell_bounds_f64(&self, flat: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.unflatten(flat);
        let at = |a: usize, i: usize| {
            let n = self.cells[a];
            if i == n {
                self.hi_f[a]
            } else {
                self.lo_f[a] + (self.hi_f[a] - self.lo_f[a]) * (i as f64 / n as f64)
            }
        };
        idx.iter().enumerate().map(|(a, &i)| (at(a, i), at(a, i + 1))).unzip()
    }

    /// Closest and farthest Euclidean distance from the origin over the cell.
    pub fn cell_radii(&self, flat: usize) -> (f64, f64) {
        let idx = self.unflatten(flat);
        let mut near = 0.0;
        let mut far = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            let lo = self.lo_f[a] + i as f64 * self.step_f[a];
            let hi = lo + self.step_f[a];
            let n = if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            };
            let f = lo.abs().max(hi.abs());
            near += n * n;
            far += f * f;
        }
        (f64::sqrt(near), f64::sqrt(far))
    }

    pub fn eval(&self, point: &[f64]) -> Complex64 {
        let mut flat = 0;
        for a in 0..self.dim() {
            let t = (point[a] - self.lo_f[a]) / self.step_f[a];
            if !(t >= 0.0) {
                return Complex64::zero();
            }
            let i = t.floor() as usize;
            if i >= self.cells[a] {
                return Complex64::zero();
            }
            flat = flat * self.cells[a] + i;
        }
        self.values[flat]
    }

    pub fn map_values(&self, f: impl Fn(usize, Complex64) -> Complex64) -> GridFn {
        let values = self.values.iter().enumerate().map(|(k, &z)| f(k, z)).collect();
        GridFn::new(self.domain.clone(), self.cells.clone(), values).expect("same shape")
    }

    /// Splits every cell into `factor^d` equal cells carrying the same value.
    pub fn refine(&self, factor: usize) -> GridFn {
        if factor <= 1 {
            return self.clone();
        }
        let cells: Vec<usize> = self.cells.iter().map(|n| n * factor).collect();
        let n: usize = cells.iter().product();
        let mut values = Vec::with_capacity(n);
        let fine = GridFn::new(self.domain.clone(), cells.clone(), vec![Complex64::zero(); n])
            .expect("valid refinement");
        for k in 0..n {
            let idx: Vec<usize> = fine.unflatten(k).iter().map(|i| i / factor).collect();
            values.push(self.values[self.flatten(&idx)]);
        }
        GridFn::new(self.domain.clone(), cells, values).expect("valid refinement")
    }

    /// Same spacing and alignment, domain grown or cropped to the smallest
    /// aligned box covering `target`. Cells outside the old domain are zero.
    pub fn reframe(&self, target: &Cuboid) -> Result<GridFn> {
        let d = self.dim();
        if target.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: target.dim(),
            });
        }
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        let mut offset = Vec::with_capacity(d);
        let mut cells = Vec::with_capacity(d);
        for a in 0..d {
            let h = self.step(a);
            let base = &self.domain.lo()[a];
            let k0 = rational::floor_int(&((&target.lo()[a] - base) / &h));
            let k1 = rational::ceil_int(&((&target.hi()[a] - base) / &h));
            lo.push(base + &h * Rat::from(k0.clone()));
            hi.push(base + &h * Rat::from(k1.clone()));
            offset.push(num_traits::ToPrimitive::to_i64(&k0).ok_or_else(|| {
                Error::InvalidParameter("reframe target too far from grid".into())
            })?);
            cells.push(
                num_traits::ToPrimitive::to_usize(&(k1 - k0))
                    .ok_or_else(|| Error::InvalidParameter("reframe target too large".into()))?,
            );
        }
        let n: usize = cells.iter().product();
        let out = GridFn::new(Cuboid::new(lo, hi)?, cells, vec![Complex64::zero(); n])?;
        let mut values = vec![Complex64::zero(); n];
        for (k, v) in values.iter_mut().enumerate() {
            let idx = out.unflatten(k);
            let old: Option<Vec<usize>> = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| {
                    let j = i as i64 + offset[a];
                    (j >= 0 && (j as usize) < self.cells[a]).then_some(j as usize)
                })
                .collect();
            if let Some(old) = old {
                *v = self.values[self.flatten(&old)];
            }
        }
        GridFn::new(out.domain, out.cells, values)
    }
}

#[derive(Serialize, Deserialize)]
pub(super) struct GridRepr {
    pub dim: usize,
    #[serde(with = "rational::serde_rat_vec")]
    pub lo: Vec<Rat>,
    #[serde(with = "rational::serde_rat_vec")]
    pub hi: Vec<Rat>,
    pub cells: Vec<usize>,
    #[serde(with = "value::vec")]
    pub values: Vec<Complex64>,
}

impl TryFrom<GridRepr> for GridFn {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        if r.lo.len() != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: r.lo.len(),
            });
        }
        GridFn::new(Cuboid::new(r.lo, r.hi)?, r.cells, r.values)
    }
}

impl From<&GridFn> for GridRepr {
    fn from(g: &GridFn) -> Self {
        GridRepr {
            dim: g.dim(),
            lo: g.domain.lo().to_vec(),
            hi: g.domain.hi().to_vec(),
            cells: g.cells.clone(),
            values: g.values.clone(),
        }
    }
}
