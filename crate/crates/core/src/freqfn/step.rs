use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boxcalc::{BoxSet, Cuboid};
use crate::error::{Error, Result};

use super::value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(flatten)]
    pub region: Cuboid,
    #[serde(with = "value")]
    pub value: Complex64,
}

/// Piecewise constant function on finitely many disjoint rational boxes,
/// zero elsewhere. Zero-valued pieces are dropped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFn {
    dim: usize,
    pieces: Vec<Piece>,
    bounds: Vec<(Vec<f64>, Vec<f64>)>,
}

impl StepFn {
    pub fn new(dim: usize, pieces: Vec<(Cuboid, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let pieces: Vec<Piece> = pieces
            .into_iter()
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .map(|(region, value)| Piece { region, value })
            .collect();
        if let Some(p) = pieces.iter().find(|p| p.region.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.region.dim(),
            });
        }
        if let Some(p) = pieces.iter().find(|p| !(p.value.re.is_finite() && p.value.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite value {}", p.value)));
        }
        let raw: Vec<Cuboid> = pieces.iter().map(|p| p.region.clone()).collect();
        let total: crate::Rat = raw.iter().map(Cuboid::measure).sum();
        if BoxSet::normalize(dim, raw)?.measure() != total {
            return Err(Error::InvalidParameter("step function pieces overlap".into()));
        }
        Ok(Self::from_disjoint(dim, pieces))
    }

    /// Skips the overlap check; callers guarantee disjoint nonzero pieces.
    pub(crate) fn from_disjoint(dim: usize, pieces: Vec<Piece>) -> Self {
        let bounds = pieces
            .iter()
            .map(|p| (p.region.lo_f64(), p.region.hi_f64()))
            .collect();
        StepFn {
            dim,
            pieces,
            bounds,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_disjoint(dim, Vec::new())
    }

    /// `value * indicator(set)`.
    pub fn indicator(set: &BoxSet, value: Complex64) -> Self {
        let pieces = if value == Complex64::new(0.0, 0.0) {
            Vec::new()
        } else {
            set.boxes()
                .iter()
                .map(|b| Piece {
                    region: b.clone(),
                    value,
                })
                .collect()
        };
        Self::from_disjoint(set.dim(), pieces)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, point: &[f64]) -> Complex64 {
        for (p, (lo, hi)) in self.pieces.iter().zip(&self.bounds) {
            if point
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&l, &h))| l <= x && x < h)
            {
                return p.value;
            }
        }
        Complex64::new(0.0, 0.0)
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> StepFn {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                region: p.region.clone(),
                value: f(p.value),
            })
            .filter(|p| p.value != Complex64::new(0.0, 0.0))
            .collect();
        Self::from_disjoint(self.dim, pieces)
    }
}

#[derive(Serialize, Deserialize)]
pub(super) struct StepRepr {
    pub dim: usize,
    pub pieces: Vec<Piece>,
}

impl TryFrom<StepRepr> for StepFn {
    type Error = Error;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFn::new(r.dim, r.pieces.into_iter().map(|p| (p.region, p.value)).collect())
    }
}

impl From<&StepFn> for StepRepr {
    fn from(s: &StepFn) -> Self {
        StepRepr {
            dim: s.dim,
            pieces: s.pieces.clone(),
        }
    }
}
