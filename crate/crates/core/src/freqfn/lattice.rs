use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, Rat};

use super::FreqFn;

/// The lattice `cℤ^d`. Diagonal generators stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub enum Lattice {
    Diagonal(Vec<Rat>),
    General(DMatrix<f64>),
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat_vec")]
    diag: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

mod opt_rat_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational::serde_rat_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rat>>, D::Error> {
        rational::serde_rat_vec::deserialize(d).map(Some)
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: r.len(),
        });
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        match (r.diag, r.matrix) {
            (Some(d), None) => Lattice::diagonal(d),
            (None, Some(m)) => Lattice::general(matrix_from_rows(&m)?),
            _ => Err(Error::Parse("lattice needs exactly one of \"diag\" or \"matrix\"".into())),
        }
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        match l {
            Lattice::Diagonal(d) => LatticeRepr {
                diag: Some(d),
                matrix: None,
            },
            Lattice::General(m) => LatticeRepr {
                diag: None,
                matrix: Some(matrix_rows(&m)),
            },
        }
    }
}

impl Lattice {
    pub fn diagonal(entries: Vec<Rat>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(axis) = entries.iter().position(num_traits::Zero::is_zero) {
            return Err(Error::ZeroScale { axis });
        }
        Ok(Lattice::Diagonal(entries))
    }

    pub fn scalar(c: Rat, dim: usize) -> Result<Self> {
        Lattice::diagonal(vec![c; dim])
    }

    pub fn general(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        if !m.iter().all(|x| x.is_finite()) || m.determinant().abs() == 0.0 {
            return Err(Error::Singular);
        }
        Ok(Lattice::General(m))
    }

    pub fn dim(&self) -> usize {
        match self {
            Lattice::Diagonal(d) => d.len(),
            Lattice::General(m) => m.nrows(),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            Lattice::Diagonal(d) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d.len(), d.iter().map(rational::to_f64)))
            }
            Lattice::General(m) => m.clone(),
        }
    }

    pub fn diag(&self) -> Option<&[Rat]> {
        match self {
            Lattice::Diagonal(d) => Some(d),
            Lattice::General(_) => None,
        }
    }

    pub fn det_abs(&self) -> f64 {
        self.matrix().determinant().abs()
    }

    /// The lattice point `c k`.
    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        let kf: Vec<f64> = k.iter().map(|&x| x as f64).collect();
        linalg::mat_vec(&self.matrix(), &kf)
    }
}

/// Covering radius of a lattice, with a flag telling whether it is exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub rho: f64,
    pub exact: bool,
}

/// `sup_x min_γ |x − γ|`.
///
/// Diagonal lattices give `½ √Σ c_i²` exactly. For a general matrix the
/// fundamental parallelotope is sampled on a `32^d` grid; the largest sampled
/// distance plus the sampling radius is an upper bound.
pub fn gap_of_lattice(lattice: &Lattice) -> Result<Gap> {
    match lattice {
        Lattice::Diagonal(d) => {
            let s: f64 = d.iter().map(|c| rational::to_f64(c).powi(2)).sum();
            Ok(Gap {
                rho: 0.5 * s.sqrt(),
                exact: true,
            })
        }
        Lattice::General(m) => {
            let dim = m.nrows();
            if m.determinant().abs() == 0.0 {
                return Err(Error::Singular);
            }
            let per_axis: usize = if dim <= 3 { 32 } else { 8 };
            let total = per_axis.pow(dim as u32);
            let neighbours = neighbour_offsets(dim);
            let mut worst: f64 = 0.0;
            let mut t = vec![0.0; dim];
            for flat in 0..total {
                let mut rest = flat;
                for ti in t.iter_mut() {
                    *ti = ((rest % per_axis) as f64 + 0.5) / per_axis as f64;
                    rest /= per_axis;
                }
                let x = linalg::mat_vec(m, &t);
                let nearest = neighbours
                    .iter()
                    .map(|k| {
                        let g = linalg::mat_vec(m, k);
                        linalg::norm2(&x.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>())
                    })
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
            }
            let slack = linalg::op_norm(m) * 0.5 / per_axis as f64 * (dim as f64).sqrt();
            Ok(Gap {
                rho: (worst + slack) * (1.0 + 1e-12),
                exact: false,
            })
        }
    }
}

fn neighbour_offsets(dim: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v: Vec<f64>| {
                [-1.0, 0.0, 1.0, 2.0].into_iter().map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// A dilation matrix. An exact rational scalar is kept when `a = sI`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DilationRepr", into = "DilationRepr")]
pub struct Dilation {
    matrix: DMatrix<f64>,
    scalar: Option<Rat>,
    expansive: bool,
}

#[derive(Serialize, Deserialize)]
struct DilationRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    scalar: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

mod opt_rat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational::serde_rat::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rat>, D::Error> {
        rational::serde_rat::deserialize(d).map(Some)
    }
}

impl TryFrom<DilationRepr> for Dilation {
    type Error = Error;
    fn try_from(r: DilationRepr) -> Result<Self> {
        match (r.scalar, r.matrix) {
            (Some(s), None) => Dilation::scalar(s, r.dim.unwrap_or(1)),
            (None, Some(m)) => Dilation::new(matrix_from_rows(&m)?),
            _ => Err(Error::Parse("dilation needs exactly one of \"scalar\" or \"matrix\"".into())),
        }
    }
}

impl From<Dilation> for DilationRepr {
    fn from(a: Dilation) -> Self {
        match a.scalar {
            Some(s) => DilationRepr {
                dim: Some(a.matrix.nrows()),
                scalar: Some(s),
                matrix: None,
            },
            None => DilationRepr {
                dim: None,
                scalar: None,
                matrix: Some(matrix_rows(&a.matrix)),
            },
        }
    }
}

impl Dilation {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        if !matrix.iter().all(|x| x.is_finite()) || matrix.determinant().abs() == 0.0 {
            return Err(Error::Singular);
        }
        let expansive = linalg::min_eigen_modulus(&matrix) > 1.0 + 1e-9;
        Ok(Dilation {
            matrix,
            scalar: None,
            expansive,
        })
    }

    pub fn scalar(s: Rat, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut a = Dilation::new(DMatrix::identity(dim, dim) * rational::to_f64(&s))?;
        a.scalar = Some(s);
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn scalar_value(&self) -> Option<&Rat> {
        self.scalar.as_ref()
    }

    pub fn is_expansive(&self) -> bool {
        self.expansive
    }

    pub fn min_eigen_modulus(&self) -> f64 {
        linalg::min_eigen_modulus(&self.matrix)
    }

    pub fn require_expansive(&self) -> Result<()> {
        if self.expansive {
            Ok(())
        } else {
            Err(Error::NotExpansive {
                min_modulus: self.min_eigen_modulus(),
            })
        }
    }

    pub fn det_abs(&self) -> f64 {
        self.matrix.determinant().abs()
    }

    /// `b = (a^{-1})^T`, the dilation acting on the frequency side.
    pub fn frequency_matrix(&self) -> Result<DMatrix<f64>> {
        Ok(linalg::inverse(&self.matrix)?.transpose())
    }
}

/// Translation set of an affine system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Translations {
    Lattice(Lattice),
    /// An explicit separated point list, accepted for verification only.
    Points(Vec<Vec<f64>>),
}

/// The triple `(ψ̂, a, Γ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineRepr")]
pub struct AffineSystemSpec {
    pub generator: FreqFn,
    pub dilation: Dilation,
    pub translations: Translations,
}

#[derive(Deserialize)]
struct AffineRepr {
    generator: FreqFn,
    dilation: Dilation,
    translations: Translations,
}

impl TryFrom<AffineRepr> for AffineSystemSpec {
    type Error = Error;
    fn try_from(r: AffineRepr) -> Result<Self> {
        AffineSystemSpec::new(r.generator, r.dilation, r.translations)
    }
}

impl AffineSystemSpec {
    pub fn new(generator: FreqFn, dilation: Dilation, translations: Translations) -> Result<Self> {
        let d = generator.dim();
        let td = match &translations {
            Translations::Lattice(l) => l.dim(),
            Translations::Points(p) => p.first().map_or(d, Vec::len),
        };
        for found in [dilation.dim(), td] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        let n = generator.l2_norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroFunction);
        }
        Ok(AffineSystemSpec {
            generator,
            dilation,
            translations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn diagonal_gaps() {
        let g = gap_of_lattice(&Lattice::scalar(frac(1, 5), 1).unwrap()).unwrap();
        assert!((g.rho - 0.1).abs() < 1e-15 && g.exact);
        let g = gap_of_lattice(&Lattice::diagonal(vec![frac(3, 10), frac(2, 5)]).unwrap()).unwrap();
        assert!((g.rho - 0.25).abs() < 1e-15);
        let g = gap_of_lattice(&Lattice::scalar(int(1), 2).unwrap()).unwrap();
        assert!((g.rho - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn general_gap_is_an_upper_bound() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let g = gap_of_lattice(&Lattice::general(m).unwrap()).unwrap();
        assert!(!g.exact);
        assert!(g.rho >= 0.5f64.sqrt() && g.rho < 0.5f64.sqrt() + 0.05);
        assert!(Lattice::general(DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn expansiveness() {
        assert!(Dilation::scalar(int(2), 2).unwrap().is_expansive());
        let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        assert!(!Dilation::new(shear).unwrap().is_expansive());
        let a: Dilation = serde_json::from_str(r#"{"scalar":"3/2","dim":2}"#).unwrap();
        assert_eq!(a.scalar_value(), Some(&frac(3, 2)));
        let b: Dilation = serde_json::from_str(r#"{"matrix":[[0,2],[2,0]]}"#).unwrap();
        assert!(b.is_expansive() && b.scalar_value().is_none());
    }
}
