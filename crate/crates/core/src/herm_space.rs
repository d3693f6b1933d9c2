//! Real coordinates on the hermitian spaces `H_n` and `H_n^0`, and real
//! linear maps between them stored as real matrices.
//!
//! Canonical basis order (frozen; every file format depends on it):
//!
//! 1. diagonal part: `E_jj` for `j = 1..n`, or, in the traceless case, the
//!    generalized Gell-Mann elements
//!    `G_l = (Σ_{j≤l} E_jj − l·E_{l+1,l+1}) / √(l(l+1))` for `l = 1..n−1`;
//! 2. for each pair `j < k` in lexicographic order, `S_jk = (E_jk + E_kj)/√2`
//!    followed by `A_jk` with `(A_jk)_{jk} = −i/√2`, `(A_jk)_{kj} = i/√2`.
//!
//! The basis is Frobenius-orthonormal, so coordinates are `tr(e_i A)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::tolerance::{tol_eig, tol_sym};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// The canonical orthonormal basis of `H_n` (or `H_n^0` when traceless).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HermBasis {
    pub n: usize,
    pub traceless: bool,
}

impl HermBasis {
    pub fn new(n: usize, traceless: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("hermitian basis needs n >= 1".into()));
        }
        Ok(HermBasis { n, traceless })
    }

    pub fn full(n: usize) -> Self {
        HermBasis { n, traceless: false }
    }

    pub fn traceless(n: usize) -> Self {
        HermBasis { n, traceless: true }
    }

    fn diag_count(&self) -> usize {
        if self.traceless {
            self.n - 1
        } else {
            self.n
        }
    }

    /// `n²`, or `n² − 1` when traceless.
    pub fn dim(&self) -> usize {
        self.diag_count() + self.n * (self.n - 1)
    }

    /// Basis element `i`.
    pub fn element(&self, i: usize) -> ComplexMatrix {
        let mut coords = vec![0.0; self.dim()];
        coords[i] = 1.0;
        self.decode_coords(&coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = ComplexMatrix> + '_ {
        (0..self.dim()).map(|i| self.element(i))
    }

    fn check(&self, a: &ComplexMatrix) -> Result<()> {
        if a.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a basis of H_{}",
                a.rows(),
                a.cols(),
                self.n
            )));
        }
        let defect = a.hermitian_defect();
        let tol = tol_sym(a.max_abs());
        if defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        if self.traceless {
            let trace = a.trace().re;
            if trace.abs() > tol.max(tol_eig(self.n) * a.max_abs()) {
                return Err(Error::NotTraceless { trace });
            }
        }
        Ok(())
    }

    /// Coordinates of a hermitian matrix (no validation).
    pub(crate) fn encode_unchecked(&self, a: &ComplexMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        if self.traceless {
            let mut prefix = 0.0;
            for l in 1..n {
                prefix += a[(l - 1, l - 1)].re;
                let lf = l as f64;
                out.push((prefix - lf * a[(l, l)].re) / (lf * (lf + 1.0)).sqrt());
            }
        } else {
            out.extend((0..n).map(|j| a[(j, j)].re));
        }
        for j in 0..n {
            for k in j + 1..n {
                // tr(S_jk A) and tr(A_jk A), averaged over the two triangles.
                let up = a[(j, k)];
                let lo = a[(k, j)].conj();
                let z = (up + lo) * 0.5;
                out.push(SQRT2 * z.re);
                out.push(-SQRT2 * z.im);
            }
        }
        out
    }

    pub(crate) fn decode_coords(&self, coords: &[f64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.dim(), "coordinate count");
        let n = self.n;
        let mut a = ComplexMatrix::zeros(n, n);
        let mut it = coords.iter().copied();
        if self.traceless {
            for l in 1..n {
                let c = it.next().unwrap();
                let lf = l as f64;
                let s = c / (lf * (lf + 1.0)).sqrt();
                for j in 0..l {
                    a[(j, j)] += s;
                }
                a[(l, l)] -= lf * s;
            }
        } else {
            for j in 0..n {
                a[(j, j)] = C64::new(it.next().unwrap(), 0.0);
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let s = it.next().unwrap();
                let t = it.next().unwrap();
                let z = C64::new(s, -t) / SQRT2;
                a[(j, k)] = z;
                a[(k, j)] = z.conj();
            }
        }
        a
    }
}

/// Coordinates of a hermitian matrix in a canonical basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermVec {
    pub basis: HermBasis,
    pub coords: Vec<f64>,
}

pub fn canonical_basis(n: usize, traceless: bool) -> Result<HermBasis> {
    HermBasis::new(n, traceless)
}

pub fn encode(a: &ComplexMatrix, basis: HermBasis) -> Result<HermVec> {
    basis.check(a)?;
    Ok(HermVec { basis, coords: basis.encode_unchecked(a) })
}

pub fn decode(v: &HermVec) -> Result<ComplexMatrix> {
    if v.coords.len() != v.basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for a basis of size {}",
            v.coords.len(),
            v.basis.dim()
        )));
    }
    Ok(v.basis.decode_coords(&v.coords))
}

/// Real linear map between hermitian spaces:
/// `matrix` is `codomain.dim() × domain.dim()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermMapJson", into = "HermMapJson")]
pub struct HermMap {
    pub domain: HermBasis,
    pub codomain: HermBasis,
    pub matrix: DMatrix<f64>,
}

/// Wire format:
/// `{"n_in","traceless_in","n_out","traceless_out","matrix":[[...],...]}`.
#[derive(Serialize, Deserialize)]
struct HermMapJson {
    n_in: usize,
    traceless_in: bool,
    n_out: usize,
    traceless_out: bool,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<HermMapJson> for HermMap {
    type Error = Error;

    fn try_from(j: HermMapJson) -> Result<Self> {
        let domain = HermBasis::new(j.n_in, j.traceless_in)?;
        let codomain = HermBasis::new(j.n_out, j.traceless_out)?;
        let (r, c) = (codomain.dim(), domain.dim());
        if j.matrix.len() != r || j.matrix.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(format!("map matrix must be {r}x{c}")));
        }
        if j.matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let matrix = DMatrix::from_fn(r, c, |i, k| j.matrix[i][k]);
        Ok(HermMap { domain, codomain, matrix })
    }
}

impl From<HermMap> for HermMapJson {
    fn from(m: HermMap) -> Self {
        HermMapJson {
            n_in: m.domain.n,
            traceless_in: m.domain.traceless,
            n_out: m.codomain.n,
            traceless_out: m.codomain.traceless,
            matrix: (0..m.matrix.nrows())
                .map(|i| m.matrix.row(i).iter().copied().collect())
                .collect(),
        }
    }
}

/// Map sending basis element `i` of `domain` to `images[i]`.
pub fn map_from_images(
    domain: HermBasis,
    images: &[ComplexMatrix],
    codomain: HermBasis,
) -> Result<HermMap> {
    if images.len() != domain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} images for a domain of dimension {}",
            images.len(),
            domain.dim()
        )));
    }
    let mut matrix = DMatrix::zeros(codomain.dim(), domain.dim());
    for (j, img) in images.iter().enumerate() {
        let v = encode(img, codomain)?;
        for (i, c) in v.coords.into_iter().enumerate() {
            matrix[(i, j)] = c;
        }
    }
    Ok(HermMap { domain, codomain, matrix })
}

pub fn apply(f: &HermMap, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let v = encode(a, f.domain)?;
    Ok(f.apply_coords(&v.coords))
}

impl HermMap {
    /// Builds a map from a closure evaluated on the domain basis. Images are
    /// symmetrized before encoding.
    pub fn from_fn(
        domain: HermBasis,
        codomain: HermBasis,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<HermMap> {
        let images: Vec<ComplexMatrix> = domain.elements().map(|e| f(&e)).collect();
        map_from_images(domain, &images, codomain)
    }

    pub fn identity(basis: HermBasis) -> HermMap {
        let d = basis.dim();
        HermMap { domain: basis, codomain: basis, matrix: DMatrix::identity(d, d) }
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply(self, a)
    }

    pub(crate) fn apply_coords(&self, coords: &[f64]) -> ComplexMatrix {
        let x = DVector::from_column_slice(coords);
        let y = &self.matrix * x;
        self.codomain.decode_coords(y.as_slice())
    }

    /// Evaluates the map on a hermitian matrix without range checks on the
    /// trace (the traceless part is used for traceless domains).
    pub(crate) fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.apply_coords(&self.domain.encode_unchecked(a))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &HermMap) -> Result<HermMap> {
        if inner.codomain != self.domain {
            return Err(Error::DimensionMismatch("compose: inner codomain != outer domain".into()));
        }
        Ok(HermMap {
            domain: inner.domain,
            codomain: self.codomain,
            matrix: &self.matrix * &inner.matrix,
        })
    }

    /// Restriction of a map on `H_n` to `H_n^0`.
    pub fn restrict_traceless(&self) -> Result<HermMap> {
        if self.domain.traceless {
            return Ok(self.clone());
        }
        let dom = HermBasis::traceless(self.domain.n);
        HermMap::from_fn(dom, self.codomain, |e| self.apply_unchecked(e))
    }

    /// Images of the canonical domain basis.
    pub fn basis_images(&self) -> Vec<ComplexMatrix> {
        (0..self.domain.dim())
            .map(|j| {
                let col: Vec<f64> = self.matrix.column(j).iter().copied().collect();
                self.codomain.decode_coords(&col)
            })
            .collect()
    }
}
