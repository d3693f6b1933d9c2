//! Cyclic two-sided Jacobi for hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation, so the whole
//! step is one 2×2 unitary acting on columns/rows `p, q`.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerance::{tol_sym, MAX_SWEEPS};

/// Hermitian eigendecomposition `A = V diag(values) V*`, values ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled = ComplexMatrix::from_fn(self.vectors.rows(), self.vectors.cols(), |i, j| {
            self.vectors[(i, j)] * self.values[j]
        });
        scaled.matmul(&self.vectors.adjoint())
    }

    /// `‖A·V − V·diag(values)‖_F`.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        let av = a.matmul(&self.vectors);
        let vd = ComplexMatrix::from_fn(self.vectors.rows(), self.vectors.cols(), |i, j| {
            self.vectors[(i, j)] * self.values[j]
        });
        av.dist(&vd)
    }

    /// Columns whose eigenvalue satisfies `keep`, in ascending order.
    pub fn vectors_where(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&j| keep(self.values[j])).collect();
        self.vectors.select_cols(&idx)
    }
}

const OFF_REL: f64 = 1e-15;

/// Eigendecomposition of a hermitian matrix.
///
/// The input is symmetrized before iterating; inputs further than
/// `tol_sym` from hermitian are rejected.
pub fn herm_eig(a: &ComplexMatrix) -> Result<EigDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("herm_eig on {}x{}", a.rows(), a.cols())));
    }
    let defect = a.hermitian_defect();
    if defect > tol_sym(a.max_abs()) {
        return Err(Error::NotHermitian { defect });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweep += 1;
        converged = off_diagonal(&m) <= OFF_REL * scale;
    }
    if !converged {
        return Err(Error::NoConvergence { what: "hermitian Jacobi", sweeps: MAX_SWEEPS });
    }

    let values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(order_and_normalize(values, v, scale))
}

fn off_diagonal(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 || g < 1e-300 {
        return;
    }
    let e = apq / g;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, ē) · [[c, s], [−s, c]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -e.conj() * s;
    let jqq = e.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * jpp + akq * jqp;
        m[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        m[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Index of the first component above `1e-8` in modulus, if any.
pub(crate) fn first_significant(col: &[C64]) -> Option<usize> {
    col.iter().position(|z| z.norm() > 1e-8)
}

/// Rotates the column so that its first significant component is real positive.
pub(crate) fn fix_phase(col: &mut [C64]) {
    if let Some(i) = first_significant(col) {
        let ph = col[i].conj() / col[i].norm();
        for z in col.iter_mut() {
            *z *= ph;
        }
    }
}

fn order_and_normalize(values: Vec<f64>, v: ComplexMatrix, scale: f64) -> EigDecomposition {
    let n = values.len();
    let mut cols: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|j| {
            let mut c = v.col(j);
            fix_phase(&mut c);
            (values[j], c)
        })
        .collect();
    cols.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Ties (within rounding) are ordered by the position and then the size of
    // the first significant component.
    let tie = 1e-12 * scale.max(1e-300);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cols[end].0 - cols[end - 1].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            cols[start..end].sort_by(|a, b| {
                let ia = first_significant(&a.1).unwrap_or(usize::MAX);
                let ib = first_significant(&b.1).unwrap_or(usize::MAX);
                ia.cmp(&ib).then_with(|| {
                    let ma = a.1.get(ia).map_or(0.0, |z| z.norm());
                    let mb = b.1.get(ib).map_or(0.0, |z| z.norm());
                    mb.total_cmp(&ma)
                })
            });
        }
        start = end;
    }

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (j, (val, col)) in cols.into_iter().enumerate() {
        vectors.set_col(j, &col);
        vals.push(val);
    }
    EigDecomposition { values: vals, vectors }
}
