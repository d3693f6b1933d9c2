//! One-sided (Hestenes) complex Jacobi SVD and the polar decomposition.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::MAX_SWEEPS;

/// Full SVD `A = u · diag(sigma) · v*` with `u`, `v` unitary and `sigma`
/// descending, `sigma.len() = min(rows, cols)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut us = ComplexMatrix::zeros(m, n);
        for (j, &s) in self.sigma.iter().enumerate() {
            for i in 0..m {
                us[(i, j)] = self.u[(i, j)] * s;
            }
        }
        us.matmul(&self.v.adjoint())
    }

    /// Number of singular values above `rel · sigma_max`.
    pub fn rank(&self, rel: f64) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel * smax).count()
    }
}


pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd_tall(&a.adjoint())?;
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }
    svd_tall(a)
}

fn svd_tall(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    // Work column-wise: columns stored as vectors.
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    // Pairs count as orthogonal at relative level m·ε, and columns that have
    // shrunk to rounding noise relative to ‖A‖_F are left alone.
    let orth_rel = m as f64 * f64::EPSILON;
    let noise = (f64::EPSILON * a.frobenius_norm()).powi(2);
    let mut converged = n <= 1;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= orth_rel * (alpha * beta).sqrt() || alpha.min(beta) <= noise {
                    continue;
                }
                rotated = true;
                let ph = gamma.conj() / g; // e^{-iθ}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut w, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let yq = *xq * ph;
                        let yp = *xp;
                        *xp = yp * c - yq * s;
                        *xq = yp * s + yq * c;
                    }
                }
            }
        }
        sweep += 1;
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { what: "one-sided Jacobi SVD", sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(f64, usize)> = w
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let smax = order.first().map_or(0.0, |o| o.0);

    let mut sigma = Vec::with_capacity(n);
    let mut u_cols: Vec<Option<Vec<C64>>> = Vec::with_capacity(m);
    let mut vmat = ComplexMatrix::zeros(n, n);
    for (k, &(s, j)) in order.iter().enumerate() {
        sigma.push(s);
        vmat.set_col(k, &v[j]);
        if s > 0.0 && s > 1e-14 * smax {
            u_cols.push(Some(w[j].iter().map(|z| z / s).collect()));
        } else {
            u_cols.push(None);
        }
    }
    u_cols.resize(m, None);
    let u = complete_orthonormal(m, u_cols);
    Ok(Svd { u, sigma, v: vmat })
}

/// Fills the `None` slots with an orthonormal completion: each slot takes
/// the standard basis vector with the largest component outside the span
/// so far (Gram–Schmidt, two passes).
pub(crate) fn complete_orthonormal(m: usize, cols: Vec<Option<Vec<C64>>>) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = cols.iter().flatten().cloned().collect();
    let residual = |basis: &[Vec<C64>], i: usize| {
        let mut e = vec![ZERO; m];
        e[i] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis {
                let proj: C64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= proj * bi;
                }
            }
        }
        let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (nrm, e)
    };
    let mut out = ComplexMatrix::zeros(m, cols.len());
    for (j, c) in cols.into_iter().enumerate() {
        let col = match c {
            Some(c) => c,
            None => {
                let (nrm, e) = (0..m)
                    .map(|i| residual(&basis, i))
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("completion needs a nonempty ambient space");
                assert!(nrm > 1e-8, "orthonormal completion ran out of candidates");
                let e: Vec<C64> = e.iter().map(|z| z / nrm).collect();
                basis.push(e.clone());
                e
            }
        };
        out.set_col(j, &col);
    }
    out
}

/// Polar decomposition `A = unitary · positive` of a square matrix, with
/// `positive = (A*A)^{1/2}`. On a kernel the unitary factor is completed
/// deterministically by the SVD completion.
pub fn polar(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("polar on {}x{}", a.rows(), a.cols())));
    }
    let d = svd(a)?;
    let unitary = d.u.matmul(&d.v.adjoint());
    let n = a.rows();
    let vs = ComplexMatrix::from_fn(n, n, |i, j| d.v[(i, j)] * d.sigma[j]);
    let positive = vs.matmul(&d.v.adjoint()).hermitian_part();
    Ok((unitary, positive))
}

/// Operator (spectral) norm.
pub fn op_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    Ok(svd(a)?.sigma[0])
}
