use serde::{Deserialize, Serialize};

use super::worst;
use crate::constructions::{RealLinearMatMap, RealSpace};
use crate::error::{Error, Result};
use crate::herm_space::HermMap;
use crate::linalg::{herm_eig, svd, unitary_defect, ComplexMatrix, C64, I};
use crate::tolerance::{tol_classify, tol_eig, CLUSTER_TOL};

/// Either a recovered normal form or the reason none exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Recovery<T> {
    Found(T),
    NotAPreserver { reason: String, residual: f64 },
}

impl<T> Recovery<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Recovery::Found(t) => Some(t),
            Recovery::NotAPreserver { .. } => None,
        }
    }

    fn reject(reason: impl Into<String>, residual: f64) -> Self {
        Recovery::NotAPreserver { reason: reason.into(), residual }
    }
}

/// `X = U (I_p ⊕ 0_q ⊕ ⊕ s_j I_{m_j}) V` and
/// `Y = U (0_p ⊕ W ⊕ ⊕ i√(1 − s_j²) H_j) V` for a pair with `X ± Y` unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryPairForm {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub p: usize,
    pub q: usize,
    /// `(s_j, m_j)` with `1 > s_1 > … > s_r > 0`.
    pub blocks: Vec<(f64, usize)>,
    pub w: ComplexMatrix,
    /// Hermitian unitaries `H_j`.
    pub h: Vec<ComplexMatrix>,
    /// `max(‖X − X̂‖_F, ‖Y − Ŷ‖_F)`.
    pub residual: f64,
}

impl UnitaryPairForm {
    pub fn reconstruct(&self) -> (ComplexMatrix, ComplexMatrix) {
        let m = self.u.rows();
        let mut dx = ComplexMatrix::zeros(m, m);
        let mut dy = ComplexMatrix::zeros(m, m);
        for i in 0..self.p {
            dx[(i, i)] = C64::new(1.0, 0.0);
        }
        dy.set_block(self.p, self.p, &self.w);
        let mut off = self.p + self.q;
        for ((s, mj), h) in self.blocks.iter().zip(&self.h) {
            for i in 0..*mj {
                dx[(off + i, off + i)] = C64::new(*s, 0.0);
            }
            dy.set_block(off, off, &h.scale(I * (1.0 - s * s).sqrt()));
            off += mj;
        }
        (self.u.matmul(&dx).matmul(&self.v), self.u.matmul(&dy).matmul(&self.v))
    }
}

pub fn unitary_pair_decompose(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<UnitaryPairForm> {
    if !x.is_square() || x.shape() != y.shape() || x.rows() == 0 {
        return Err(Error::DimensionMismatch("X and Y must be square of equal size".into()));
    }
    let m = x.rows();
    let defect = unitary_defect(&(x + y)).max(unitary_defect(&(x - y)));
    if defect.is_nan() || defect > tol_eig(m) {
        return Err(Error::NotUnitaryPair { defect });
    }
    // X = U Σ V*; the singular values lie in [0, 1].
    let d = svd(x)?;
    let sig = &d.sigma;
    let ones: Vec<usize> = (0..m).filter(|&i| sig[i] > 1.0 - CLUSTER_TOL).collect();
    let zeros: Vec<usize> = (0..m).filter(|&i| sig[i] < CLUSTER_TOL).collect();
    let mids: Vec<usize> = (0..m).filter(|&i| sig[i] <= 1.0 - CLUSTER_TOL && sig[i] >= CLUSTER_TOL).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &mids {
        match clusters.last_mut() {
            Some(c) if sig[*c.last().unwrap()] - sig[i] <= CLUSTER_TOL => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let order: Vec<usize> = ones.iter().chain(&zeros).chain(clusters.iter().flatten()).copied().collect();
    let u = d.u.select_cols(&order);
    let v = d.v.select_cols(&order).adjoint();
    let inner = u.adjoint().matmul(y).matmul(&v.adjoint());

    let (p, q) = (ones.len(), zeros.len());
    let w = inner.block(p, p, q, q);
    let mut blocks = Vec::new();
    let mut h = Vec::new();
    let mut off = p + q;
    for c in &clusters {
        let s = c.iter().map(|&i| sig[i]).sum::<f64>() / c.len() as f64;
        let mj = c.len();
        let hj = inner.block(off, off, mj, mj).scale(-I / (1.0 - s * s).sqrt()).hermitian_part();
        blocks.push((s, mj));
        h.push(hj);
        off += mj;
    }
    let mut form = UnitaryPairForm { u, v, p, q, blocks, w, h, residual: 0.0 };
    let (xr, yr) = form.reconstruct();
    form.residual = xr.dist(x).max(yr.dist(y));
    if form.residual.is_nan() || form.residual > tol_classify(m) {
        return Err(Error::NotUnitaryPair { defect: form.residual });
    }
    Ok(form)
}

fn pauli() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    [
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_rows(&[&[z, -I], &[I, z]]),
        ComplexMatrix::diag_real(&[1.0, -1.0]),
    ]
}

/// `f(A) = U (A ⊗ I_n) V` on `H^0_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H0uForm {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub n: usize,
    /// Largest `‖f(E) − U(E ⊗ I_n)V‖_F` over the basis of `H^0_2`.
    pub residual: f64,
}

impl H0uForm {
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.u.matmul(&a.kron(&ComplexMatrix::identity(self.n))).matmul(&self.v)
    }
}

fn check_h02(domain: RealSpace) -> Result<()> {
    if domain != (RealSpace::Herm { n: 2, traceless: true }) {
        return Err(Error::DimensionMismatch("map must be defined on H^0_2".into()));
    }
    Ok(())
}

/// Recovers `f(A) = U (A ⊗ I_n) V` for a real-linear `f: H^0_2 → M_m`
/// sending trace-zero hermitian involutions to unitaries.
pub fn classify_h0u(f: &RealLinearMatMap) -> Result<Recovery<H0uForm>> {
    check_h02(f.domain)?;
    let (m, mc) = f.codomain.shape();
    if m != mc {
        return Err(Error::DimensionMismatch("codomain must be square".into()));
    }
    let tol = tol_classify(m);
    if !m.is_multiple_of(2) {
        return Ok(Recovery::reject(format!("codomain size {m} is odd"), f64::INFINITY));
    }
    let n = m / 2;
    let [sx, _, sz] = pauli();
    let sy_neg = ComplexMatrix::from_rows(&[&[C64::new(0.0, 0.0), I], &[-I, C64::new(0.0, 0.0)]]);
    let u0 = f.apply_unchecked(&sz);
    let d0 = unitary_defect(&u0);
    if d0.is_nan() || d0 > tol {
        return Ok(Recovery::reject("image of diag(1,-1) is not unitary", d0));
    }
    let h = u0.adjoint().matmul(&f.apply_unchecked(&sx)).scale(-I);
    let kk = u0.adjoint().matmul(&f.apply_unchecked(&sy_neg)).scale(-I);
    let id = ComplexMatrix::identity(m);
    let structural = worst([
        h.hermitian_defect(),
        kk.hermitian_defect(),
        h.matmul(&h).dist_max(&id),
        kk.matmul(&kk).dist_max(&id),
        h.jordan(&kk).max_abs(),
    ]);
    if structural.is_nan() || structural > tol {
        return Ok(Recovery::reject("images violate the anticommutation structure", structural));
    }
    // i·H·K is a hermitian involution whose +1 eigenspace is the first half of V*.
    let j = h.matmul(&kk).scale(I).hermitian_part();
    let e = herm_eig(&j)?;
    let plus = e.vectors_where(|v| v > 0.0);
    if plus.cols() != n {
        return Ok(Recovery::reject("unbalanced eigenspaces", f64::INFINITY));
    }
    let v_adj = ComplexMatrix::hstack(&[&plus, &kk.hermitian_part().matmul(&plus)]);
    let mut sign = vec![1.0; n];
    sign.resize(m, -1.0);
    let u = u0.matmul(&v_adj).matmul(&ComplexMatrix::diag_real(&sign));
    let mut form = H0uForm { u, v: v_adj.adjoint(), n, residual: 0.0 };
    let basis = crate::herm_space::HermBasis::traceless(2);
    form.residual = worst(basis.elements().map(|b| f.apply_unchecked(&b).dist(&form.apply(&b))));
    if form.residual.is_nan() || form.residual > tol {
        return Ok(Recovery::reject("reconstruction residual above tolerance", form.residual));
    }
    Ok(Recovery::Found(form))
}

/// `f(A) = U ((A ⊗ I_p) ⊕ (−A ⊗ I_q)) U*` on `H^0_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2mForm {
    pub u: ComplexMatrix,
    pub p: usize,
    pub q: usize,
    pub residual: f64,
}

impl C2mForm {
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let plus = a.kron(&ComplexMatrix::identity(self.p));
        let minus = (-a).kron(&ComplexMatrix::identity(self.q));
        self.u.congruence(&ComplexMatrix::direct_sum(&[&plus, &minus]))
    }
}

/// Recovers `f(A) = U ((A ⊗ I_p) ⊕ (−A ⊗ I_q)) U*` for a linear
/// `f: H^0_2 → H_m` sending trace-zero involutions to hermitian unitaries.
pub fn classify_c2m(f: &HermMap) -> Result<Recovery<C2mForm>> {
    check_h02(RealSpace::herm(f.domain))?;
    let m = f.codomain.n;
    let tol = tol_classify(m);
    if !m.is_multiple_of(2) {
        return Ok(Recovery::reject(format!("codomain size {m} is odd"), f64::INFINITY));
    }
    let [sx, sy, sz] = pauli();
    let (hx, hy, hz) = (f.apply_unchecked(&sx), f.apply_unchecked(&sy), f.apply_unchecked(&sz));
    let id = ComplexMatrix::identity(m);
    let inv = worst([hx.matmul(&hx).dist_max(&id), hy.matmul(&hy).dist_max(&id), hz.matmul(&hz).dist_max(&id)]);
    if inv.is_nan() || inv > tol {
        return Ok(Recovery::reject("images of Pauli matrices are not involutions", inv));
    }
    // −i·Hx·Hy·Hz is +1 on the A-copies and −1 on the −A copies.
    let c = hx.matmul(&hy).matmul(&hz).scale(-I);
    let c_defect = c.hermitian_defect();
    if c_defect.is_nan() || c_defect > tol {
        return Ok(Recovery::reject("Pauli images do not close up", c_defect));
    }
    let ce = herm_eig(&c.hermitian_part())?;
    let plus = ce.vectors_where(|v| v > 0.0);
    let minus = ce.vectors_where(|v| v <= 0.0);
    if plus.cols() % 2 != 0 || minus.cols() % 2 != 0 {
        return Ok(Recovery::reject("odd-dimensional sign sectors", f64::INFINITY));
    }
    let eigen_in = |frame: &ComplexMatrix, want_plus: bool| -> Result<ComplexMatrix> {
        if frame.cols() == 0 {
            return Ok(ComplexMatrix::zeros(m, 0));
        }
        let local = frame.adjoint().matmul(&hz).matmul(frame).hermitian_part();
        let e = herm_eig(&local)?;
        let sel = e.vectors_where(|v| (v > 0.0) == want_plus);
        Ok(frame.matmul(&sel))
    };
    let ep = eigen_in(&plus, true)?;
    let fq = eigen_in(&minus, false)?;
    let (p, q) = (plus.cols() / 2, minus.cols() / 2);
    if ep.cols() != p || fq.cols() != q {
        return Ok(Recovery::reject("unbalanced eigenspaces", f64::INFINITY));
    }
    let hx_ep = hx.matmul(&ep);
    let hx_fq = (-&hx).matmul(&fq);
    let u = ComplexMatrix::hstack(&[&ep, &hx_ep, &fq, &hx_fq]);
    let mut form = C2mForm { u, p, q, residual: 0.0 };
    form.residual = worst(f.domain.elements().map(|b| f.apply_unchecked(&b).dist(&form.apply(&b))));
    if form.residual.is_nan() || form.residual > tol {
        return Ok(Recovery::reject("reconstruction residual above tolerance", form.residual));
    }
    Ok(Recovery::Found(form))
}
