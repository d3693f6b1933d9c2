use super::class::{probe_residual, PreserverClass, PreserverForm};
use super::phraz::phraz_decompose;
use super::unitary::{classify_c2m, classify_h0u, Recovery};
use crate::error::{Error, Result};
use crate::herm_space::HermMap;
use crate::linalg::ComplexMatrix;
use crate::tolerance::tol_classify;

/// Copies column `index` of `frame` into column `col` of `w`, starting at row `row0`.
fn place(w: &mut ComplexMatrix, col: usize, row0: usize, frame: &ComplexMatrix, index: usize) {
    for r in 0..frame.rows() {
        w[(row0 + r, col)] = frame[(r, index)];
    }
}

fn two_by_two(t: f64, off: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[t, off], &[off, 1.0 - t]])
}

/// Recovers `f(A) = (tr A) P_0` or `f(A) = U (A ⊗ P_0 + ((tr A) I − A) ⊗ Q_0) U*`
/// for a linear map on `H_2` sending rank-one projections to projections.
///
/// `(P_0, Q_0)` come out in the joint canonical form of two projections, so
/// only their unitary-equivalence class is meaningful. A preserver whose
/// `f(I)` has an eigenvalue of odd multiplicity other than 0 or 2 has no
/// tensor form and yields [`Error::TensorFormUnavailable`].
pub fn classify_dim2(f: &HermMap, seed: u64) -> Result<PreserverClass> {
    if f.domain.traceless || f.domain.n != 2 {
        return Err(Error::DimensionMismatch("classify_dim2 needs a map on H_2".into()));
    }
    let tol = tol_classify(f.codomain.n);
    let dec = match phraz_decompose(f, 1) {
        Ok(d) => d,
        Err(Error::NotAPreserver(reason)) => return Ok(PreserverClass::not_a_preserver(reason, f64::INFINITY)),
        Err(e) => return Err(e),
    };

    if dec.p == 0 && dec.r == 0 {
        let p0 = f.apply_unchecked(&ComplexMatrix::diag_real(&[1.0, 0.0])).hermitian_part();
        let form = PreserverForm::Constant { p0, k: 1 };
        return finish(f, form, seed, tol);
    }
    if dec.m % 2 != 0 {
        return Err(Error::TensorFormUnavailable(format!(
            "the common range of f(diag(1,0)) and f(diag(0,1)) has odd dimension {}",
            dec.m
        )));
    }

    let (m, p) = (dec.m, dec.p);
    let (u0, q_plus) = match &dec.phi0 {
        Some(phi0) => match classify_c2m(&phi0.restrict_traceless()?)? {
            Recovery::Found(c) => (c.u, c.p),
            Recovery::NotAPreserver { reason, residual } => {
                return Ok(PreserverClass::not_a_preserver(format!("central block: {reason}"), residual))
            }
        },
        None => (ComplexMatrix::zeros(0, 0), 0),
    };
    let mut blocks = Vec::with_capacity(dec.r);
    for (j, phi) in dec.phij.iter().enumerate() {
        match classify_h0u(phi)? {
            Recovery::Found(h) => blocks.push(h),
            Recovery::NotAPreserver { reason, residual } => {
                return Ok(PreserverClass::not_a_preserver(format!("block {j}: {reason}"), residual))
            }
        }
    }

    // Tensor factor layout: [I_{m/2} | q+ | p − q+ | (n_j copies of a 2-dim block) per j].
    let half_m = m / 2;
    let n_t = half_m + p + dec.mult.iter().sum::<usize>();
    let local = dec.span_dim();
    let mut w = ComplexMatrix::zeros(local, 2 * n_t);
    let mut p0_diag = vec![ComplexMatrix::identity(half_m)];
    let mut q0_diag = vec![ComplexMatrix::identity(half_m)];
    let id_m = ComplexMatrix::identity(m);
    for a in 0..2 {
        for c in 0..half_m {
            place(&mut w, a * n_t + c, 0, &id_m, a * half_m + c);
        }
        for i in 0..q_plus {
            place(&mut w, a * n_t + half_m + i, m, &u0, a * q_plus + i);
        }
        for i in 0..p - q_plus {
            place(&mut w, a * n_t + half_m + q_plus + i, m, &u0, 2 * q_plus + a * (p - q_plus) + i);
        }
    }
    p0_diag.push(ComplexMatrix::identity(q_plus));
    p0_diag.push(ComplexMatrix::zeros(p - q_plus, p - q_plus));
    q0_diag.push(ComplexMatrix::zeros(q_plus, q_plus));
    q0_diag.push(ComplexMatrix::identity(p - q_plus));

    let mut row0 = m + 2 * p;
    let mut col0 = half_m + p;
    for ((h, &tj), &mj) in blocks.iter().zip(&dec.t).zip(&dec.mult) {
        // Local block = D (R ⊗ A + R' ⊗ (tr A − A)) ⊗ I_{n_j} D* with D = V* ⊕ U.
        let d = ComplexMatrix::direct_sum(&[&h.v.adjoint(), &h.u]);
        let nj = h.n;
        for a in 0..2 {
            for i in 0..nj {
                for o in 0..2 {
                    place(&mut w, a * n_t + col0 + 2 * i + o, row0, &d, o * mj + a * nj + i);
                }
            }
        }
        let off = (tj * (1.0 - tj)).sqrt();
        for _ in 0..nj {
            p0_diag.push(two_by_two(tj, off));
            q0_diag.push(two_by_two(tj, -off));
        }
        row0 += 2 * mj;
        col0 += mj;
    }

    let u = dec.basis.matmul(&w);
    let p0 = ComplexMatrix::direct_sum(&p0_diag.iter().collect::<Vec<_>>());
    let q0 = ComplexMatrix::direct_sum(&q0_diag.iter().collect::<Vec<_>>());
    debug_assert_eq!(p0.rows(), n_t);
    finish(f, PreserverForm::Dim2Tensor { u, p0, q0 }, seed, tol)
}

fn finish(f: &HermMap, form: PreserverForm, seed: u64, tol: f64) -> Result<PreserverClass> {
    let residual = probe_residual(f, 1, seed, |a| form.apply(a).expect("form is a preserver"));
    if residual.is_nan() || residual > tol {
        return Ok(PreserverClass::not_a_preserver("recovered form does not reconstruct the map", residual));
    }
    Ok(PreserverClass { form, residual })
}
