use super::class::{probe_residual, PreserverClass, PreserverForm};
use super::recover_congruence;
use crate::constructions::complement;
use crate::error::{Error, Result};
use crate::herm_space::HermMap;
use crate::linalg::ComplexMatrix;
use crate::tolerance::tol_classify;

/// Decides which form a linear map `H_n → H_N` sending rank-`k` projections
/// to rank-`m` projections takes: constant, congruence (`m = k`), or
/// complemented congruence (`k ≥ 2`, `n = k + m`). The complemented branch
/// is also tried when `m > k`, which covers `L_k` itself.
///
/// Every applicable branch is fitted and the one with the smallest probe
/// residual wins; the conjugation flag is settled the same way.
pub fn classify_phkk(f: &HermMap, k: usize, m: usize, seed: u64) -> Result<PreserverClass> {
    let n = f.domain.n;
    if f.domain.traceless {
        return Err(Error::DimensionMismatch("classify_phkk needs a map defined on all of H_n".into()));
    }
    if k == 0 || k >= n || m > f.codomain.n {
        return Err(Error::BadParameter(format!("need 1 <= k < n and m <= N (n={n}, k={k}, m={m})")));
    }
    let tol = tol_classify(f.codomain.n);
    let fit = |form: PreserverForm| {
        let residual = probe_residual(f, k, seed, |a| form.apply(a).expect("form is a preserver"));
        PreserverClass { form, residual }
    };

    let mut candidates = Vec::new();
    let p0 = f.apply_unchecked(&ComplexMatrix::identity(n)).hermitian_part().scale_real(k as f64 / n as f64);
    candidates.push(fit(PreserverForm::Constant { p0, k }));

    for conj in [false, true] {
        let orient = |h: &ComplexMatrix| if conj { h.conj() } else { h.clone() };
        if m == k {
            let g = |h: &ComplexMatrix| f.apply_unchecked(&orient(h));
            if let Some(u) = recover_congruence(&g, n) {
                candidates.push(fit(PreserverForm::Congruence { u, conj }));
            }
        }
        if k >= 2 && m >= 1 && n == k + m {
            // L_k ∘ L_m is the identity on H_n, so f ∘ L_m is a plain congruence.
            let g = |h: &ComplexMatrix| f.apply_unchecked(&orient(&complement(h, m)));
            if let Some(u) = recover_congruence(&g, n) {
                candidates.push(fit(PreserverForm::ComplementedCongruence { u, conj, k }));
            }
        }
    }

    let best = candidates
        .into_iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("the constant branch is always fitted");
    if best.residual <= tol {
        Ok(best)
    } else {
        Ok(PreserverClass::not_a_preserver(
            format!("no branch reconstructs the map (best was {})", best.tag()),
            best.residual,
        ))
    }
}
