use super::class::{probe_residual, PreserverClass, PreserverForm};
use super::{recover_congruence, worst};
use crate::error::{Error, Result};
use crate::herm_space::{HermBasis, HermMap};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::sampling::{random_involution, random_traceless_hermitian, rng};
use crate::tolerance::tol_classify;

/// Sampled involutions that must map to involutions before recovery starts.
pub const INVOLUTION_CHECKS: usize = 200;

/// Least-squares `β` in `i[f(A), f(B)] = β·f(i[A, B])` for random trace-zero
/// `A, B`: `+1` for `Ad_U`, `−1` for `Ad_U ∘ conj`, and `s` times those when
/// the map carries a sign `s`.
pub fn bracket_sign(f: &HermMap, seed: u64) -> f64 {
    let n = f.domain.n;
    let mut g = rng(seed);
    let a = random_traceless_hermitian(n, &mut g);
    let b = random_traceless_hermitian(n, &mut g);
    let lhs = f.apply_unchecked(&a).i_commutator(&f.apply_unchecked(&b));
    let rhs = f.apply_unchecked(&a.i_commutator(&b));
    let dot: f64 = lhs.data().iter().zip(rhs.data()).map(|(x, y)| (x.conj() * y).re).sum();
    dot / rhs.frobenius_norm().powi(2)
}

fn remove_trace(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    a - &ComplexMatrix::identity(n).scale_real(a.trace().re / n as f64)
}

/// Largest distance of `f(A)` from a trace-zero involution over sampled `A`.
fn involution_defect(f: &HermMap, k: usize, seed: u64) -> f64 {
    let mut g = rng(seed);
    let id = ComplexMatrix::identity(2 * k);
    worst((0..INVOLUTION_CHECKS).map(|_| {
        let img = f.apply_unchecked(&random_involution(k, &mut g));
        worst([img.hermitian_defect(), img.trace().norm(), img.matmul(&img).dist_max(&id)])
    }))
}

/// Recovers `f(A) = s U A U*` or `f(A) = s U Ā U*` for a linear map of
/// `H^0_{2k}` sending involutions to involutions.
///
/// For `k = 1` the conjugate branch coincides with a linear one, since
/// `Ā = −σ_y A σ_y` on `H^0_2`; the linear representative is returned.
pub fn classify_iho(f: &HermMap, seed: u64) -> Result<PreserverClass> {
    let n = f.domain.n;
    if !f.domain.traceless || !f.codomain.traceless || f.codomain.n != n || !n.is_multiple_of(2) {
        return Err(Error::DimensionMismatch("classify_iho needs a map H^0_2k -> H^0_2k".into()));
    }
    let k = n / 2;
    let tol = tol_classify(n);
    let defect = involution_defect(f, k, seed);
    if defect.is_nan() || defect > tol {
        return Ok(PreserverClass::not_a_preserver("sampled involutions do not map to involutions", defect));
    }
    let beta = bracket_sign(f, seed ^ 0x5eed);
    let beta = if beta >= 0.0 { 1i8 } else { -1i8 };

    let (s, conj) = if k == 1 {
        (beta, false)
    } else {
        // f(A) has the spectrum of s·A under both branches.
        let a = random_traceless_hermitian(n, &mut rng(seed ^ 0xa11ce));
        let ea = herm_eig(&a)?.values;
        let ef = herm_eig(&f.apply_unchecked(&a).hermitian_part())?.values;
        let plus: f64 = ea.iter().zip(&ef).map(|(x, y)| (x - y).abs()).sum();
        let minus: f64 = ea.iter().rev().zip(&ef).map(|(x, y)| (x + y).abs()).sum();
        let s = if plus <= minus { 1i8 } else { -1i8 };
        (s, beta == -s)
    };

    let sign = s as f64;
    let g = |h: &ComplexMatrix| {
        let h0 = remove_trace(h);
        let arg = if conj { h0.conj() } else { h0 };
        &f.apply_unchecked(&arg).scale_real(sign) + &ComplexMatrix::identity(n).scale_real(h.trace().re / n as f64)
    };
    let Some(u) = recover_congruence(&g, n) else {
        return Ok(PreserverClass::not_a_preserver("congruence probe vanished", f64::INFINITY));
    };
    let form = PreserverForm::TraceZeroUnitaryForm { u, s, conj };
    let residual = probe_residual(f, k, seed, |a| form.apply(a).expect("form is a preserver"));
    if residual.is_nan() || residual > tol {
        return Ok(PreserverClass::not_a_preserver("no sign/conjugation branch reconstructs the map", residual));
    }
    Ok(PreserverClass { form, residual })
}

/// `A ↦ s U A U*` (or `s U Ā U*`) as a map of `H^0_n`.
pub fn trace_zero_form_map(u: &ComplexMatrix, s: i8, conj: bool) -> Result<HermMap> {
    let basis = HermBasis::traceless(u.rows());
    let form = PreserverForm::TraceZeroUnitaryForm { u: u.clone(), s, conj };
    HermMap::from_fn(basis, basis, |a| form.apply(a).expect("form is a preserver"))
}
