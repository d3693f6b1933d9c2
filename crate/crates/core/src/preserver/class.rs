use serde::{Deserialize, Serialize};

use crate::constructions::complement;
use crate::herm_space::HermMap;
use crate::linalg::ComplexMatrix;
use crate::sampling::{random_involution, random_projection, rng};

/// Number of random rank-`k` projections (or involutions, on trace-zero
/// domains) added to the canonical basis when measuring a residual.
pub const PROBE_SAMPLES: usize = 50;

/// Recovered canonical form of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum PreserverForm {
    /// `A ↦ (tr A / k) P_0`.
    Constant { p0: ComplexMatrix, k: usize },
    /// `A ↦ U A U*`, or `U Ā U*` when `conj`.
    Congruence { u: ComplexMatrix, conj: bool },
    /// `A ↦ U ((tr A / k) I − A) U*`, with `Ā` in place of `A` when `conj`.
    ComplementedCongruence { u: ComplexMatrix, conj: bool, k: usize },
    /// `A ↦ U (A ⊗ P_0 + ((tr A) I − A) ⊗ Q_0) U*` on `H_2`.
    Dim2Tensor { u: ComplexMatrix, p0: ComplexMatrix, q0: ComplexMatrix },
    /// `A ↦ s U A U*`, or `s U Ā U*` when `conj`, on `H^0_{2k}`.
    TraceZeroUnitaryForm { u: ComplexMatrix, s: i8, conj: bool },
    NotAPreserver { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreserverClass {
    #[serde(flatten)]
    pub form: PreserverForm,
    /// Largest Frobenius distance between the map and the recovered form
    /// over the probe set (canonical basis plus random projections).
    pub residual: f64,
}

impl PreserverClass {
    pub fn not_a_preserver(reason: impl Into<String>, residual: f64) -> Self {
        PreserverClass { form: PreserverForm::NotAPreserver { reason: reason.into() }, residual }
    }

    pub fn tag(&self) -> &'static str {
        match self.form {
            PreserverForm::Constant { .. } => "Constant",
            PreserverForm::Congruence { .. } => "Congruence",
            PreserverForm::ComplementedCongruence { .. } => "ComplementedCongruence",
            PreserverForm::Dim2Tensor { .. } => "Dim2Tensor",
            PreserverForm::TraceZeroUnitaryForm { .. } => "TraceZeroUnitaryForm",
            PreserverForm::NotAPreserver { .. } => "NotAPreserver",
        }
    }

    pub fn is_preserver(&self) -> bool {
        !matches!(self.form, PreserverForm::NotAPreserver { .. })
    }

    /// Evaluates the recovered form; `None` for `NotAPreserver`.
    pub fn apply(&self, a: &ComplexMatrix) -> Option<ComplexMatrix> {
        self.form.apply(a)
    }
}

impl PreserverForm {
    pub fn apply(&self, a: &ComplexMatrix) -> Option<ComplexMatrix> {
        let maybe_conj = |conj: bool| if conj { a.conj() } else { a.clone() };
        Some(match self {
            PreserverForm::Constant { p0, k } => p0.scale_real(a.trace().re / *k as f64),
            PreserverForm::Congruence { u, conj } => u.congruence(&maybe_conj(*conj)),
            PreserverForm::ComplementedCongruence { u, conj, k } => u.congruence(&complement(&maybe_conj(*conj), *k)),
            PreserverForm::Dim2Tensor { u, p0, q0 } => {
                u.congruence(&(&a.kron(p0) + &complement(a, 1).kron(q0)))
            }
            PreserverForm::TraceZeroUnitaryForm { u, s, conj } => {
                u.congruence(&maybe_conj(*conj)).scale_real(*s as f64)
            }
            PreserverForm::NotAPreserver { .. } => return None,
        })
    }
}

/// Probe set for a map: its canonical domain basis followed by
/// [`PROBE_SAMPLES`] seeded random rank-`k` projections (involutions when
/// the domain is trace-zero).
pub(crate) fn probe_set(f: &HermMap, k: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut probes: Vec<ComplexMatrix> = f.domain.elements().collect();
    let mut g = rng(seed);
    let n = f.domain.n;
    for _ in 0..PROBE_SAMPLES {
        if f.domain.traceless {
            probes.push(random_involution(n / 2, &mut g));
        } else {
            probes.push(random_projection(n, k.clamp(1, n), &mut g));
        }
    }
    probes
}

/// Largest `‖f(A) − model(A)‖_F` over the probe set.
pub(crate) fn probe_residual(
    f: &HermMap,
    k: usize,
    seed: u64,
    model: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> f64 {
    super::worst(probe_set(f, k, seed).iter().map(|a| f.apply_unchecked(a).dist(&model(a))))
}
