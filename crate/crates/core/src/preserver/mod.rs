//! Verification and canonical-form recovery for maps that send rank-`k`
//! projections to projections, and for the real-linear maps on trace-zero
//! hermitian involutions they decompose into.

mod class;
mod dim2;
mod iho;
mod involution;
mod phkk;
mod phraz;
mod search;
mod unitary;

pub use class::{PreserverClass, PreserverForm, PROBE_SAMPLES};
pub use dim2::classify_dim2;
pub use iho::{bracket_sign, classify_iho, trace_zero_form_map, INVOLUTION_CHECKS};
pub use involution::{
    involution_projection, projection_involution, verify_preserves, PreservationReport,
};
pub use phkk::classify_phkk;
pub use phraz::{phraz_decompose, PhrazDecomposition};
pub use search::{hermitian_unitary_search, SearchReport};
pub use unitary::{
    classify_c2m, classify_h0u, unitary_pair_decompose, C2mForm, H0uForm, Recovery, UnitaryPairForm,
};

use crate::linalg::{ComplexMatrix, C64, I};

/// Extends a real-linear map on hermitian matrices to all square matrices:
/// `g_c(X) = g((X + X*)/2) + i·g((X − X*)/(2i))`.
pub(crate) fn complexify(g: &impl Fn(&ComplexMatrix) -> ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let xa = x.adjoint();
    let re = (x + &xa).scale_real(0.5);
    let im = (x - &xa).scale(C64::new(0.0, -0.5));
    &g(&re) + &g(&im).scale(I)
}

/// Recovers the isometry `U` (`N × n`) of a linear congruence
/// `g(A) = U A U*` from matrix-unit probes. `U` is fixed up to a global phase
/// by making the largest entry of its first column real positive.
pub(crate) fn recover_congruence(
    g: &impl Fn(&ComplexMatrix) -> ComplexMatrix,
    n: usize,
) -> Option<ComplexMatrix> {
    let unit = |i: usize, j: usize| {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(i, j)] = C64::new(1.0, 0.0);
        e
    };
    let g11 = complexify(g, &unit(0, 0));
    let big = g11.rows();
    let (mut best, mut col) = (0.0, 0);
    for c in 0..big {
        let v = g11[(c, c)].re;
        if v > best {
            best = v;
            col = c;
        }
    }
    if best.is_nan() || best <= 1e-6 {
        return None;
    }
    let u1: Vec<C64> = g11.col(col).iter().map(|z| z / best.sqrt()).collect();
    let mut u = ComplexMatrix::zeros(big, n);
    u.set_col(0, &u1);
    for j in 1..n {
        u.set_col(j, &complexify(g, &unit(j, 0)).mul_vec(&u1));
    }
    Some(u)
}

/// Maximum that propagates NaN, so a failed computation never looks small.
pub(crate) fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, x| if x.is_nan() || x > m { x } else { m })
}
