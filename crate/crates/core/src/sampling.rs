//! Seeded random sampling of the matrix ensembles used by the checks.
//!
//! Everything takes an explicit generator; `rng(seed)` gives the
//! platform-independent ChaCha stream used throughout.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64, ZERO};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian scalar (`E|z|² = 1`).
pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormalizes columns in order with two passes of modified
/// Gram–Schmidt. Columns must be linearly independent.
pub(crate) fn gram_schmidt(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: C64 = done[i].iter().zip(&rest[0]).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in rest[0].iter_mut().zip(&done[i]) {
                    *y -= proj * x;
                }
            }
        }
        let nrm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= nrm;
        }
    }
    let mut out = ComplexMatrix::zeros(m, n);
    for (j, c) in cols.iter().enumerate() {
        out.set_col(j, c);
    }
    out
}

/// Haar-distributed `rows × cols` isometry (orthonormal columns),
/// from the QR frame of a complex Gaussian matrix.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(cols <= rows, "an isometry C^{cols} -> C^{rows} needs cols <= rows");
    gram_schmidt(&gaussian_matrix(rows, cols, rng))
}

pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Random rank-`k` projection `Q Q*` in `H_n`.
pub fn random_projection(n: usize, k: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let q = random_isometry(n, k, rng);
    q.matmul(&q.adjoint()).hermitian_part()
}

/// Random element of `IH^0_{2k}`: `2P − I` for a random `P ∈ P_{2k,k}`.
pub fn random_involution(k: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let p = random_projection(2 * k, k, rng);
    &p.scale_real(2.0) - &ComplexMatrix::identity(2 * k)
}

/// GUE-like random hermitian matrix.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    gaussian_matrix(n, n, rng).hermitian_part()
}

pub fn random_traceless_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let h = random_hermitian(n, rng);
    let shift = h.trace().re / n as f64;
    let mut out = h;
    for i in 0..n {
        out[(i, i)] -= shift;
    }
    out
}

pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm == 0.0 {
        let mut e = vec![ZERO; n];
        e[0] = C64::new(1.0, 0.0);
        return e;
    }
    v.iter().map(|z| z / nrm).collect()
}
