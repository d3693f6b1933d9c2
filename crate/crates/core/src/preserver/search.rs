use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constructions::{RealLinearMatMap, RealSpace};
use crate::error::Result;
use crate::herm_space::HermBasis;
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::sampling::{haar_unitary, rng};

/// Outcome of the least-squares search for a real-linear `M_2 → H_2` map
/// sending unitaries to hermitian unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Smallest root-mean-square `‖φ(U)² − I‖_F` over the sampled unitaries.
    pub best_residual: f64,
    pub samples: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub best_map: RealLinearMatMap,
}

/// Hermitian unitary closest to `h`: `V sign(Λ) V*`.
fn nearest_involution(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = herm_eig(h)?;
    let signs: Vec<f64> = e.values.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
    Ok(e.vectors.congruence(&ComplexMatrix::diag_real(&signs)))
}

/// Alternating projection: snap every image to its nearest hermitian
/// unitary, then refit the map by least squares. Repeated from `restarts`
/// Gaussian starting points.
pub fn hermitian_unitary_search(samples: usize, restarts: usize, iterations: usize, seed: u64) -> Result<SearchReport> {
    let domain = RealSpace::square(2);
    let codomain = RealSpace::herm(HermBasis::full(2));
    let mut g = rng(seed);
    let unitaries: Vec<ComplexMatrix> = (0..samples).map(|_| haar_unitary(2, &mut g)).collect();
    let mut x = DMatrix::zeros(domain.dim(), samples);
    for (j, u) in unitaries.iter().enumerate() {
        for (i, v) in domain.encode(u)?.into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    // Normal-equation solve Φ = T Xᵀ (X Xᵀ)⁻¹, factored once.
    let gram = (&x * x.transpose()).cholesky().expect("sampled unitaries span M_2");
    let id = ComplexMatrix::identity(2);

    let residual_of = |phi: &DMatrix<f64>| {
        let images = phi * &x;
        let total: f64 = (0..samples)
            .map(|j| {
                let h = codomain.decode(images.column(j).as_slice());
                h.matmul(&h).dist(&id).powi(2)
            })
            .sum();
        (total / samples as f64).sqrt()
    };

    let mut best = (f64::INFINITY, DMatrix::zeros(codomain.dim(), domain.dim()));
    for _ in 0..restarts {
        let mut phi = DMatrix::from_fn(codomain.dim(), domain.dim(), |_, _| StandardNormal.sample(&mut g));
        for _ in 0..iterations {
            let images = &phi * &x;
            let mut targets = DMatrix::zeros(codomain.dim(), samples);
            for j in 0..samples {
                let h = codomain.decode(images.column(j).as_slice());
                let t = nearest_involution(&h)?;
                for (i, v) in codomain.encode(&t)?.into_iter().enumerate() {
                    targets[(i, j)] = v;
                }
            }
            phi = gram.solve(&(&x * targets.transpose())).transpose();
        }
        let r = residual_of(&phi);
        if r < best.0 || r.is_nan() {
            best = (r, phi);
        }
    }
    Ok(SearchReport {
        best_residual: best.0,
        samples,
        restarts,
        iterations,
        seed,
        best_map: RealLinearMatMap { domain, codomain, matrix: best.1 },
    })
}
