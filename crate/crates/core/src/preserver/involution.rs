use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm_space::HermMap;
use crate::linalg::{projection_defect, projection_rank, ComplexMatrix};
use crate::sampling::{random_projection, rng};
use crate::tolerance::{tol_canon, tol_eig, tol_sym};

/// `A ↦ (I + A)/2`, from trace-zero hermitian involutions of `H_{2k}` to
/// rank-`k` projections.
pub fn involution_projection(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if !a.is_square() || n == 0 || !n.is_multiple_of(2) {
        return Err(Error::NotInvolution);
    }
    let scale = a.max_abs().max(1.0);
    if a.hermitian_defect() > tol_sym(scale) || a.trace().norm() > tol_eig(n) * scale {
        return Err(Error::NotInvolution);
    }
    if a.matmul(a).dist_max(&ComplexMatrix::identity(n)) > tol_eig(n) {
        return Err(Error::NotInvolution);
    }
    Ok((&ComplexMatrix::identity(n) + &a.hermitian_part()).scale_real(0.5))
}

/// `P ↦ 2P − I`, the inverse of [`involution_projection`].
pub fn projection_involution(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = p.rows();
    if !p.is_square() || n == 0 || !n.is_multiple_of(2) {
        return Err(Error::NotHalfRankProjection);
    }
    if projection_rank(p, tol_canon(n)) != Some(n / 2) {
        return Err(Error::NotHalfRankProjection);
    }
    Ok(&p.hermitian_part().scale_real(2.0) - &ComplexMatrix::identity(n))
}

/// Outcome of the randomized preserver check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    /// Every sampled image is a projection and all have the same rank.
    pub ok: bool,
    /// Common image rank, when all images are projections of equal rank.
    pub rank: Option<usize>,
    /// Largest projection defect `max(‖B − B*‖, ‖B² − B‖)` over the images.
    pub worst_residual: f64,
    pub samples: usize,
    /// Number of images that failed the projection test.
    pub failures: usize,
    /// Images were projections but their ranks differed.
    pub rank_not_constant: bool,
    pub seed: u64,
}

/// Draws `samples` Haar-random rank-`k` projections and checks that `f`
/// maps all of them to projections of one common rank.
pub fn verify_preserves(f: &HermMap, k: usize, samples: usize, seed: u64) -> Result<PreservationReport> {
    let n = f.domain.n;
    if f.domain.traceless {
        return Err(Error::DimensionMismatch("verify_preserves needs a map defined on all of H_n".into()));
    }
    if k == 0 || k > n {
        return Err(Error::BadParameter(format!("rank k={k} outside 1..={n}")));
    }
    let tol = tol_canon(f.codomain.n);
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut ranks = Vec::with_capacity(samples);
    for _ in 0..samples {
        let img = f.apply_unchecked(&random_projection(n, k, &mut g));
        let defect = projection_defect(&img);
        if defect.is_nan() || defect > worst {
            worst = defect;
        }
        match projection_rank(&img, tol) {
            Some(r) => ranks.push(r),
            None => failures += 1,
        }
    }
    let rank_not_constant = ranks.windows(2).any(|w| w[0] != w[1]);
    let ok = failures == 0 && !rank_not_constant;
    Ok(PreservationReport {
        ok,
        rank: if ok { ranks.first().copied() } else { None },
        worst_residual: worst,
        samples,
        failures,
        rank_not_constant,
        seed,
    })
}
