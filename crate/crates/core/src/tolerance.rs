//! Tolerance policy shared by every module.
//!
//! All tolerances scale with the relevant dimension (or norm) so that rank
//! and equality decisions are uniform across the crate.

use serde::{Deserialize, Serialize};

/// Scale factor for eigen/SVD residuals: `tol_eig = EIG_SCALE * n`.
pub const EIG_SCALE: f64 = 1e-12;
/// Scale factor for hermiticity checks: `tol_sym = SYM_SCALE * max|a_ij|`.
pub const SYM_SCALE: f64 = 1e-10;
/// Singular values below `RANK_REL * sigma_max` count as zero.
pub const RANK_REL: f64 = 1e-9;
/// Scale factor for canonical-form residuals: `tol_canon = CANON_SCALE * ambient`.
pub const CANON_SCALE: f64 = 1e-9;
/// Default angle (radians) below which principal angles are merged.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Scale factor for classification residuals: `tol_classify = CLASSIFY_SCALE * N`.
pub const CLASSIFY_SCALE: f64 = 1e-8;
/// Iteration cap (sweeps) for both Jacobi solvers.
pub const MAX_SWEEPS: usize = 30;

pub fn tol_eig(n: usize) -> f64 {
    EIG_SCALE * n.max(1) as f64
}

pub fn tol_sym(max_abs: f64) -> f64 {
    SYM_SCALE * max_abs
}

pub fn tol_canon(ambient: usize) -> f64 {
    CANON_SCALE * ambient.max(1) as f64
}

pub fn tol_classify(n: usize) -> f64 {
    CLASSIFY_SCALE * n.max(1) as f64
}

/// The tolerance set recorded in machine-readable output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSet {
    pub eig_scale: f64,
    pub sym_scale: f64,
    pub rank_rel: f64,
    pub canon_scale: f64,
    pub cluster_tol: f64,
    pub classify_scale: f64,
    pub max_sweeps: usize,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            eig_scale: EIG_SCALE,
            sym_scale: SYM_SCALE,
            rank_rel: RANK_REL,
            canon_scale: CANON_SCALE,
            cluster_tol: CLUSTER_TOL,
            classify_scale: CLASSIFY_SCALE,
            max_sweeps: MAX_SWEEPS,
        }
    }
}
