use serde::{Deserialize, Serialize};

use super::worst;
use crate::constructions::{RealLinearMatMap, RealSpace};
use crate::error::{Error, Result};
use crate::grassmann::{two_proj_canonical, Subspace};
use crate::herm_space::{HermBasis, HermMap};
use crate::linalg::{unitary_defect, ComplexMatrix, C64};
use crate::sampling::{random_involution, rng};
use crate::tolerance::{tol_classify, CLUSTER_TOL};

/// Block decomposition of a linear map `H_{2k} → H_N` sending rank-`k`
/// projections to projections.
///
/// In the orthonormal basis `basis` of `Z = ran f(P) + ran f(Q)`
/// (`P = I_k ⊕ 0`, `Q = 0 ⊕ I_k`), every image is
/// `(tr A/k) I_m ⊕ φ_0(A) ⊕ ⊕_j [[t_j c I, w_j φ_j(G)*], [w_j φ_j(G), (1−t_j) c I]]`
/// with `c = tr A/k`, `G = 2A − c I` and `w_j = √(t_j(1−t_j))`, and it
/// vanishes off `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhrazDecomposition {
    pub k: usize,
    pub m: usize,
    pub p: usize,
    pub r: usize,
    /// `1/2 < t_1 < … < t_r < 1`.
    pub t: Vec<f64>,
    pub mult: Vec<usize>,
    /// `N × dim Z` isometry.
    pub basis: ComplexMatrix,
    /// `H_{2k} → H_{2p}`; absent when `p = 0`.
    pub phi0: Option<HermMap>,
    /// `H^0_{2k} → M_{m_j}`.
    pub phij: Vec<RealLinearMatMap>,
    /// Largest reassembly error over the canonical basis of `H_{2k}`.
    pub residual: f64,
}

fn image_range(f: &HermMap, a: &ComplexMatrix, what: &str) -> Result<Subspace> {
    Subspace::from_projection(&f.apply_unchecked(a))
        .map_err(|_| Error::NotAPreserver(format!("image of {what} is not a projection")))
}

fn shifted(a: &ComplexMatrix, k: usize) -> (f64, ComplexMatrix) {
    let c = a.trace().re / k as f64;
    let n = a.rows();
    (c, &a.scale_real(2.0) - &ComplexMatrix::identity(n).scale_real(c))
}

pub fn phraz_decompose(f: &HermMap, k: usize) -> Result<PhrazDecomposition> {
    if k == 0 || f.domain.traceless || f.domain.n != 2 * k {
        return Err(Error::DimensionMismatch(format!("phraz_decompose needs a map on H_{}", 2 * k)));
    }
    let n = 2 * k;
    let half: Vec<f64> = (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    let p_proj = ComplexMatrix::diag_real(&half);
    let q_proj = &ComplexMatrix::identity(n) - &p_proj;
    let x = image_range(f, &p_proj, "I_k ⊕ 0")?;
    let y = image_range(f, &q_proj, "0 ⊕ I_k")?;
    if x.dim() != y.dim() {
        return Err(Error::NotAPreserver(format!("image ranks differ ({} vs {})", x.dim(), y.dim())));
    }
    let form = two_proj_canonical(&x, &y, CLUSTER_TOL)?;
    if form.p != form.q {
        return Err(Error::NotAPreserver(format!("unbalanced canonical form (p={}, q={})", form.p, form.q)));
    }
    let basis = form.basis.clone();
    let local = |a: &ComplexMatrix| basis.adjoint().matmul(&f.apply_unchecked(a)).matmul(&basis);

    let (m, p) = (form.m, form.p);
    let phi0 = if p > 0 {
        Some(HermMap::from_fn(HermBasis::full(n), HermBasis::full(2 * p), |a| {
            local(a).block(m, m, 2 * p, 2 * p).hermitian_part()
        })?)
    } else {
        None
    };
    // Blocks arrive with descending angles, hence ascending t.
    let t: Vec<f64> = form.blocks.iter().map(|b| (1.0 + b.angle.cos()) / 2.0).collect();
    let mult: Vec<usize> = form.blocks.iter().map(|b| b.multiplicity).collect();
    let mut phij = Vec::with_capacity(t.len());
    for (j, (&tj, &mj)) in t.iter().zip(&mult).enumerate() {
        let off = form.block_offset(j);
        let w = (tj * (1.0 - tj)).sqrt();
        phij.push(RealLinearMatMap::from_fn(
            RealSpace::Herm { n, traceless: true },
            RealSpace::square(mj),
            |g| local(g).block(off + mj, off, mj, mj).scale_real(1.0 / (2.0 * w)),
        )?);
    }
    let mut dec = PhrazDecomposition { k, m, p, r: t.len(), t, mult, basis, phi0, phij, residual: 0.0 };
    dec.residual = worst(f.domain.elements().map(|e| dec.reassemble(&e).dist(&f.apply_unchecked(&e))));
    if dec.residual.is_nan() || dec.residual > tol_classify(f.codomain.n) {
        return Err(Error::BlockExtractionFailure { residual: dec.residual });
    }
    Ok(dec)
}

impl PhrazDecomposition {
    pub fn span_dim(&self) -> usize {
        self.basis.cols()
    }

    /// The block matrix `(f(A)|_Z)_B`.
    pub fn local_image(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (c, g) = shifted(a, self.k);
        let mut out = ComplexMatrix::zeros(self.span_dim(), self.span_dim());
        for i in 0..self.m {
            out[(i, i)] = C64::new(c, 0.0);
        }
        let mut off = self.m;
        if let Some(phi0) = &self.phi0 {
            out.set_block(off, off, &phi0.apply_unchecked(a));
            off += 2 * self.p;
        }
        for ((&tj, &mj), phi) in self.t.iter().zip(&self.mult).zip(&self.phij) {
            let w = (tj * (1.0 - tj)).sqrt();
            let low = phi.apply_unchecked(&g).scale_real(w);
            for i in 0..mj {
                out[(off + i, off + i)] = C64::new(tj * c, 0.0);
                out[(off + mj + i, off + mj + i)] = C64::new((1.0 - tj) * c, 0.0);
            }
            out.set_block(off + mj, off, &low);
            out.set_block(off, off + mj, &low.adjoint());
            off += 2 * mj;
        }
        out
    }

    /// `B (f(A)|_Z)_B B*`, the map rebuilt from its blocks.
    pub fn reassemble(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.basis.congruence(&self.local_image(a))
    }

    /// Worst defect over `samples` random involutions `H` of: `φ_0(H)` being
    /// a trace-zero involution and each `φ_j(H)` being unitary.
    pub fn block_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut g = rng(seed);
        let mut defects = Vec::with_capacity(samples);
        for _ in 0..samples {
            let h = random_involution(self.k, &mut g);
            if let Some(phi0) = &self.phi0 {
                let img = phi0.apply_unchecked(&h);
                let id = ComplexMatrix::identity(2 * self.p);
                defects.push(worst([img.trace().norm(), img.matmul(&img).dist_max(&id)]));
            }
            defects.extend(self.phij.iter().map(|phi| unitary_defect(&phi.apply_unchecked(&h))));
        }
        worst(defects)
    }
}
