//! Geometry of pairs of subspaces: principal angles, the gap metric, the
//! joint canonical form of two orthogonal projections and the sets
//! `H_a(X, Y) = {Z : a(P_X + P_Y) + (1 − 2a)P_Z is a projection}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_space, complete_orthonormal, herm_eig, isometry_defect, projection_defect, svd, ComplexMatrix, C64};
use crate::sampling::{gram_schmidt, haar_unitary, random_isometry, random_projection};
use crate::tolerance::{tol_canon, tol_eig, CLUSTER_TOL};

use std::f64::consts::FRAC_PI_2;

/// A subspace of `C^ambient`, stored as an orthonormal frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceJson", into = "SubspaceJson")]
pub struct Subspace {
    ambient: usize,
    frame: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient: usize,
    frame: ComplexMatrix,
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = Error;

    fn try_from(j: SubspaceJson) -> Result<Self> {
        if j.frame.rows() != j.ambient {
            return Err(Error::DimensionMismatch(format!(
                "frame has {} rows, ambient is {}",
                j.frame.rows(),
                j.ambient
            )));
        }
        Subspace::new(j.frame)
    }
}

impl From<Subspace> for SubspaceJson {
    fn from(s: Subspace) -> Self {
        SubspaceJson { ambient: s.ambient, frame: s.frame }
    }
}

impl Subspace {
    /// Wraps a frame with orthonormal columns.
    pub fn new(frame: ComplexMatrix) -> Result<Self> {
        let ambient = frame.rows();
        if frame.cols() > ambient {
            return Err(Error::DimensionMismatch("frame has more columns than rows".into()));
        }
        if frame.cols() > 0 {
            let defect = isometry_defect(&frame);
            if defect > tol_eig(ambient.max(1)) {
                return Err(Error::NotIsometry { defect });
            }
        }
        Ok(Subspace { ambient, frame })
    }

    /// Column space of an arbitrary matrix.
    pub fn span(vectors: &ComplexMatrix) -> Result<Self> {
        Ok(Subspace { ambient: vectors.rows(), frame: column_space(vectors)? })
    }

    /// Range of an orthogonal projection.
    pub fn from_projection(p: &ComplexMatrix) -> Result<Self> {
        if !p.is_square() || projection_defect(p) > tol_canon(p.rows().max(1)) {
            return Err(Error::NotProjection);
        }
        let e = herm_eig(p)?;
        Ok(Subspace { ambient: p.rows(), frame: e.vectors_where(|v| v > 0.5) })
    }

    /// Span of the first `dim` standard basis vectors.
    pub fn coordinate(ambient: usize, dim: usize) -> Self {
        let frame = ComplexMatrix::from_fn(ambient, dim, |i, j| C64::new((i == j) as u8 as f64, 0.0));
        Subspace { ambient, frame }
    }

    /// Haar-random subspace of the given dimension.
    pub fn random(ambient: usize, dim: usize, rng: &mut impl Rng) -> Self {
        Subspace { ambient, frame: random_isometry(ambient, dim, rng) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn projector(&self) -> ComplexMatrix {
        projector(self)
    }
}

pub fn projector(x: &Subspace) -> ComplexMatrix {
    x.frame.matmul(&x.frame.adjoint()).hermitian_part()
}

fn same_ambient(x: &Subspace, y: &Subspace) -> Result<()> {
    if x.ambient != y.ambient {
        return Err(Error::AmbientMismatch(x.ambient, y.ambient));
    }
    Ok(())
}

/// Principal vectors `x_i ∈ X`, `y_i ∈ Y` with `<x_i, y_i> = cos θ_i ≥ 0`,
/// angles ascending, plus the unmatched directions of the larger subspace.
struct PrincipalPairs {
    angles: Vec<f64>,
    cosines: Vec<f64>,
    sines: Vec<f64>,
    xs: Vec<Vec<C64>>,
    ys: Vec<Vec<C64>>,
    x_extra: Vec<Vec<C64>>,
    y_extra: Vec<Vec<C64>>,
}

fn principal_pairs(x: &Subspace, y: &Subspace) -> Result<PrincipalPairs> {
    same_ambient(x, y)?;
    let (kx, ky) = (x.dim(), y.dim());
    let r = kx.min(ky);
    let mut pairs = PrincipalPairs {
        angles: Vec::with_capacity(r),
        cosines: Vec::with_capacity(r),
        sines: Vec::with_capacity(r),
        xs: Vec::with_capacity(r),
        ys: Vec::with_capacity(r),
        x_extra: Vec::new(),
        y_extra: Vec::new(),
    };
    if kx == 0 || ky == 0 {
        pairs.x_extra = (0..kx).map(|j| x.frame.col(j)).collect();
        pairs.y_extra = (0..ky).map(|j| y.frame.col(j)).collect();
        return Ok(pairs);
    }
    let d = svd(&x.frame.adjoint_mul(&y.frame))?;
    let xv = x.frame.matmul(&d.u);
    let yv = y.frame.matmul(&d.v);
    for i in 0..r {
        let xi = xv.col(i);
        let yi = yv.col(i);
        let c = d.sigma[i].min(1.0);
        // ‖(I − P_X) y_i‖ keeps small angles accurate.
        let s = yi
            .iter()
            .zip(&xi)
            .map(|(b, a)| (b - a * c).norm_sqr())
            .sum::<f64>()
            .sqrt()
            .min(1.0);
        pairs.angles.push(s.atan2(c).clamp(0.0, FRAC_PI_2));
        pairs.cosines.push(c);
        pairs.sines.push(s);
        pairs.xs.push(xi);
        pairs.ys.push(yi);
    }
    pairs.x_extra = (r..kx).map(|j| xv.col(j)).collect();
    pairs.y_extra = (r..ky).map(|j| yv.col(j)).collect();
    // Reorder ascending by angle (the SVD order is by descending cosine,
    // which the sine correction can perturb at the rounding level).
    let mut idx: Vec<usize> = (0..r).collect();
    idx.sort_by(|&a, &b| pairs.angles[a].total_cmp(&pairs.angles[b]));
    let pick = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let pick_vec = |v: &Vec<Vec<C64>>| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
    Ok(PrincipalPairs {
        angles: pick(&pairs.angles),
        cosines: pick(&pairs.cosines),
        sines: pick(&pairs.sines),
        xs: pick_vec(&pairs.xs),
        ys: pick_vec(&pairs.ys),
        x_extra: pairs.x_extra,
        y_extra: pairs.y_extra,
    })
}

/// Principal angles, ascending, in `[0, π/2]`; `min(dim x, dim y)` values.
pub fn principal_angles(x: &Subspace, y: &Subspace) -> Result<Vec<f64>> {
    Ok(principal_pairs(x, y)?.angles)
}

/// Gap metric `‖P_X − P_Y‖` (operator norm).
pub fn gap(x: &Subspace, y: &Subspace) -> Result<f64> {
    same_ambient(x, y)?;
    if x.ambient == 0 {
        return Ok(0.0);
    }
    let diff = &projector(x) - &projector(y);
    let e = herm_eig(&diff)?;
    Ok(e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).min(1.0))
}

/// A block of equal principal angles strictly between 0 and π/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleBlock {
    pub angle: f64,
    pub multiplicity: usize,
}

/// Joint normal form of `P_X` and `P_Y` on `X + Y`.
///
/// `basis` columns are ordered `[m | p | q | block_1 | … | block_r]`; block
/// `j` occupies `2·m_j` columns, first the `m_j` vectors carrying the
/// `(1 + cos φ_j)/2` diagonal, then their partners. In this basis
/// `P_X = I_m ⊕ I_p ⊕ 0_q ⊕ [[(1+c)/2, s/2], [s/2, (1−c)/2]] ⊗ I_{m_j}` and
/// `P_Y` is the same with `I_p`, `I_q` swapped and the off-diagonal negated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoProjCanonicalForm {
    pub ambient: usize,
    pub basis: ComplexMatrix,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub blocks: Vec<AngleBlock>,
}

impl TwoProjCanonicalForm {
    /// `dim(X + Y)`.
    pub fn span_dim(&self) -> usize {
        self.m + self.p + self.q + 2 * self.blocks.iter().map(|b| b.multiplicity).sum::<usize>()
    }

    /// Column offset of block `j` inside `basis`.
    pub fn block_offset(&self, j: usize) -> usize {
        self.m + self.p + self.q + 2 * self.blocks[..j].iter().map(|b| b.multiplicity).sum::<usize>()
    }

    /// Every block angle with its multiplicity expanded, descending.
    pub fn block_angles(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.angle, b.multiplicity))
            .collect()
    }
}

pub fn two_proj_canonical(x: &Subspace, y: &Subspace, cluster_tol: f64) -> Result<TwoProjCanonicalForm> {
    if !(cluster_tol.is_finite() && cluster_tol >= 0.0) {
        return Err(Error::BadParameter(format!("cluster tolerance {cluster_tol}")));
    }
    let pp = principal_pairs(x, y)?;
    let mut m_vecs = Vec::new();
    let mut p_vecs: Vec<Vec<C64>> = Vec::new();
    let mut q_vecs: Vec<Vec<C64>> = Vec::new();
    let mut generic: Vec<usize> = Vec::new();
    for (i, &th) in pp.angles.iter().enumerate() {
        if th < cluster_tol {
            m_vecs.push(pp.xs[i].clone());
        } else if th > FRAC_PI_2 - cluster_tol {
            p_vecs.push(pp.xs[i].clone());
            q_vecs.push(pp.ys[i].clone());
        } else {
            generic.push(i);
        }
    }
    p_vecs.extend(pp.x_extra.iter().cloned());
    q_vecs.extend(pp.y_extra.iter().cloned());

    // Generic angles, descending, grouped into clusters.
    generic.reverse();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &generic {
        match clusters.last_mut() {
            Some(c) if pp.angles[*c.last().unwrap()] - pp.angles[i] <= cluster_tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut cols: Vec<Vec<C64>> = Vec::new();
    cols.extend(m_vecs);
    let (p, q) = (p_vecs.len(), q_vecs.len());
    cols.extend(p_vecs);
    cols.extend(q_vecs);
    let mut blocks = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let angle = cluster.iter().map(|&i| pp.angles[i]).sum::<f64>() / cluster.len() as f64;
        let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let mut firsts = Vec::with_capacity(cluster.len());
        let mut seconds = Vec::with_capacity(cluster.len());
        for &i in cluster {
            let (c, s) = (pp.cosines[i], pp.sines[i]);
            let e = &pp.xs[i];
            let f: Vec<C64> = pp.ys[i].iter().zip(e).map(|(b, a)| (b - a * c) / s).collect();
            firsts.push(e.iter().zip(&f).map(|(a, b)| a * ch + b * sh).collect::<Vec<_>>());
            seconds.push(e.iter().zip(&f).map(|(a, b)| a * sh - b * ch).collect::<Vec<_>>());
        }
        cols.extend(firsts);
        cols.extend(seconds);
        blocks.push(AngleBlock { angle, multiplicity: cluster.len() });
    }

    let n = x.ambient;
    let mut raw = ComplexMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        raw.set_col(j, c);
    }
    let basis = if cols.is_empty() { raw } else { gram_schmidt(&raw) };
    Ok(TwoProjCanonicalForm { ambient: n, basis, m: pp.angles.iter().filter(|&&t| t < cluster_tol).count(), p, q, blocks })
}

/// Block matrices of `P_X`, `P_Y` in the canonical basis.
fn canonical_blocks(form: &TwoProjCanonicalForm) -> (ComplexMatrix, ComplexMatrix) {
    let d = form.span_dim();
    let mut px = ComplexMatrix::zeros(d, d);
    let mut py = ComplexMatrix::zeros(d, d);
    for i in 0..form.m {
        px[(i, i)] = C64::new(1.0, 0.0);
        py[(i, i)] = C64::new(1.0, 0.0);
    }
    for i in form.m..form.m + form.p {
        px[(i, i)] = C64::new(1.0, 0.0);
    }
    for i in form.m + form.p..form.m + form.p + form.q {
        py[(i, i)] = C64::new(1.0, 0.0);
    }
    for (j, b) in form.blocks.iter().enumerate() {
        let off = form.block_offset(j);
        let (c, s) = (b.angle.cos(), b.angle.sin());
        for i in 0..b.multiplicity {
            let (u, v) = (off + i, off + b.multiplicity + i);
            for (mat, sign) in [(&mut px, 1.0), (&mut py, -1.0)] {
                mat[(u, u)] = C64::new((1.0 + c) / 2.0, 0.0);
                mat[(v, v)] = C64::new((1.0 - c) / 2.0, 0.0);
                mat[(u, v)] = C64::new(sign * s / 2.0, 0.0);
                mat[(v, u)] = C64::new(sign * s / 2.0, 0.0);
            }
        }
    }
    (px, py)
}

/// `(P_X, P_Y)` rebuilt from the canonical form.
pub fn reconstruct(form: &TwoProjCanonicalForm) -> (ComplexMatrix, ComplexMatrix) {
    let (bx, by) = canonical_blocks(form);
    (
        form.basis.matmul(&bx).matmul(&form.basis.adjoint()).hermitian_part(),
        form.basis.matmul(&by).matmul(&form.basis.adjoint()).hermitian_part(),
    )
}

fn check_a(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.5) {
        return Err(Error::BadParameter(format!("a must be a finite number above 1/2, got {a}")));
    }
    Ok(())
}

/// `√(2a − 1)/a`, the largest gap for which `H_a(X, Y)` is nonempty.
pub fn hol_gap_bound(a: f64) -> Result<f64> {
    check_a(a)?;
    Ok((2.0 * a - 1.0).sqrt() / a)
}

/// Block parameter `t` for a pair at angle `φ` (`cos φ` given).
pub fn hol_t(a: f64, cos_phi: f64) -> f64 {
    if a == 1.0 {
        return (1.0 + cos_phi) / 2.0;
    }
    (1.0 + cos_phi) * (a * (1.0 + cos_phi) - 1.0) / (2.0 * (2.0 * a - 1.0) * cos_phi)
}

/// The canonical form together with the block parameters `t_j` of the
/// members of `H_a(X, Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolDescription {
    pub form: TwoProjCanonicalForm,
    pub a: f64,
    pub t: Vec<f64>,
    /// All `t_j` lie in `[0, 1]` and `p + q > 0` only when `a = 1`.
    pub admissible: bool,
}

pub fn hol_t_values(form: &TwoProjCanonicalForm, a: f64) -> Result<HolDescription> {
    check_a(a)?;
    let tol = tol_eig(form.ambient.max(1));
    let mut admissible = form.p + form.q == 0 || (a - 1.0).abs() <= tol;
    let mut t = Vec::with_capacity(form.blocks.len());
    for b in &form.blocks {
        let mut tj = hol_t(a, b.angle.cos());
        if !(tj.is_finite() && (-tol..=1.0 + tol).contains(&tj)) {
            admissible = false;
        } else {
            tj = tj.clamp(0.0, 1.0);
        }
        t.push(tj);
    }
    Ok(HolDescription { form: form.clone(), a, t, admissible })
}

/// Both existence verdicts for `H_a(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolExistence {
    pub gap: f64,
    pub bound: f64,
    /// `gap ≤ bound + tol_eig`.
    pub by_gap: bool,
    /// `(p + q > 0 ⇒ a = 1)` and every `t_j ∈ [0, 1]`.
    pub by_blocks: bool,
}

pub fn hol_existence(x: &Subspace, y: &Subspace, a: f64) -> Result<HolExistence> {
    let bound = hol_gap_bound(a)?;
    let g = gap(x, y)?;
    let form = two_proj_canonical(x, y, CLUSTER_TOL)?;
    let by_blocks = hol_t_values(&form, a)?.admissible;
    Ok(HolExistence { gap: g, bound, by_gap: g <= bound + tol_eig(x.ambient.max(1)), by_blocks })
}

/// Whether `H_a(X, Y)` is nonempty, decided by the gap criterion.
pub fn hol_exists(x: &Subspace, y: &Subspace, a: f64) -> Result<bool> {
    Ok(hol_existence(x, y, a)?.by_gap)
}

/// `M_a(X, Y, Z) = a(P_X + P_Y) + (1 − 2a)P_Z`.
pub fn hol_combination(x: &Subspace, y: &Subspace, z: &Subspace, a: f64) -> Result<ComplexMatrix> {
    same_ambient(x, y)?;
    same_ambient(x, z)?;
    let sum = &projector(x) + &projector(y);
    Ok(&sum.scale_real(a) + &projector(z).scale_real(1.0 - 2.0 * a))
}

/// Whether `Z ∈ H_a(X, Y)`; defined for every real `a`.
pub fn hol_member(x: &Subspace, y: &Subspace, z: &Subspace, a: f64) -> Result<bool> {
    if !a.is_finite() {
        return Err(Error::BadParameter(format!("a must be finite, got {a}")));
    }
    let m = hol_combination(x, y, z, a)?;
    Ok(projection_defect(&m) <= tol_canon(x.ambient.max(1)))
}

/// Free parameters of an element of `H_a(X, Y)`: a projection `q` on the
/// `p + q` part and one unitary per angle block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolChoices {
    pub q: ComplexMatrix,
    pub unitaries: Vec<ComplexMatrix>,
}

impl HolChoices {
    /// `Q = I_p ⊕ 0_q`, every `U_j = I`.
    pub fn canonical(form: &TwoProjCanonicalForm) -> Self {
        let mut diag = vec![1.0; form.p];
        diag.resize(form.p + form.q, 0.0);
        HolChoices {
            q: ComplexMatrix::diag_real(&diag),
            unitaries: form.blocks.iter().map(|b| ComplexMatrix::identity(b.multiplicity)).collect(),
        }
    }

    /// Random rank-`p` `Q` and Haar-random `U_j`, so that `dim Z = dim X`.
    pub fn random(form: &TwoProjCanonicalForm, rng: &mut impl Rng) -> Self {
        HolChoices {
            q: random_projection(form.p + form.q, form.p, rng),
            unitaries: form.blocks.iter().map(|b| haar_unitary(b.multiplicity, rng)).collect(),
        }
    }
}

/// The element of `H_a(X, Y)` with the given free parameters.
pub fn hol_sample(x: &Subspace, y: &Subspace, a: f64, choices: &HolChoices) -> Result<Subspace> {
    check_a(a)?;
    let form = two_proj_canonical(x, y, CLUSTER_TOL)?;
    hol_sample_from(&hol_t_values(&form, a)?, choices)
}

pub fn hol_sample_from(desc: &HolDescription, choices: &HolChoices) -> Result<Subspace> {
    let form = &desc.form;
    if !desc.admissible {
        return Err(Error::EmptySet);
    }
    let pq = form.p + form.q;
    if choices.q.shape() != (pq, pq) {
        return Err(Error::DimensionMismatch(format!(
            "Q is {}x{}, expected {pq}x{pq}",
            choices.q.rows(),
            choices.q.cols()
        )));
    }
    if pq > 0 && projection_defect(&choices.q) > tol_canon(pq) {
        return Err(Error::NotProjection);
    }
    if choices.unitaries.len() != form.blocks.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries for {} angle blocks",
            choices.unitaries.len(),
            form.blocks.len()
        )));
    }
    for (u, b) in choices.unitaries.iter().zip(&form.blocks) {
        if u.shape() != (b.multiplicity, b.multiplicity) {
            return Err(Error::DimensionMismatch(format!("unitary for a block of size {}", b.multiplicity)));
        }
        let defect = isometry_defect(u);
        if defect > tol_eig(b.multiplicity) * 10.0 {
            return Err(Error::NotIsometry { defect });
        }
    }

    let d = form.span_dim();
    let mut pz = ComplexMatrix::zeros(d, d);
    for i in 0..form.m {
        pz[(i, i)] = C64::new(1.0, 0.0);
    }
    pz.set_block(form.m, form.m, &choices.q.hermitian_part());
    for (j, (b, u)) in form.blocks.iter().zip(&choices.unitaries).enumerate() {
        let off = form.block_offset(j);
        let mj = b.multiplicity;
        let t = desc.t[j];
        let w = (t * (1.0 - t)).max(0.0).sqrt();
        let mut blk = ComplexMatrix::zeros(2 * mj, 2 * mj);
        for i in 0..mj {
            blk[(i, i)] = C64::new(t, 0.0);
            blk[(mj + i, mj + i)] = C64::new(1.0 - t, 0.0);
        }
        blk.set_block(0, mj, &u.adjoint().scale_real(w));
        blk.set_block(mj, 0, &u.scale_real(w));
        pz.set_block(off, off, &blk);
    }
    let full = form.basis.matmul(&pz).matmul(&form.basis.adjoint()).hermitian_part();
    if d == 0 {
        return Ok(Subspace::coordinate(form.ambient, 0));
    }
    Subspace::from_projection(&full)
}

/// Smallest `‖M_a² − M_a‖_F` over rank-one `Z` inside the span of two
/// lines `X`, `Y`: a 100 × 100 grid on the Bloch sphere of that span,
/// followed by a local simplex refinement from the best grid points.
///
/// Zero (to rounding) exactly when some line of the span lies in `H_a(X, Y)`.
pub fn bloch_sphere_min_defect(x: &Subspace, y: &Subspace, a: f64, grid: usize) -> Result<f64> {
    same_ambient(x, y)?;
    if x.dim() != 1 || y.dim() != 1 {
        return Err(Error::DimensionMismatch("Bloch-sphere search needs two lines".into()));
    }
    let both = ComplexMatrix::hstack(&[x.frame(), y.frame()]);
    let mut span = column_space(&both)?;
    if span.cols() == 1 {
        // X = Y: complete to a plane so that the sphere is still two-dimensional.
        if x.ambient == 1 {
            return Ok(0.0);
        }
        span = complete_orthonormal(x.ambient, vec![Some(span.col(0)), None]);
    }
    let base = hol_combination_base(x, y, a);
    let defect = |theta: f64, phi: f64| -> f64 {
        let v = [
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ];
        let z = span.mul_vec(&v);
        let pz = ComplexMatrix::outer(&z, &z);
        let m = &base + &pz.scale_real(1.0 - 2.0 * a);
        let m2 = m.matmul(&m);
        let d = m2.dist(&m);
        d * d
    };

    let mut scored: Vec<(f64, f64, f64)> = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
            scored.push((defect(theta, phi), theta, phi));
        }
    }
    scored.sort_by(|u, v| u.0.total_cmp(&v.0));
    let step = std::f64::consts::PI / grid as f64;
    let mut best = scored[0].0;
    for &(_, theta, phi) in scored.iter().take(5) {
        best = best.min(nelder_mead_2d(&defect, [theta, phi], step, 400));
    }
    Ok(best.max(0.0).sqrt())
}

fn hol_combination_base(x: &Subspace, y: &Subspace, a: f64) -> ComplexMatrix {
    (&projector(x) + &projector(y)).scale_real(a)
}

fn nelder_mead_2d(f: &impl Fn(f64, f64) -> f64, start: [f64; 2], step: f64, iters: usize) -> f64 {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = simplex.map(|p| f(p[0], p[1]));
    for _ in 0..iters {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        simplex = order.map(|i| simplex[i]);
        vals = order.map(|i| vals[i]);
        if vals[2] - vals[0] <= 1e-32 {
            break;
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let xr = along(-1.0);
        let fr = f(xr[0], xr[1]);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe[0], xe[1]);
            if fe < fr {
                simplex[2] = xe;
                vals[2] = fe;
            } else {
                simplex[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = xr;
            vals[2] = fr;
        } else {
            let xc = along(0.5);
            let fc = f(xc[0], xc[1]);
            if fc < vals[2] {
                simplex[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        (simplex[0][0] + simplex[k][0]) / 2.0,
                        (simplex[0][1] + simplex[k][1]) / 2.0,
                    ];
                    vals[k] = f(simplex[k][0], simplex[k][1]);
                }
            }
        }
    }
    vals.iter().copied().fold(f64::INFINITY, f64::min)
}
