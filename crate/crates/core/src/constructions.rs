//! Generators for the standard families of rank-preserving maps, and the
//! real-linear maps (`ρ_k`, `τ`, vector evaluation) they are built from.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm_space::{HermBasis, HermMap};
use crate::linalg::{isometry_defect, projection_rank, unitary_defect, ComplexMatrix, C64, I, ZERO};
use crate::sampling::{random_involution, rng};
use crate::tolerance::{tol_canon, tol_eig};

/// A real vector space of complex matrices with fixed real coordinates.
///
/// `Herm` uses the canonical hermitian basis; `Mat` uses row-major entries
/// with the real part before the imaginary part. `C^k` is `Mat { rows: k,
/// cols: 1 }`, i.e. interleaved re/im.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealSpace {
    Herm { n: usize, traceless: bool },
    Mat { rows: usize, cols: usize },
}

impl RealSpace {
    pub fn herm(basis: HermBasis) -> Self {
        RealSpace::Herm { n: basis.n, traceless: basis.traceless }
    }

    pub fn square(n: usize) -> Self {
        RealSpace::Mat { rows: n, cols: n }
    }

    pub fn vectors(k: usize) -> Self {
        RealSpace::Mat { rows: k, cols: 1 }
    }

    pub fn herm_basis(&self) -> Option<HermBasis> {
        match *self {
            RealSpace::Herm { n, traceless } => Some(HermBasis { n, traceless }),
            RealSpace::Mat { .. } => None,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match *self {
            RealSpace::Herm { n, .. } => (n, n),
            RealSpace::Mat { rows, cols } => (rows, cols),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            RealSpace::Herm { n, traceless } => HermBasis { n, traceless }.dim(),
            RealSpace::Mat { rows, cols } => 2 * rows * cols,
        }
    }

    fn validate(&self) -> Result<()> {
        let (r, c) = self.shape();
        if r == 0 || c == 0 {
            return Err(Error::BadParameter("real matrix space of size zero".into()));
        }
        Ok(())
    }

    pub fn encode(&self, a: &ComplexMatrix) -> Result<Vec<f64>> {
        match self.herm_basis() {
            Some(b) => Ok(crate::herm_space::encode(a, b)?.coords),
            None => {
                if a.shape() != self.shape() {
                    return Err(Error::DimensionMismatch(format!(
                        "{}x{} matrix for a {}x{} space",
                        a.rows(),
                        a.cols(),
                        self.shape().0,
                        self.shape().1
                    )));
                }
                Ok(a.data().iter().flat_map(|z| [z.re, z.im]).collect())
            }
        }
    }

    pub fn decode(&self, coords: &[f64]) -> ComplexMatrix {
        match self.herm_basis() {
            Some(b) => b.decode_coords(coords),
            None => {
                let (r, c) = self.shape();
                let data = coords.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
                ComplexMatrix::from_vec(r, c, data).expect("coordinate count")
            }
        }
    }

    pub fn element(&self, i: usize) -> ComplexMatrix {
        let mut c = vec![0.0; self.dim()];
        c[i] = 1.0;
        self.decode(&c)
    }
}

/// Real-linear map between real matrix spaces; `matrix` is
/// `codomain.dim() × domain.dim()` in the spaces' real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealMapJson", into = "RealMapJson")]
pub struct RealLinearMatMap {
    pub domain: RealSpace,
    pub codomain: RealSpace,
    pub matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RealMapJson {
    domain: RealSpace,
    codomain: RealSpace,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RealMapJson> for RealLinearMatMap {
    type Error = Error;

    fn try_from(j: RealMapJson) -> Result<Self> {
        j.domain.validate()?;
        j.codomain.validate()?;
        let (r, c) = (j.codomain.dim(), j.domain.dim());
        if j.matrix.len() != r || j.matrix.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(format!("map matrix must be {r}x{c}")));
        }
        if j.matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RealLinearMatMap {
            domain: j.domain,
            codomain: j.codomain,
            matrix: DMatrix::from_fn(r, c, |i, k| j.matrix[i][k]),
        })
    }
}

impl From<RealLinearMatMap> for RealMapJson {
    fn from(m: RealLinearMatMap) -> Self {
        RealMapJson {
            domain: m.domain,
            codomain: m.codomain,
            matrix: (0..m.matrix.nrows()).map(|i| m.matrix.row(i).iter().copied().collect()).collect(),
        }
    }
}

impl RealLinearMatMap {
    /// Map determined by its values on the domain basis.
    pub fn from_fn(
        domain: RealSpace,
        codomain: RealSpace,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        domain.validate()?;
        codomain.validate()?;
        let mut matrix = DMatrix::zeros(codomain.dim(), domain.dim());
        for j in 0..domain.dim() {
            let img = f(&domain.element(j));
            let img = if codomain.herm_basis().is_some() { img.hermitian_part() } else { img };
            for (i, v) in codomain.encode(&img)?.into_iter().enumerate() {
                matrix[(i, j)] = v;
            }
        }
        Ok(RealLinearMatMap { domain, codomain, matrix })
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let x = self.domain.encode(a)?;
        Ok(self.apply_coords(&x))
    }

    pub(crate) fn apply_coords(&self, x: &[f64]) -> ComplexMatrix {
        let y = &self.matrix * DVector::from_column_slice(x);
        self.codomain.decode(y.as_slice())
    }

    /// Applies the map to a matrix without validating hermitian-ness.
    pub(crate) fn apply_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match self.domain.herm_basis() {
            Some(b) => self.apply_coords(&b.encode_unchecked(a)),
            None => self.apply_coords(&a.data().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        }
    }

    /// Evaluates on a vector of `C^k` (domain must be `k × 1`).
    pub fn apply_vec(&self, v: &[C64]) -> Result<ComplexMatrix> {
        self.apply(&ComplexMatrix::column(v))
    }

    /// Numerical rank of the real coefficient matrix.
    pub fn real_rank(&self) -> usize {
        real_rank(&self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.real_rank() == self.domain.dim()
    }
}

pub(crate) fn real_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-9 * smax).count()
}

impl From<&HermMap> for RealLinearMatMap {
    fn from(f: &HermMap) -> Self {
        RealLinearMatMap {
            domain: RealSpace::herm(f.domain),
            codomain: RealSpace::herm(f.codomain),
            matrix: f.matrix.clone(),
        }
    }
}

/// `A ↦ U A U*`, or `A ↦ U Ā U*` when `conj`.
pub fn make_congruence(u: &ComplexMatrix, conj: bool, n: usize) -> Result<HermMap> {
    if u.cols() != n || u.rows() < n {
        return Err(Error::DimensionMismatch(format!("isometry is {}x{}, domain is H_{n}", u.rows(), u.cols())));
    }
    let defect = isometry_defect(u);
    if defect > tol_eig(u.rows()) * 10.0 {
        return Err(Error::NotIsometry { defect });
    }
    HermMap::from_fn(HermBasis::new(n, false)?, HermBasis::full(u.rows()), |a| {
        if conj {
            u.congruence(&a.conj())
        } else {
            u.congruence(a)
        }
    })
}

/// `L_k(A) = (tr A / k) I_m − A` on `H_m`.
pub fn make_lk(k: usize, m: usize) -> Result<HermMap> {
    if k == 0 || k >= m {
        return Err(Error::BadParameter(format!("L_k needs 1 <= k < m (k={k}, m={m})")));
    }
    let b = HermBasis::full(m);
    HermMap::from_fn(b, b, |a| complement(a, k))
}

/// `(tr A / k) I − A`.
pub(crate) fn complement(a: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = -a;
    let s = a.trace().re / k as f64;
    for i in 0..a.rows() {
        out[(i, i)] += s;
    }
    out
}

/// `ρ_k(v)` for `v ∈ C^k`, a `2^{k−1}`-square matrix.
pub fn rho(v: &[C64]) -> ComplexMatrix {
    match v.len() {
        0 => panic!("rho needs at least one coordinate"),
        1 => ComplexMatrix::from_rows(&[&[v[0]]]),
        k => {
            let h = 1usize << (k - 2);
            let z = v[0];
            let inner = rho(&v[1..]);
            let mut out = ComplexMatrix::zeros(2 * h, 2 * h);
            for i in 0..h {
                out[(i, i)] = z;
                out[(h + i, h + i)] = z.conj();
            }
            out.set_block(0, h, &inner);
            out.set_block(h, 0, &(-&inner.adjoint()));
            out
        }
    }
}

/// `ρ_k` as a real-linear map `C^k → M_{2^{k−1}}`.
pub fn make_rho(k: usize) -> Result<RealLinearMatMap> {
    if k == 0 || k > 12 {
        return Err(Error::BadParameter(format!("rho_k needs 1 <= k <= 12 (k={k})")));
    }
    RealLinearMatMap::from_fn(RealSpace::vectors(k), RealSpace::square(1 << (k - 1)), |v| rho(&v.col(0)))
}

/// `[[A, v], [v*, b]] ↦ [[((tr A + b)/k − b) I, ρ_{n−1}(v)], [ρ_{n−1}(v)*, b I]]`,
/// a map `H_n → H_{2^{n−1}}` sending rank-`k` projections to rank-`2^{n−2}` ones.
pub fn make_hn_to_big(n: usize, k: usize) -> Result<HermMap> {
    if n < 2 || k == 0 || k >= n || n > 12 {
        return Err(Error::BadParameter(format!("need 1 <= k < n, 2 <= n <= 12 (n={n}, k={k})")));
    }
    let h = 1usize << (n - 2);
    HermMap::from_fn(HermBasis::full(n), HermBasis::full(2 * h), |a| {
        let b = a[(n - 1, n - 1)].re;
        let tr_a: f64 = (0..n - 1).map(|i| a[(i, i)].re).sum();
        let v: Vec<C64> = (0..n - 1).map(|i| a[(i, n - 1)]).collect();
        let r = rho(&v);
        let top = (tr_a + b) / k as f64 - b;
        let mut out = ComplexMatrix::zeros(2 * h, 2 * h);
        for i in 0..h {
            out[(i, i)] = C64::new(top, 0.0);
            out[(h + i, h + i)] = C64::new(b, 0.0);
        }
        out.set_block(0, h, &r);
        out.set_block(h, 0, &r.adjoint());
        out
    })
}

/// `A ↦ ρ_m(A v_0)` on a real subspace of `M_m` (`H_m`, `H_m^0` or all of `M_m`).
pub fn make_vector_eval(v0: &[C64], domain: RealSpace) -> Result<RealLinearMatMap> {
    let m = v0.len();
    if domain.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!("domain must consist of {m}x{m} matrices")));
    }
    let nrm = v0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > tol_eig(m) {
        return Err(Error::BadParameter(format!("v0 must be a unit vector (norm {nrm})")));
    }
    if m > 12 {
        return Err(Error::BadParameter("vector evaluation supports m <= 12".into()));
    }
    RealLinearMatMap::from_fn(domain, RealSpace::square(1 << (m - 1)), |a| rho(&a.mul_vec(v0)))
}

/// `τ(A) = cos φ · A ⊗ I_{2k} + i sin φ · I_{2k} ⊗ A` on `H^0_{2k}`.
pub fn make_tau_rotation(k: usize, phi: f64) -> Result<RealLinearMatMap> {
    if k == 0 || !phi.is_finite() {
        return Err(Error::BadParameter(format!("need k >= 1 and finite phi (k={k}, phi={phi})")));
    }
    let d = 2 * k;
    let id = ComplexMatrix::identity(d);
    RealLinearMatMap::from_fn(RealSpace::Herm { n: d, traceless: true }, RealSpace::square(d * d), |a| {
        &a.kron(&id).scale_real(phi.cos()) + &id.kron(a).scale(I * phi.sin())
    })
}

/// Worst unitary defect of `τ(H)` over `samples` random involutions `H` of
/// `H^0_{2k}`.
pub fn tau_unitarity_defect(tau: &RealLinearMatMap, samples: usize, seed: u64) -> Result<f64> {
    let k = match tau.domain {
        RealSpace::Herm { n, traceless: true } if n % 2 == 0 => n / 2,
        _ => return Err(Error::DimensionMismatch("tau must be defined on H^0_{2k}".into())),
    };
    let (r, c) = tau.codomain.shape();
    if r != c || tau.codomain.herm_basis().is_some() {
        return Err(Error::DimensionMismatch("tau must take values in M_m".into()));
    }
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let h = random_involution(k, &mut g);
        worst = worst.max(unitary_defect(&tau.apply_unchecked(&h)));
    }
    Ok(worst)
}

/// Randomized admissibility check for `τ`: `samples` random involutions
/// must all map to unitaries within `tol_eig`.
pub fn verify_tau(tau: &RealLinearMatMap, samples: usize, seed: u64) -> Result<()> {
    let defect = tau_unitarity_defect(tau, samples, seed)?;
    if defect > tol_eig(tau.codomain.shape().0) {
        return Err(Error::TauNotAdmissible { defect });
    }
    Ok(())
}

/// Number of involutions used by [`verify_tau`] inside [`make_e2km`].
pub const TAU_SAMPLES: usize = 200;

/// `A ↦ [[t·s·I_m, w·τ(2A − s·I)], [w·τ(2A − s·I)*, (1−t)·s·I_m]]` with
/// `s = tr A / k` and `w = √(t(1−t))`, a map `H_{2k} → H_{2m}`.
pub fn make_e2km(k: usize, t: f64, tau: &RealLinearMatMap, seed: u64) -> Result<HermMap> {
    if k == 0 || !(0.0..=1.0).contains(&t) {
        return Err(Error::BadParameter(format!("need k >= 1 and t in [0,1] (k={k}, t={t})")));
    }
    if tau.domain != (RealSpace::Herm { n: 2 * k, traceless: true }) {
        return Err(Error::DimensionMismatch(format!("tau must be defined on H^0_{}", 2 * k)));
    }
    verify_tau(tau, TAU_SAMPLES, seed)?;
    let m = tau.codomain.shape().0;
    let w = (t * (1.0 - t)).sqrt();
    HermMap::from_fn(HermBasis::full(2 * k), HermBasis::full(2 * m), |a| {
        let s = a.trace().re / k as f64;
        let mut shifted = a.scale_real(2.0);
        for i in 0..2 * k {
            shifted[(i, i)] -= s;
        }
        let tv = tau.apply_unchecked(&shifted).scale_real(w);
        let mut out = ComplexMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            out[(i, i)] = C64::new(t * s, 0.0);
            out[(m + i, m + i)] = C64::new((1.0 - t) * s, 0.0);
        }
        out.set_block(0, m, &tv);
        out.set_block(m, 0, &tv.adjoint());
        out
    })
}

fn check_projection(p: &ComplexMatrix) -> Result<usize> {
    if !p.is_square() || p.rows() == 0 {
        return Err(Error::NotProjection);
    }
    projection_rank(p, tol_canon(p.rows())).ok_or(Error::NotProjection)
}

/// `A ↦ A ⊗ P_0` on `H_n`.
pub fn make_tensor(p0: &ComplexMatrix, n: usize) -> Result<HermMap> {
    check_projection(p0)?;
    let p0 = p0.hermitian_part();
    HermMap::from_fn(HermBasis::new(n, false)?, HermBasis::full(n * p0.rows()), |a| a.kron(&p0))
}

/// `A ↦ A ⊗ P_0 + ((tr A / k) I − A) ⊗ Q_0` on `H_n`.
pub fn make_pq(p0: &ComplexMatrix, q0: &ComplexMatrix, n: usize, k: usize) -> Result<HermMap> {
    if p0.shape() != q0.shape() {
        return Err(Error::SizeMismatch(format!(
            "P0 is {}x{}, Q0 is {}x{}",
            p0.rows(),
            p0.cols(),
            q0.rows(),
            q0.cols()
        )));
    }
    check_projection(p0)?;
    check_projection(q0)?;
    if k == 0 || k > n {
        return Err(Error::BadParameter(format!("need 1 <= k <= n (n={n}, k={k})")));
    }
    let (p0, q0) = (p0.hermitian_part(), q0.hermitian_part());
    HermMap::from_fn(HermBasis::full(n), HermBasis::full(n * p0.rows()), |a| {
        &a.kron(&p0) + &complement(a, k).kron(&q0)
    })
}

/// `A ↦ (tr A / k) P_0` on `H_n`.
pub fn make_constant(p0: &ComplexMatrix, n: usize, k: usize) -> Result<HermMap> {
    check_projection(p0)?;
    if k == 0 {
        return Err(Error::BadParameter("k must be positive".into()));
    }
    let p0 = p0.hermitian_part();
    HermMap::from_fn(HermBasis::new(n, false)?, HermBasis::full(p0.rows()), |a| {
        p0.scale_real(a.trace().re / k as f64)
    })
}

/// Worst defect of the four algebraic conditions under which
/// `cos φ X + sin φ Y + Z` is unitary for every `φ`:
/// `|X|² = |Y|² = I − |Z|²` and `re(X*Y) = re(X*Z) = re(Y*Z) = 0`.
pub fn unitary_family_conditions(x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    let m = x.rows();
    for a in [x, y, z] {
        if a.shape() != (m, m) {
            return Err(Error::DimensionMismatch("X, Y, Z must be square of equal size".into()));
        }
    }
    let id = ComplexMatrix::identity(m);
    let xx = x.adjoint_mul(x);
    let yy = y.adjoint_mul(y);
    let rest = &id - &z.adjoint_mul(z);
    let re = |a: &ComplexMatrix, b: &ComplexMatrix| a.adjoint_mul(b).hermitian_part();
    let zero = ComplexMatrix::zeros(m, m);
    Ok([
        xx.dist_max(&rest),
        yy.dist_max(&rest),
        re(x, y).dist_max(&zero),
        re(x, z).dist_max(&zero),
        re(y, z).dist_max(&zero),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Worst unitary defect of `cos φ X + sin φ Y + Z` over `samples` equally
/// spaced `φ ∈ [0, 2π)`.
pub fn unitary_family_defect(x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix, samples: usize) -> f64 {
    (0..samples)
        .map(|i| {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let u = &(&x.scale_real(phi.cos()) + &y.scale_real(phi.sin())) + z;
            unitary_defect(&u)
        })
        .fold(0.0, f64::max)
}

/// A triple `(X, Y, Z)` satisfying the unitary-family conditions:
/// `X = U(σ_z ⊗ C)V`, `Y = U(σ_x ⊗ C)V`, `Z = U(I_2 ⊗ iS)V` with
/// `C = diag(c_j)`, `S = diag(√(1 − c_j²))` and Haar-random `U`, `V`.
pub fn random_unitary_family(half: usize, rng: &mut impl Rng) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let cs: Vec<f64> = (0..half).map(|_| rng.random::<f64>()).collect();
    let c = ComplexMatrix::diag_real(&cs);
    let s = ComplexMatrix::diag(&cs.iter().map(|&c| I * (1.0 - c * c).sqrt()).collect::<Vec<_>>());
    let sz = ComplexMatrix::diag_real(&[1.0, -1.0]);
    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let u = crate::sampling::haar_unitary(2 * half, rng);
    let v = crate::sampling::haar_unitary(2 * half, rng);
    let wrap = |a: ComplexMatrix| u.matmul(&a).matmul(&v);
    (wrap(sz.kron(&c)), wrap(sx.kron(&c)), wrap(ComplexMatrix::identity(2).kron(&s)))
}

/// Standard basis vector `e_i` of `C^n`.
pub fn unit(i: usize, n: usize) -> Vec<C64> {
    let mut e = vec![ZERO; n];
    e[i] = C64::new(1.0, 0.0);
    e
}
