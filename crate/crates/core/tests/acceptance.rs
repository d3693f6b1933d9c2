//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Reference values come from independent routes where possible: principal
//! angles from nalgebra's complex SVD, projection ranks from singular value
//! counts, and maps rebuilt from closures rather than library generators.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rankpres::constructions::{
    make_congruence, make_constant, make_e2km, make_hn_to_big, make_lk, make_pq, make_rho,
    make_tau_rotation, make_tensor, make_vector_eval, RealLinearMatMap, RealSpace,
};
use rankpres::grassmann::{
    bloch_sphere_min_defect, gap, hol_existence, hol_gap_bound, hol_member, hol_sample,
    reconstruct, two_proj_canonical, HolChoices, Subspace,
};
use rankpres::herm_space::{HermBasis, HermMap};
use rankpres::linalg::{ComplexMatrix, C64};
use rankpres::preserver::{
    classify_dim2, classify_iho, classify_phkk, hermitian_unitary_search, phraz_decompose,
    verify_preserves, PreserverClass, PreserverForm,
};
use rankpres::sampling::{
    gaussian_matrix, haar_unitary, random_hermitian, random_involution, random_isometry,
    random_projection, random_traceless_hermitian, random_unit_vector, rng, SeededRng,
};
use rankpres::selftest::run_selftest;
use rankpres::tolerance::CLUSTER_TOL;

struct Verdict {
    worst: f64,
    threshold: f64,
    detail: String,
}

impl Verdict {
    fn new(worst: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Verdict { worst, threshold, detail: detail.into() }
    }

    fn passed(&self) -> bool {
        self.worst <= self.threshold
    }
}

/// NaN-propagating running maximum.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn see(&mut self, x: f64) {
        if x.is_nan() || x > self.0 {
            self.0 = x;
        }
    }
}

/// Infinite when anything was counted, so a count can share a worst-ratio with residuals.
fn penalty(count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        f64::INFINITY
    }
}

// ---- independent reference computations ------------------------------

fn to_na(a: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    to_na(a).svd(false, false).singular_values.iter().copied().collect()
}

/// Principal angles, ascending, as `atan2(sin, cos)`: cosines are the
/// singular values of `Fx* Fy`, sines those of `(I − P_X) Fy` with `Y` the
/// smaller space. This stays accurate near `0` where `acos` alone does not.
fn reference_angles(x: &Subspace, y: &Subspace) -> Vec<f64> {
    let (x, y) = if y.dim() > x.dim() { (y, x) } else { (x, y) };
    let mut cos = singular_values(&x.frame().adjoint().matmul(y.frame()));
    let resid = y.frame() - &x.frame().matmul(&x.frame().adjoint().matmul(y.frame()));
    let mut sin = singular_values(&resid);
    cos.sort_by(|a, b| b.total_cmp(a));
    sin.sort_by(f64::total_cmp);
    let mut angles: Vec<f64> = cos.iter().zip(&sin).map(|(c, s)| s.atan2(*c)).collect();
    angles.sort_by(f64::total_cmp);
    angles
}

fn numeric_rank(a: &ComplexMatrix) -> usize {
    singular_values(a).iter().filter(|&&s| s > 1e-8).count()
}

/// `max(‖B² − B‖_F, ‖B − B*‖_F, |tr B − rank|)`.
fn projection_miss(b: &ComplexMatrix, rank: usize) -> f64 {
    let idem = b.matmul(b).dist(b);
    let herm = b.dist(&b.adjoint());
    let tr = (b.trace().re - rank as f64).abs();
    idem.max(herm).max(tr)
}

fn unitary_miss(u: &ComplexMatrix) -> f64 {
    u.adjoint().matmul(u).dist(&ComplexMatrix::identity(u.cols()))
}

fn complement(a: &ComplexMatrix, k: usize) -> ComplexMatrix {
    &ComplexMatrix::identity(a.rows()).scale_real(a.trace().re / k as f64) - a
}

fn projection_range(p: &ComplexMatrix) -> Subspace {
    Subspace::from_projection(p).expect("projection")
}

fn angles_match(want: &[f64], got: &[f64]) -> f64 {
    if want.len() != got.len() {
        return f64::INFINITY;
    }
    want.iter().zip(got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Largest `‖c(A) − f(A)‖_F` over the given probes.
fn reconstruction_miss(c: &PreserverClass, f: impl Fn(&ComplexMatrix) -> ComplexMatrix, probes: &[ComplexMatrix]) -> f64 {
    let mut w = Worst::default();
    for a in probes {
        match c.apply(a) {
            Some(b) if b.shape() == f(a).shape() => w.see(b.dist(&f(a))),
            _ => return f64::INFINITY,
        }
    }
    w.0
}

fn herm_probes(basis: HermBasis, projections_of_rank: Option<usize>, extra: usize, g: &mut SeededRng) -> Vec<ComplexMatrix> {
    let n = basis.n;
    let mut probes: Vec<ComplexMatrix> = basis.elements().collect();
    for _ in 0..extra {
        probes.push(match (basis.traceless, projections_of_rank) {
            (true, _) if n.is_multiple_of(2) => random_involution(n / 2, g),
            (true, _) => random_traceless_hermitian(n, g),
            (false, Some(k)) => random_projection(n, k, g),
            (false, None) => random_hermitian(n, g),
        });
    }
    probes
}

// ---- generator instances shared by several criteria -------------------

/// A generator instance together with what its images should be.
enum Case {
    /// Sends rank-`k` projections of `H_n` to projections of rank `rank`.
    Projection { name: &'static str, map: HermMap, k: usize, rank: usize },
    /// Sends the given domain samples to unitaries.
    Unitary { name: &'static str, map: RealLinearMatMap, sample: Sampler },
}

#[derive(Clone, Copy)]
enum Sampler {
    UnitVector(usize),
    Involution(usize),
    HaarUnitary(usize),
}

impl Sampler {
    fn draw(self, g: &mut SeededRng) -> ComplexMatrix {
        match self {
            Sampler::UnitVector(k) => ComplexMatrix::column(&random_unit_vector(k, g)),
            Sampler::Involution(k) => random_involution(k, g),
            Sampler::HaarUnitary(n) => haar_unitary(n, g),
        }
    }
}

impl Case {
    fn name(&self) -> &'static str {
        match self {
            Case::Projection { name, .. } | Case::Unitary { name, .. } => name,
        }
    }
}

fn rank_of(p: &ComplexMatrix) -> usize {
    p.trace().re.round() as usize
}

/// Instances of all ten generators with randomized parameters.
fn generator_cases(g: &mut SeededRng) -> Vec<Case> {
    let mut cases = Vec::new();
    for i in 0..4 {
        let n = 2 + i % 3;
        let k = g.random_range(1..=n);
        let u = random_isometry(n + i % 2 + 1, n, g);
        let map = make_congruence(&u, i.is_multiple_of(2), n).unwrap();
        cases.push(Case::Projection { name: "congruence", map, k, rank: k });
    }
    for (k, m) in [(1, 2), (1, 4), (2, 5), (3, 6)] {
        cases.push(Case::Projection { name: "lk", map: make_lk(k, m).unwrap(), k, rank: m - k });
    }
    for k in 1..=6 {
        cases.push(Case::Unitary { name: "rho", map: make_rho(k).unwrap(), sample: Sampler::UnitVector(k) });
    }
    for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 3)] {
        let map = make_hn_to_big(n, k).unwrap();
        cases.push(Case::Projection { name: "hn_to_big", map, k, rank: 1 << (n - 2) });
    }
    for m in [2usize, 3, 4] {
        let v0 = random_unit_vector(m, g);
        let map = make_vector_eval(&v0, RealSpace::square(m)).unwrap();
        cases.push(Case::Unitary { name: "vector_eval", map, sample: Sampler::HaarUnitary(m) });
        if m.is_multiple_of(2) {
            let map = make_vector_eval(&v0, RealSpace::Herm { n: m, traceless: true }).unwrap();
            cases.push(Case::Unitary { name: "vector_eval", map, sample: Sampler::Involution(m / 2) });
        }
    }
    for k in [1usize, 2] {
        let map = make_tau_rotation(k, g.random_range(0.0..6.3)).unwrap();
        cases.push(Case::Unitary { name: "tau_rotation", map, sample: Sampler::Involution(k) });
    }
    for k in [1usize, 2] {
        let tau = make_tau_rotation(k, g.random_range(0.0..6.3)).unwrap();
        let t = g.random_range(0.0..1.0);
        let map = make_e2km(k, t, &tau, 11).unwrap();
        cases.push(Case::Projection { name: "e2km", map, k, rank: 4 * k * k });
    }
    for n in [2usize, 3] {
        let d = g.random_range(1..=3);
        let p0 = random_projection(d, g.random_range(1..=d), g);
        let k = g.random_range(1..=n);
        let rank = k * rank_of(&p0);
        cases.push(Case::Projection { name: "tensor", map: make_tensor(&p0, n).unwrap(), k, rank });
    }
    for n in [2usize, 3, 4] {
        let d = g.random_range(1..=3);
        let p0 = random_projection(d, g.random_range(1..=d), g);
        let q0 = random_projection(d, g.random_range(0..=d), g);
        let k = g.random_range(1..=n);
        let rank = k * rank_of(&p0) + (n - k) * rank_of(&q0);
        cases.push(Case::Projection { name: "pq", map: make_pq(&p0, &q0, n, k).unwrap(), k, rank });
    }
    for n in [2usize, 4] {
        let p0 = random_projection(3, g.random_range(1..=3), g);
        let k = g.random_range(1..n);
        let rank = rank_of(&p0);
        cases.push(Case::Projection { name: "constant", map: make_constant(&p0, n, k).unwrap(), k, rank });
    }
    cases
}

const GENERATORS: usize = 10;

/// Splits `total` samples as evenly as possible over the instances of each generator.
fn samples_for(cases: &[Case], index: usize, total: usize) -> usize {
    let name = cases[index].name();
    let same: Vec<usize> = (0..cases.len()).filter(|&i| cases[i].name() == name).collect();
    let pos = same.iter().position(|&i| i == index).unwrap();
    total / same.len() + usize::from(pos < total % same.len())
}

// ---- criteria ---------------------------------------------------------

fn random_pair(g: &mut SeededRng, ambient: usize) -> (Subspace, Subspace) {
    let dx = g.random_range(1..=4);
    let dy = g.random_range(1..=4);
    (Subspace::random(ambient, dx, g), Subspace::random(ambient, dy, g))
}

fn canonical_form() -> Verdict {
    let mut g = rng(101);
    let (mut recon, mut angle) = (Worst::default(), Worst::default());
    for _ in 0..200 {
        let (x, y) = random_pair(&mut g, 8);
        let form = two_proj_canonical(&x, &y, CLUSTER_TOL).unwrap();
        let (px, py) = reconstruct(&form);
        recon.see(px.dist(&x.projector()).max(py.dist(&y.projector())));

        let mut got = vec![0.0; form.m];
        got.extend(form.block_angles());
        got.extend(std::iter::repeat_n(FRAC_PI_2, form.p.min(form.q)));
        got.sort_by(f64::total_cmp);
        angle.see(angles_match(&reference_angles(&x, &y), &got));
    }
    let worst = (recon.0 / 1e-8).max(angle.0 / 1e-7);
    Verdict::new(worst, 1.0, format!("reconstruction {:.1e} (<= 1e-8), angles {:.1e} (<= 1e-7)", recon.0, angle.0))
}

fn gap_identity() -> Verdict {
    let mut g = rng(102);
    let mut w = Worst::default();
    for _ in 0..200 {
        let d = g.random_range(1..=4);
        let x = Subspace::random(8, d, &mut g);
        // Mix generic pairs with nearby ones so that small gaps are covered too.
        let y = if g.random_bool(0.5) {
            Subspace::random(8, d, &mut g)
        } else {
            let eps: f64 = g.random_range(0.0..0.5);
            Subspace::span(&(x.frame() + &gaussian_matrix(8, d, &mut g).scale_real(eps))).unwrap()
        };
        let max_angle = reference_angles(&x, &y).into_iter().fold(0.0, f64::max);
        w.see((gap(&x, &y).unwrap() - max_angle.sin()).abs());
    }
    Verdict::new(w.0, 1e-9, "200 equal-dimension pairs in C^8")
}

const HOL_AS: [f64; 5] = [0.6, 1.0, 1.5, 2.0, 5.0];

fn hol_law() -> Verdict {
    let mut g = rng(103);
    let (mut disagreements, mut member_failures, mut checked, mut samples) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..100 {
        let n = g.random_range(2..=6);
        let d = g.random_range(1..=(n / 2).max(1));
        let x = Subspace::random(n, d, &mut g);
        let y = if i % 5 == 4 {
            let e = if d < n { d + 1 } else { d - 1 };
            Subspace::random(n, e.max(1), &mut g)
        } else {
            let eps: f64 = g.random_range(0.0..1.5);
            Subspace::span(&(x.frame() + &gaussian_matrix(n, d, &mut g).scale_real(eps))).unwrap()
        };
        let reference_gap = if x.dim() == y.dim() {
            reference_angles(&x, &y).into_iter().fold(0.0, f64::max).sin()
        } else {
            1.0
        };
        for a in HOL_AS {
            let bound = (2.0 * a - 1.0).sqrt() / a;
            let e = hol_existence(&x, &y, a).unwrap();
            if (reference_gap - bound).abs() > 1e-9 {
                checked += 1;
                let want = reference_gap <= bound;
                if e.by_gap != want || e.by_blocks != want {
                    disagreements += 1;
                }
            }
            if e.by_gap && e.by_blocks {
                let form = two_proj_canonical(&x, &y, CLUSTER_TOL).unwrap();
                for choices in [HolChoices::canonical(&form), HolChoices::random(&form, &mut g)] {
                    samples += 1;
                    let ok = hol_sample(&x, &y, a, &choices).and_then(|z| hol_member(&x, &y, &z, a)).unwrap_or(false);
                    member_failures += usize::from(!ok);
                }
            }
        }
    }

    // Two lines in C^2: brute force over the Bloch sphere of Z.
    let (mut bloch_disagreements, mut bloch_checked) = (0usize, 0usize);
    let (mut worst_exist, mut best_empty) = (0.0f64, f64::INFINITY);
    for _ in 0..40 {
        let x = Subspace::random(2, 1, &mut g);
        let y = Subspace::random(2, 1, &mut g);
        let gp = reference_angles(&x, &y)[0].sin();
        for a in HOL_AS {
            if (gp - hol_gap_bound(a).unwrap()).abs() < 1e-3 {
                continue;
            }
            bloch_checked += 1;
            let defect = bloch_sphere_min_defect(&x, &y, a, 100).unwrap();
            let exists = hol_existence(&x, &y, a).unwrap().by_gap;
            if exists {
                worst_exist = worst_exist.max(defect);
            } else {
                best_empty = best_empty.min(defect);
            }
            if exists != (defect <= 1e-6) {
                bloch_disagreements += 1;
            }
        }
    }
    let failures = disagreements + member_failures + bloch_disagreements;
    Verdict::new(
        failures as f64,
        0.0,
        format!(
            "law {disagreements}/{checked} wrong, membership {member_failures}/{samples} wrong, \
             Bloch {bloch_disagreements}/{bloch_checked} wrong (max defect when nonempty {worst_exist:.1e}, \
             min when empty {best_empty:.1e})"
        ),
    )
}

fn constructions() -> Verdict {
    let mut g = rng(104);
    let cases = generator_cases(&mut g);
    let mut w = Worst::default();
    for (i, case) in cases.iter().enumerate() {
        for _ in 0..samples_for(&cases, i, 1000) {
            match case {
                Case::Projection { map, k, rank, .. } => {
                    let p = random_projection(map.domain.n, *k, &mut g);
                    w.see(projection_miss(&map.apply(&p).unwrap(), *rank));
                }
                Case::Unitary { map, sample, .. } => {
                    let s = sample.draw(&mut g);
                    w.see(unitary_miss(&map.apply(&s).unwrap()));
                }
            }
        }
    }
    let names: std::collections::BTreeSet<_> = cases.iter().map(Case::name).collect();
    let mut rho_identity = Worst::default();
    for k in 1..=6 {
        let map = make_rho(k).unwrap();
        for _ in 0..50 {
            let v: Vec<C64> = (0..k).map(|_| C64::new(g.sample(StandardNormal), g.sample(StandardNormal))).collect();
            let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let r = map.apply_vec(&v).unwrap();
            rho_identity.see(r.adjoint().matmul(&r).dist(&ComplexMatrix::identity(r.cols()).scale_real(norm2)) / norm2);
        }
    }
    let coverage = if names.len() == GENERATORS { 0.0 } else { f64::INFINITY };
    Verdict::new(
        w.0.max(rho_identity.0).max(coverage),
        1e-9,
        format!("{} generators x 1000 images {:.1e}, rho identity k<=6 {:.1e}", names.len(), w.0, rho_identity.0),
    )
}

fn iho_round_trip() -> Verdict {
    let mut g = rng(105);
    let (mut wrong, mut recon) = (0usize, Worst::default());
    for k in 1..=3 {
        let n = 2 * k;
        let basis = HermBasis::traceless(n);
        for i in 0..100 {
            let u = haar_unitary(n, &mut g);
            let s: i8 = if g.random_bool(0.5) { 1 } else { -1 };
            let conj = g.random_bool(0.5);
            let direct = |a: &ComplexMatrix| u.congruence(&if conj { a.conj() } else { a.clone() }).scale_real(s as f64);
            let f = HermMap::from_fn(basis, basis, direct).unwrap();
            let c = classify_iho(&f, 1000 + i).unwrap();
            let exact = match c.form {
                // On H^0_2, Ā = −σ_y A σ_y, so (s, conj) and (−s, !conj) describe the same map.
                PreserverForm::TraceZeroUnitaryForm { s: rs, conj: rc, .. } if k == 1 => {
                    rs * if rc { -1 } else { 1 } == s * if conj { -1 } else { 1 }
                }
                PreserverForm::TraceZeroUnitaryForm { s: rs, conj: rc, .. } => rs == s && rc == conj,
                _ => false,
            };
            wrong += usize::from(!exact);
            recon.see(reconstruction_miss(&c, direct, &herm_probes(basis, None, 20, &mut g)));
        }
    }
    Verdict::new(
        (recon.0 / 1e-8).max(penalty(wrong)),
        1.0,
        format!("{wrong}/300 wrong (s, conj), reconstruction {:.1e} (<= 1e-8)", recon.0),
    )
}

type MatFn = Box<dyn Fn(&ComplexMatrix) -> ComplexMatrix>;

fn phkk_round_trip() -> Verdict {
    let mut g = rng(106);
    let (mut wrong, mut recon) = (0usize, Worst::default());
    let mut report = Vec::new();
    for branch in ["Constant", "Congruence", "ConjugateCongruence", "ComplementedCongruence"] {
        let mut branch_wrong = 0;
        for i in 0..50usize {
            let ns = [3usize, 4, 6];
            let (n, k, m, f): (usize, usize, usize, MatFn) = match branch {
                "Constant" => {
                    let n = ns[i % 3];
                    let k = g.random_range(1..n);
                    let d = g.random_range(1..=4);
                    let p0 = random_projection(d, g.random_range(1..=d), &mut g);
                    let m = rank_of(&p0);
                    (n, k, m, Box::new(move |a: &ComplexMatrix| p0.scale_real(a.trace().re / k as f64)))
                }
                "Congruence" | "ConjugateCongruence" => {
                    let n = ns[i % 3];
                    let k = g.random_range(1..n);
                    let u = random_isometry(n + g.random_range(0..=2), n, &mut g);
                    let conj = branch == "ConjugateCongruence";
                    (n, k, k, Box::new(move |a: &ComplexMatrix| u.congruence(&if conj { a.conj() } else { a.clone() })))
                }
                _ => {
                    let (k, m) = [(2usize, 1usize), (2, 2), (3, 2)][i % 3];
                    let n = k + m;
                    let u = random_isometry(n + g.random_range(0..=2), n, &mut g);
                    let conj = g.random_bool(0.5);
                    let f = move |a: &ComplexMatrix| {
                        let a = if conj { a.conj() } else { a.clone() };
                        u.congruence(&complement(&a, k))
                    };
                    (n, k, m, Box::new(f))
                }
            };
            let map = HermMap::from_fn(HermBasis::full(n), HermBasis::full(f(&ComplexMatrix::identity(n)).rows()), &f).unwrap();
            let c = classify_phkk(&map, k, m, 2000 + i as u64).unwrap();
            let tag_ok = match (&c.form, branch) {
                (PreserverForm::Congruence { conj, .. }, "Congruence") => !conj,
                (PreserverForm::Congruence { conj, .. }, "ConjugateCongruence") => *conj,
                _ => c.tag() == branch,
            };
            branch_wrong += usize::from(!tag_ok);
            recon.see(reconstruction_miss(&c, &f, &herm_probes(HermBasis::full(n), Some(k), 20, &mut g)));
        }
        wrong += branch_wrong;
        report.push(format!("{branch} {branch_wrong}/50"));
    }
    Verdict::new(
        (recon.0 / 1e-8).max(penalty(wrong)),
        1.0,
        format!("wrong tags: {}; reconstruction {:.1e} (<= 1e-8)", report.join(", "), recon.0),
    )
}

fn dim2_round_trip() -> Verdict {
    let mut g = rng(107);
    let (mut wrong, mut angle, mut recon) = (0usize, Worst::default(), Worst::default());
    for i in 0..100 {
        let d = g.random_range(2..=4);
        // Full rank for both would give P0 = Q0 = I, which is a constant map.
        let rp = g.random_range(1..=d);
        let rq = if rp == d { g.random_range(1..d) } else { g.random_range(1..=d) };
        let p0 = random_projection(d, rp, &mut g);
        let q0 = random_projection(d, rq, &mut g);
        let u = random_isometry(2 * d + g.random_range(0..=1), 2 * d, &mut g);
        let direct = |a: &ComplexMatrix| u.congruence(&(&a.kron(&p0) + &complement(a, 1).kron(&q0)));
        let f = HermMap::from_fn(HermBasis::full(2), HermBasis::full(u.rows()), direct).unwrap();
        let c = classify_dim2(&f, 3000 + i).unwrap();
        match &c.form {
            PreserverForm::Dim2Tensor { p0: rp, q0: rq, .. } => {
                let want = reference_angles(&projection_range(&p0), &projection_range(&q0));
                let got = reference_angles(&projection_range(rp), &projection_range(rq));
                angle.see(angles_match(&want, &got));
            }
            _ => wrong += 1,
        }
        recon.see(reconstruction_miss(&c, direct, &herm_probes(HermBasis::full(2), Some(1), 20, &mut g)));
    }
    Verdict::new(
        (angle.0 / 1e-7).max(recon.0 / 1e-8).max(penalty(wrong)),
        1.0,
        format!("{wrong}/100 wrong tags, angles {:.1e} (<= 1e-7), reconstruction {:.1e} (<= 1e-8)", angle.0, recon.0),
    )
}

/// `(1 + cos θ)/2` for the angles of `ran P0`, `ran Q0` strictly inside `(0, π/2)`.
fn pq_t_values(p0: &ComplexMatrix, q0: &ComplexMatrix) -> Vec<f64> {
    let mut t: Vec<f64> = reference_angles(&projection_range(p0), &projection_range(q0))
        .into_iter()
        .filter(|&th| th > 1e-6 && th < FRAC_PI_2 - 1e-6)
        .map(|th| (1.0 + th.cos()) / 2.0)
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

fn phraz_round_trip() -> Verdict {
    let mut g = rng(108);
    let (mut recon, mut tmiss) = (Worst::default(), Worst::default());
    let (mut small_blocks, mut failures, mut count) = (0usize, 0usize, 0usize);
    for k in [1usize, 2] {
        let n = 2 * k;
        for rep in 0..5 {
            let mut maps: Vec<(&str, HermMap, Vec<f64>)> = Vec::new();
            let u = random_isometry(n + rep % 2, n, &mut g);
            maps.push(("congruence", make_congruence(&u, rep % 2 == 1, n).unwrap(), vec![]));
            maps.push(("lk", make_lk(k, n).unwrap(), vec![]));
            maps.push(("hn_to_big", make_hn_to_big(n, k).unwrap(), vec![]));
            let t = g.random_range(0.05..0.95);
            let tau = make_tau_rotation(k, g.random_range(0.0..6.3)).unwrap();
            maps.push(("e2km", make_e2km(k, t, &tau, rep as u64).unwrap(), vec![t.max(1.0 - t)]));
            let d = g.random_range(1..=3);
            let p0 = random_projection(d, g.random_range(1..=d), &mut g);
            maps.push(("tensor", make_tensor(&p0, n).unwrap(), vec![]));
            let q0 = random_projection(d, g.random_range(1..=d), &mut g);
            maps.push(("pq", make_pq(&p0, &q0, n, k).unwrap(), pq_t_values(&p0, &q0)));
            maps.push(("constant", make_constant(&p0, n, k).unwrap(), vec![]));
            for (name, f, want_t) in maps {
                count += 1;
                let Ok(dec) = phraz_decompose(&f, k) else {
                    eprintln!("phraz: {name} at k={k} failed to decompose");
                    failures += 1;
                    continue;
                };
                for _ in 0..10 {
                    let a = random_hermitian(n, &mut g);
                    recon.see(dec.reassemble(&a).dist(&f.apply(&a).unwrap()));
                }
                recon.see(dec.residual);
                tmiss.see(angles_match(&want_t, &dec.t));
                small_blocks += dec.mult.iter().filter(|&&mj| mj < 2 * k).count();
            }
        }
    }
    Verdict::new(
        (recon.0 / 1e-8).max(tmiss.0 / 1e-7).max(penalty(small_blocks + failures)),
        1.0,
        format!(
            "{count} maps, {failures} failed; reassembly {:.1e} (<= 1e-8), t {:.1e} (<= 1e-7), {small_blocks} blocks with m_j < 2k",
            recon.0, tmiss.0
        ),
    )
}

fn constant_rank() -> Verdict {
    let mut g = rng(109);
    let cases = generator_cases(&mut g);
    let mut varying = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let mut ranks = std::collections::BTreeSet::new();
        for _ in 0..samples_for(&cases, i, 1000) {
            let img = match case {
                Case::Projection { map, k, .. } => map.apply(&random_projection(map.domain.n, *k, &mut g)).unwrap(),
                Case::Unitary { map, sample, .. } => map.apply(&sample.draw(&mut g)).unwrap(),
            };
            ranks.insert(numeric_rank(&img));
        }
        if ranks.len() != 1 {
            varying.push(format!("{} {:?}", case.name(), ranks));
        }
    }
    Verdict::new(
        varying.len() as f64,
        0.0,
        if varying.is_empty() { format!("{} instances of 10 generators", cases.len()) } else { varying.join("; ") },
    )
}

fn negative_controls() -> Verdict {
    let mut g = rng(110);
    let cases = generator_cases(&mut g);
    let (mut clean_rejected, mut noisy_accepted, mut tested) = (0usize, 0usize, 0usize);
    for (i, case) in cases.iter().enumerate() {
        let Case::Projection { map, k, .. } = case else { continue };
        tested += 1;
        let mut noisy = map.clone();
        noisy.matrix += DMatrix::from_fn(map.matrix.nrows(), map.matrix.ncols(), |_, _| {
            1e-2 * g.sample::<f64, _>(StandardNormal)
        });
        clean_rejected += usize::from(!verify_preserves(map, *k, 200, 4000 + i as u64).unwrap().ok);
        noisy_accepted += usize::from(verify_preserves(&noisy, *k, 200, 4000 + i as u64).unwrap().ok);
    }
    let search = hermitian_unitary_search(200, 500, 30, 110).unwrap();
    let below = usize::from(search.best_residual < 0.1);
    Verdict::new(
        (clean_rejected + noisy_accepted + below) as f64,
        0.0,
        format!(
            "{tested} maps: {noisy_accepted} noisy accepted, {clean_rejected} clean rejected; \
             search best residual {:.3} over 500 restarts (must stay >= 0.1)",
            search.best_residual
        ),
    )
}

fn determinism() -> Verdict {
    let mut diffs = 0usize;
    let mut failed = 0usize;
    for seed in [0u64, 7, 2024] {
        let a = run_selftest(seed, false);
        let b = run_selftest(seed, false);
        let same = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap() && a.render() == b.render();
        diffs += usize::from(!same);
        failed += usize::from(!a.all_passed());
    }
    Verdict::new((diffs + failed) as f64, 0.0, format!("3 seeds: {diffs} runs differ, {failed} runs with failing checks"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("two-projection canonical form", canonical_form),
        ("gap equals sine of largest angle", gap_identity),
        ("H_a existence law and membership", hol_law),
        ("generators map samples correctly", constructions),
        ("trace-zero involution preserver round trip", iho_round_trip),
        ("rank-k to rank-m preserver round trip", phkk_round_trip),
        ("rank-one preservers on H_2 round trip", dim2_round_trip),
        ("block decomposition and reassembly", phraz_round_trip),
        ("image rank is constant", constant_rank),
        ("negative controls", negative_controls),
        ("selftest determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!v.passed());
        println!(
            "{status} {:>2} {name:<45} worst={:.3e} threshold={:.1e} [{:.1}s] {}",
            i + 1,
            v.worst,
            v.threshold,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
