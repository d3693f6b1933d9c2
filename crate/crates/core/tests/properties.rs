use proptest::prelude::*;
use rankpres::constructions::{
    make_congruence, make_constant, make_e2km, make_lk, make_rho, make_tau_rotation,
    random_unitary_family, rho, unitary_family_conditions, unitary_family_defect,
};
use rankpres::grassmann::{
    gap, hol_combination, hol_exists, hol_sample, hol_t, hol_t_values, principal_angles,
    reconstruct, two_proj_canonical, HolChoices, Subspace,
};
use rankpres::herm_space::{decode, encode, map_from_images, HermBasis, HermMap};
use rankpres::linalg::{
    herm_eig, is_projection, polar, projection_defect, rank, svd, unitary_defect, ComplexMatrix, C64, I,
};
use rankpres::preserver::{
    bracket_sign, classify_iho, involution_projection, phraz_decompose, projection_involution,
    trace_zero_form_map, PreserverForm,
};
use rankpres::sampling::{
    gaussian_matrix, haar_unitary, random_hermitian, random_involution, random_isometry,
    random_projection, random_traceless_hermitian, rng,
};
use rankpres::tolerance::{tol_canon, tol_classify, tol_eig, CLUSTER_TOL};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

/// Small integer entries, so that products are exact and layout alone is compared.
fn integer_matrix(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = ComplexMatrix> {
    (rows, cols).prop_flat_map(|(r, c)| {
        prop::collection::vec((-4i8..=4, -4i8..=4), r * c).prop_map(move |v| {
            let data = v.into_iter().map(|(re, im)| C64::new(re as f64, im as f64)).collect();
            ComplexMatrix::from_vec(r, c, data).unwrap()
        })
    })
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.matmul(b).trace().re
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn eig_reconstructs_with_orthonormal_vectors(n in 1usize..=10, seed: u64, scale in 0.01f64..100.0) {
        let a = random_hermitian(n, &mut rng(seed)).scale_real(scale);
        let e = herm_eig(&a).unwrap();
        prop_assert!(e.reconstruct().dist(&a) <= tol_eig(n) * a.frobenius_norm().max(1.0));
        prop_assert!(e.vectors.adjoint_mul(&e.vectors).dist(&ComplexMatrix::identity(n)) <= tol_eig(n));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_reconstructs_and_projection_spectrum_is_binary(r in 1usize..=8, c in 1usize..=8, seed: u64) {
        let mut g = rng(seed);
        let a = gaussian_matrix(r, c, &mut g);
        let d = svd(&a).unwrap();
        prop_assert!(d.reconstruct().dist(&a) <= tol_eig(r.max(c)) * a.frobenius_norm().max(1.0));
        prop_assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));

        let n = r.max(c);
        let p = random_projection(n, c.min(n), &mut g);
        for s in svd(&p).unwrap().sigma {
            prop_assert!(s.abs() <= tol_eig(n) || (s - 1.0).abs() <= tol_eig(n));
        }
    }

    #[test]
    fn polar_recovers_unitary_and_positive_factors(n in 1usize..=6, seed: u64) {
        let mut g = rng(seed);
        let u = haar_unitary(n, &mut g);
        let b = gaussian_matrix(n, n, &mut g);
        let pos = &b.adjoint_mul(&b) + &ComplexMatrix::identity(n).scale_real(0.5);
        let (ru, rp) = polar(&u.matmul(&pos)).unwrap();
        prop_assert!(ru.dist(&u) <= 1e-10);
        prop_assert!(rp.dist(&pos) <= 1e-10 * pos.frobenius_norm());
    }

    #[test]
    fn kron_and_direct_sum_are_associative(
        x in integer_matrix(1..=3, 1..=3),
        y in integer_matrix(1..=3, 1..=2),
        z in integer_matrix(1..=2, 1..=3),
    ) {
        prop_assert_eq!(x.kron(&y).kron(&z), x.kron(&y.kron(&z)));
        let left = ComplexMatrix::direct_sum(&[&ComplexMatrix::direct_sum(&[&x, &y]), &z]);
        prop_assert_eq!(left, ComplexMatrix::direct_sum(&[&x, &ComplexMatrix::direct_sum(&[&y, &z])]));
    }

    #[test]
    fn basis_is_orthonormal(n in 1usize..=8, traceless: bool) {
        prop_assume!(!(traceless && n == 1));
        let basis = HermBasis::new(n, traceless).unwrap();
        let elems: Vec<_> = basis.elements().collect();
        prop_assert_eq!(elems.len(), if traceless { n * n - 1 } else { n * n });
        for (i, e) in elems.iter().enumerate() {
            prop_assert!(e.hermitian_defect() <= tol_eig(n));
            if traceless {
                prop_assert!(e.trace().norm() <= tol_eig(n));
            }
            for (j, f) in elems.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner(e, f) - want).abs() <= tol_eig(n));
            }
        }
    }

    #[test]
    fn coordinates_preserve_inner_products(n in 1usize..=6, seed: u64) {
        let mut g = rng(seed);
        let basis = HermBasis::full(n);
        let (a, b) = (random_hermitian(n, &mut g), random_hermitian(n, &mut g));
        let (va, vb) = (encode(&a, basis).unwrap(), encode(&b, basis).unwrap());
        prop_assert!(decode(&va).unwrap().dist(&a) <= tol_eig(n));
        let dot: f64 = va.coords.iter().zip(&vb.coords).map(|(x, y)| x * y).sum();
        prop_assert!((dot - inner(&a, &b)).abs() <= tol_eig(n) * a.frobenius_norm() * b.frobenius_norm());
    }

    #[test]
    fn maps_are_linear_and_rebuilt_from_images(n in 1usize..=4, m in 1usize..=4, seed: u64) {
        let mut g = rng(seed);
        let (dom, cod) = (HermBasis::full(n), HermBasis::full(m));
        let images: Vec<_> = (0..dom.dim()).map(|_| random_hermitian(m, &mut g)).collect();
        let f = map_from_images(dom, &images, cod).unwrap();
        for (e, img) in dom.elements().zip(&images) {
            prop_assert!(f.apply(&e).unwrap().dist(img) <= tol_eig(m));
        }
        let (a, b) = (random_hermitian(n, &mut g), random_hermitian(n, &mut g));
        let (s, t) = (1.7, -0.4);
        let lhs = f.apply(&(&a.scale_real(s) + &b.scale_real(t))).unwrap();
        let rhs = &f.apply(&a).unwrap().scale_real(s) + &f.apply(&b).unwrap().scale_real(t);
        prop_assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn subspace_frames_are_orthonormal(n in 1usize..=8, seed: u64) {
        let mut g = rng(seed);
        let d = (seed as usize % n) + 1;
        let x = Subspace::random(n, d, &mut g);
        prop_assert!(x.frame().adjoint_mul(x.frame()).dist(&ComplexMatrix::identity(d)) <= tol_eig(n));
        prop_assert!(is_projection(&x.projector(), tol_canon(n)));
        prop_assert!((x.projector().trace().re - d as f64).abs() <= tol_eig(n));
    }

    #[test]
    fn gap_is_sine_of_largest_angle(n in 2usize..=8, seed: u64) {
        let mut g = rng(seed);
        let d = (seed as usize % n) + 1;
        let (x, y) = (Subspace::random(n, d, &mut g), Subspace::random(n, d, &mut g));
        let max = principal_angles(&x, &y).unwrap().into_iter().fold(0.0, f64::max);
        prop_assert!((gap(&x, &y).unwrap() - max.sin()).abs() <= tol_eig(n));
    }

    #[test]
    fn canonical_form_accounts_for_every_angle(n in 2usize..=8, dx in 1usize..=4, dy in 1usize..=4, seed: u64) {
        prop_assume!(dx <= n && dy <= n);
        let mut g = rng(seed);
        let (x, y) = (Subspace::random(n, dx, &mut g), Subspace::random(n, dy, &mut g));
        let form = two_proj_canonical(&x, &y, CLUSTER_TOL).unwrap();
        let joint = rank(&ComplexMatrix::hstack(&[x.frame(), y.frame()])).unwrap();
        prop_assert_eq!(form.span_dim(), joint);
        let (px, py) = reconstruct(&form);
        prop_assert!(px.dist(&x.projector()) <= tol_canon(n));
        prop_assert!(py.dist(&y.projector()) <= tol_canon(n));

        let mut generic: Vec<f64> = principal_angles(&x, &y)
            .unwrap()
            .into_iter()
            .filter(|a| (CLUSTER_TOL..=std::f64::consts::FRAC_PI_2 - CLUSTER_TOL).contains(a))
            .collect();
        generic.sort_by(|a, b| b.total_cmp(a));
        let blocks = form.block_angles();
        prop_assert_eq!(generic.len(), blocks.len());
        for (a, b) in generic.iter().zip(&blocks) {
            prop_assert!((a - b).abs() <= CLUSTER_TOL);
        }
    }

    #[test]
    fn hol_samples_are_members_of_the_right_dimension(n in 2usize..=6, seed: u64, a in 0.55f64..4.0) {
        let mut g = rng(seed);
        let d = (seed as usize % (n / 2)) + 1;
        let x = Subspace::random(n, d, &mut g);
        let y = Subspace::span(&(x.frame() + &gaussian_matrix(n, d, &mut g).scale_real(0.3))).unwrap();
        prop_assume!(hol_exists(&x, &y, a).unwrap());
        let form = two_proj_canonical(&x, &y, CLUSTER_TOL).unwrap();
        let desc = hol_t_values(&form, a).unwrap();
        for (b, t) in form.blocks.iter().zip(&desc.t) {
            let exact = hol_t(a, b.angle.cos());
            prop_assert!((exact.clamp(0.0, 1.0) - t).abs() <= tol_eig(n));
        }
        let z = hol_sample(&x, &y, a, &HolChoices::random(&form, &mut g)).unwrap();
        prop_assert_eq!(z.dim(), d);
        prop_assert!(projection_defect(&hol_combination(&x, &y, &z, a).unwrap()) <= tol_canon(n));
    }

    #[test]
    fn rho_is_a_scaled_unitary(k in 1usize..=6, seed: u64) {
        let mut g = rng(seed);
        let v: Vec<C64> = gaussian_matrix(k, 1, &mut g).col(0);
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let r = make_rho(k).unwrap().apply_vec(&v).unwrap();
        prop_assert!(r.dist(&rho(&v)) <= 1e-14 * (1.0 + r.frobenius_norm()));
        let id = ComplexMatrix::identity(r.rows()).scale_real(norm2);
        prop_assert!(r.adjoint_mul(&r).dist(&id) <= tol_eig(r.rows()) * norm2);
        prop_assert!(r.matmul(&r.adjoint()).dist(&id) <= tol_eig(r.rows()) * norm2);
    }

    #[test]
    fn unitary_family_conditions_imply_unitarity(half in 1usize..=4, seed: u64) {
        let (x, y, z) = random_unitary_family(half, &mut rng(seed));
        prop_assert!(unitary_family_conditions(&x, &y, &z).unwrap() <= tol_eig(2 * half));
        prop_assert!(unitary_family_defect(&x, &y, &z, 32) <= tol_eig(2 * half) * 10.0);
    }

    #[test]
    fn unitary_families_satisfy_the_conditions(n in 2usize..=6, seed: u64, alpha in 0.0f64..6.3) {
        // V(φ) = U (e^{iφ} P1 + e^{−iφ} P2 + e^{iα} P3) for orthogonal P1 + P2 + P3 = I.
        let mut g = rng(seed);
        let u = haar_unitary(n, &mut g);
        let w = haar_unitary(n, &mut g);
        let n1 = (seed as usize) % n;
        let n2 = (seed as usize / 7) % (n - n1 + 1);
        let part = |lo: usize, hi: usize| {
            let cols: Vec<usize> = (lo..hi).collect();
            let f = w.select_cols(&cols);
            f.matmul(&f.adjoint())
        };
        let (p1, p2, p3) = (part(0, n1), part(n1, n1 + n2), part(n1 + n2, n));
        let x = u.matmul(&(&p1 + &p2));
        let y = u.matmul(&(&p1 - &p2)).scale(I);
        let z = u.matmul(&p3).scale(C64::from_polar(1.0, alpha));
        prop_assert!(unitary_family_defect(&x, &y, &z, 32) <= tol_eig(n) * 10.0);
        prop_assert!(unitary_family_conditions(&x, &y, &z).unwrap() <= tol_eig(n) * 10.0);
    }

    #[test]
    fn complementing_twice_is_the_identity(m in 2usize..=6, seed: u64) {
        let k = (seed as usize % (m - 1)) + 1;
        let both = make_lk(k, m).unwrap().compose(&make_lk(m - k, m).unwrap()).unwrap();
        let a = random_hermitian(m, &mut rng(seed));
        prop_assert!(both.apply(&a).unwrap().dist(&a) <= tol_eig(m) * a.frobenius_norm().max(1.0));
        let p = random_projection(m, k, &mut rng(seed ^ 1));
        let img = make_lk(k, m).unwrap().apply(&p).unwrap();
        prop_assert!(is_projection(&img, tol_canon(m)));
        prop_assert!((img.trace().re - (m - k) as f64).abs() <= tol_eig(m));
    }

    #[test]
    fn bracket_sign_separates_linear_and_conjugate_forms(k in 1usize..=3, seed: u64, conj: bool) {
        let mut g = rng(seed);
        let n = 2 * k;
        let u = haar_unitary(n, &mut g);
        let f = trace_zero_form_map(&u, 1, conj).unwrap();
        let want = if conj { -1.0 } else { 1.0 };
        // On H^0_2 the conjugate form is also linear up to sign, so only k > 1 separates them.
        if k > 1 {
            prop_assert!((bracket_sign(&f, seed) - want).abs() <= 1e-10);
        }
        let (a, b) = (random_traceless_hermitian(n, &mut g), random_traceless_hermitian(n, &mut g));
        let lhs = f.apply(&a).unwrap().i_commutator(&f.apply(&b).unwrap());
        let rhs = f.apply(&a.i_commutator(&b)).unwrap().scale_real(want);
        prop_assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn recovered_congruence_matches_on_the_basis(k in 1usize..=3, seed: u64, conj: bool, negate: bool) {
        let mut g = rng(seed);
        let n = 2 * k;
        let s = if negate { -1 } else { 1 };
        let f = trace_zero_form_map(&haar_unitary(n, &mut g), s, conj).unwrap();
        let c = classify_iho(&f, seed).unwrap();
        let PreserverForm::TraceZeroUnitaryForm { u, s: rs, conj: rc } = &c.form else {
            return Err(TestCaseError::fail(format!("got {}", c.tag())));
        };
        prop_assert!(c.residual <= tol_classify(n));
        for e in HermBasis::traceless(n).elements() {
            let e_hat = if *rc { e.conj() } else { e.clone() };
            let want = u.congruence(&e_hat).scale_real(*rs as f64);
            prop_assert!(f.apply(&e).unwrap().dist(&want) <= tol_classify(n));
        }
    }

    #[test]
    fn involutions_and_half_rank_projections_correspond(k in 1usize..=4, seed: u64) {
        let h = random_involution(k, &mut rng(seed));
        let p = involution_projection(&h).unwrap();
        prop_assert!(is_projection(&p, tol_canon(2 * k)));
        prop_assert!((p.trace().re - k as f64).abs() <= tol_eig(2 * k));
        prop_assert!(projection_involution(&p).unwrap().dist(&h) <= tol_eig(2 * k) * 10.0);
    }

    #[test]
    fn block_decomposition_respects_the_rank_bound(k in 1usize..=2, seed: u64, t in 0.05f64..0.95, phi in 0.0f64..6.3) {
        let tau = make_tau_rotation(k, phi).unwrap();
        let f = make_e2km(k, t, &tau, seed).unwrap();
        prop_assert!(f.codomain.n / 2 >= 2 * k);
        let d = phraz_decompose(&f, k).unwrap();
        prop_assert!(d.residual <= tol_classify(f.codomain.n));
        prop_assert!(d.mult.iter().all(|&mj| mj >= 2 * k));
        prop_assert!(d.t.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(d.t.iter().all(|&tj| tj > 0.5 && tj < 1.0));

        let mut g = rng(seed);
        for phij in &d.phij {
            for _ in 0..10 {
                let h = random_involution(k, &mut g);
                prop_assert!(unitary_defect(&phij.apply(&h).unwrap()) <= tol_classify(f.codomain.n));
            }
        }
    }

    #[test]
    fn genuine_low_rank_preservers_have_small_or_large_p(k in 1usize..=2, seed: u64, which in 0usize..3) {
        let mut g = rng(seed);
        let n = 2 * k;
        // Every map here has image rank at most k.
        let f: HermMap = match which {
            0 => make_congruence(&random_isometry(n + 1, n, &mut g), seed % 2 == 0, n).unwrap(),
            1 => make_lk(k, n).unwrap(),
            _ => make_constant(&random_projection(3, (seed as usize % k) + 1, &mut g), n, k).unwrap(),
        };
        let d = phraz_decompose(&f, k).unwrap();
        prop_assert!(d.p == 0 || d.p >= k, "p = {}", d.p);
        if let Some(phi0) = &d.phi0 {
            let traceless = phi0.restrict_traceless().unwrap();
            for _ in 0..10 {
                let h = random_involution(k, &mut g);
                let img = traceless.apply(&h).unwrap();
                prop_assert!(img.trace().norm() <= tol_classify(n));
                prop_assert!(img.matmul(&img).dist(&ComplexMatrix::identity(img.rows())) <= tol_classify(n));
            }
        }
    }
}

#[test]
fn conjugate_congruence_by_rotation_is_l1() {
    let u = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let f = make_congruence(&u, true, 2).unwrap();
    let l1 = make_lk(1, 2).unwrap();
    assert!((&f.matrix - &l1.matrix).abs().max() < 1e-15);
}
