use proptest::prelude::*;
use rewlab_core::linalg::{
    frobenius, hermitian_eig, inertia, kron, max_abs, max_abs_real, polar_decompose, real_imag_split, schmidt,
    to_complex, unitarity_residual, unitary_od_decompose, CMatrix, Hermitian, C64,
};
use rewlab_core::random::{ginibre, haar_unitary, random_hermitian, random_real_unit_vector, random_vector, rng};

#[test]
fn od_decomposition_on_1000_haar_unitaries() {
    let mut r = rng(0xd0);
    let mut worst: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for k in 0..1000 {
        let d = 2 + k % 5;
        let u = haar_unitary(d, &mut r);
        let f = unitary_od_decompose(&u).unwrap();
        worst = worst.max(max_abs(&(f.reconstruct() - &u)));
        let id = rewlab_core::RMatrix::identity(d, d);
        worst_orth = worst_orth
            .max(max_abs_real(&(f.left.transpose() * &f.left - &id)))
            .max(max_abs_real(&(f.right.transpose() * &f.right - &id)));
        for p in f.phases.iter() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }
    assert!(worst < 1e-9, "reconstruction residual {worst:e}");
    assert!(worst_orth < 1e-10, "orthogonality residual {worst_orth:e}");
}

#[test]
fn od_rejects_non_unitary() {
    let a = CMatrix::from_diagonal_element(2, 2, C64::new(2.0, 0.0));
    assert!(unitary_od_decompose(&a).is_err());
}

fn seeds() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn real_imag_split_recombines((seed, d) in seeds()) {
        let mut r = rng(seed);
        let h = random_hermitian(d, &mut r);
        let (p, m) = real_imag_split(&h);
        let back = to_complex(&p) + to_complex(&m) * C64::new(0.0, 1.0);
        prop_assert!(max_abs(&(back - h.matrix())) < 1e-14);
        prop_assert!(max_abs_real(&(p.transpose() - &p)) == 0.0);
        prop_assert!(max_abs_real(&(m.transpose() + &m)) == 0.0);
        let a = random_real_unit_vector(d, &mut r).map(|z| z.re);
        prop_assert!((a.transpose() * &m * &a)[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn eigensystem_reconstructs((seed, d) in seeds()) {
        let mut r = rng(seed);
        let h = random_hermitian(d, &mut r);
        let e = hermitian_eig(&h);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(max_abs(&(e.reconstruct() - h.matrix())) < 1e-10 * h.max_abs());
        let v = &e.eigenvectors;
        prop_assert!(max_abs(&(v.adjoint() * v - CMatrix::identity(d, d))) < 1e-10);
    }

    #[test]
    fn sylvester_inertia_invariance((seed, d) in seeds()) {
        let mut r = rng(seed);
        let h = random_hermitian(d, &mut r);
        let s = ginibre(d, d, &mut r);
        let congruent = Hermitian::new(&s * h.matrix() * s.adjoint()).unwrap();
        prop_assert_eq!(inertia(&h, None), inertia(&congruent, None));
    }

    #[test]
    fn schmidt_coefficients_are_lu_invariant(seed in any::<u64>(), m in 2usize..=4, n in 2usize..=4) {
        let mut r = rng(seed);
        let v = random_vector(m * n, &mut r);
        let u = kron(&haar_unitary(m, &mut r), &haar_unitary(n, &mut r));
        let a = schmidt(&v, (m, n)).unwrap();
        let b = schmidt(&(u * &v), (m, n)).unwrap();
        prop_assert_eq!(a.rank(), b.rank());
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let norm2: f64 = a.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((norm2 - v.norm_squared()).abs() < 1e-12 * v.norm_squared().max(1.0));
        let err = (a.reconstruct() - &v).norm();
        prop_assert!(err < 1e-12 * v.norm().max(1.0), "residual {:e} for norm {}", err, v.norm());
    }

    #[test]
    fn polar_reconstructs((seed, d) in seeds()) {
        let mut r = rng(seed);
        let a = ginibre(d, d, &mut r);
        let (u, abs) = polar_decompose(&a).unwrap();
        prop_assert!(unitarity_residual(&u) < 1e-10);
        prop_assert!(frobenius(&(&u * abs.matrix() - &a)) < 1e-10 * frobenius(&a));
        prop_assert!(abs.min_eigenvalue() > 0.0);
    }
}
