use rand::Rng;
use rewlab_core::linalg::{hermitian_eig, inertia, max_abs, max_imag, CMatrix, Hermitian, C64};
use rewlab_core::random::rng;
use rewlab_core::separability::seesaw::max_product_expectation;
use rewlab_core::states::{
    diagonal_realpart_pattern, quqart_pair, rank4_state, support_reduce, upb_family, upb_state, Rank4Params,
    UpbAngles,
};
use rewlab_core::{BipartiteOperator, DensityMatrix};

fn fixture_angles() -> UpbAngles {
    let v: Vec<f64> = include_str!("fixtures/upb_angles.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse().unwrap())
        .collect();
    UpbAngles::from_array(v.try_into().unwrap())
}

#[test]
fn rank4_family_is_real_psd_rank_four_and_gamma_invariant() {
    let mut r = rng(0x4a4);
    let mut worst_gamma: f64 = 0.0;
    for _ in 0..50 {
        let p = Rank4Params::new(
            r.random_range(0.2..5.0),
            r.random_range(0.2..5.0),
            r.random_range(0.2..5.0),
            r.random_range(0.2..5.0),
        )
        .unwrap();
        let s = rank4_state(&p).unwrap();
        assert_eq!(max_imag(s.matrix()), 0.0);
        let eig = hermitian_eig(s.op());
        let rank = eig.eigenvalues.iter().filter(|&&x| x > 1e-10).count();
        assert_eq!(rank, 4, "{p:?}");
        assert!(eig.eigenvalues[0] > -1e-12);
        worst_gamma = worst_gamma.max(max_abs(&(s.base().partial_transpose().matrix() - s.matrix())));
    }
    println!("rank4: max |σ^Γ - σ| over 50 draws = {worst_gamma:e}");
    assert!(worst_gamma <= 1e-12);
}

#[test]
fn upb_kernel_and_range_evidence() {
    let fam = upb_family(fixture_angles()).unwrap();
    assert!(fam.warnings.is_empty());
    assert!(fam.projector_residual() < 1e-8);
    let rho = upb_state(&fam).unwrap();
    let inert = inertia(rho.op(), Some(1e-10));
    assert_eq!((inert.negative, inert.zero, inert.positive), (0, 5, 4));
    for v in fam.product_vectors() {
        assert!(rho.op().expectation(&v).abs() < 1e-12);
    }
    // no product vector in the range: max ⟨a,b|Π|a,b⟩ stays below 1
    let range = BipartiteOperator::from_matrix((3, 3), rho.matrix() * C64::new(4.0, 0.0)).unwrap();
    let best = max_product_expectation(&range, 256, 0x0b);
    println!("upb range overlap = {:.12}", best.value);
    assert!(best.value < 1.0 - 1e-4, "range overlap {}", best.value);
}

#[test]
fn quqart_pair_spectra_agree() {
    let pair = quqart_pair().unwrap();
    assert_eq!(pair.rho.norm_factor(), 14.0);
    let a = hermitian_eig(pair.rho.op()).eigenvalues;
    let b = hermitian_eig(pair.sigma.op()).eigenvalues;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn support_reduction_of_embedded_bell_state() {
    let mut m = CMatrix::zeros(9, 9);
    for &i in &[0usize, 4] {
        for &j in &[0usize, 4] {
            m[(i, j)] = C64::new(0.5, 0.0);
        }
    }
    let rho = DensityMatrix::from_matrix((3, 3), m).unwrap();
    let red = support_reduce(&rho).unwrap();
    assert_eq!((red.p, red.q), (2, 2));
    let back = red.reconstruct().unwrap();
    assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-10);
}

#[test]
fn diagonal_real_part_zero_pattern() {
    // ρ⁺ = diag(p) with p_{1,2} = 0; ρ adds an imaginary coherence that keeps it PPT
    let d = 9;
    let mut m = CMatrix::zeros(d, d);
    let w = [0.2, 0.1, 0.0, 0.1, 0.2, 0.1, 0.0, 0.1, 0.2];
    for (k, x) in w.iter().enumerate() {
        m[(k, k)] = C64::new(*x, 0.0);
    }
    m[(0, 4)] = C64::new(0.0, 0.05);
    m[(4, 0)] = C64::new(0.0, -0.05);
    let rho = DensityMatrix::new(BipartiteOperator::new((3, 3), Hermitian::new(m).unwrap()).unwrap()).unwrap();
    assert!(rho.is_ppt(1e-9).is_ppt());
    let rep = diagonal_realpart_pattern(&rho).unwrap();
    assert!(rep.holds(), "{:?}", rep.violations);
}
