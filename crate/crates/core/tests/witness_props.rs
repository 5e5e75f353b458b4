use proptest::prelude::*;
use rewlab_core::linalg::{outer, Hermitian, C64};
use rewlab_core::random::{haar_unitary, random_density, random_hermitian, random_unit_vector, random_vector, rng};
use rewlab_core::separability::{gilbert, rew_detectable};
use rewlab_core::states::{bell_phase_state, bell_phase_vector, witness_theta};
use rewlab_core::witness::{classify_w_plus, detects, witness_from_npt, WPlusTag, DEFAULT_DELTA};
use rewlab_core::{BipartiteOperator, DensityMatrix, GilbertOptions, Provenance, SeparabilityVerdict, Witness};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn conjugation_and_transpose_symmetry(seed in any::<u64>(), m in 2usize..=4, n in 2usize..=4) {
        let mut r = rng(seed);
        let w = BipartiteOperator::new((m, n), random_hermitian(m * n, &mut r)).unwrap();
        let rho = BipartiteOperator::new((m, n), random_density(m * n, 2, &mut r)).unwrap();
        let v = w.trace_with(&rho).unwrap();
        let scale = w.matrix().norm();
        prop_assert!((v - w.conj().trace_with(&rho.conj()).unwrap()).abs() < 1e-12 * scale);
        prop_assert!((v - w.partial_transpose().trace_with(&rho.partial_transpose()).unwrap()).abs() < 1e-12 * scale);
    }
}

/// NPT states `p|ψ⟩⟨ψ| + (1-p)τ` with `ψ` entangled and `τ` random.
fn npt_state(seed: u64, dims: (usize, usize)) -> DensityMatrix {
    let mut r = rng(seed);
    let d = dims.0 * dims.1;
    loop {
        let psi = random_unit_vector(d, &mut r);
        let tau = random_density(d, d, &mut r);
        let p = 0.5 + 0.5 * rand::Rng::random::<f64>(&mut r);
        let m = outer(&psi) * C64::new(p, 0.0) + tau.matrix() * C64::new(1.0 - p, 0.0);
        let rho = DensityMatrix::from_matrix(dims, m).unwrap();
        if !rho.is_ppt(1e-6).is_ppt() {
            return rho;
        }
    }
}

#[test]
fn witnesses_detecting_a_state_form_a_convex_set() {
    for k in 0..12 {
        let rho = npt_state(100 + k, (2, 2));
        let w1 = witness_from_npt(&rho).unwrap().witness;
        let rep = gilbert(&rho, &GilbertOptions::default());
        assert!(rep.max_increase() <= 1e-14, "objective increased by {:e}", rep.max_increase());
        let SeparabilityVerdict::Entangled { witness: w2, .. } = rep.verdict else {
            panic!("NPT state {k} not found entangled");
        };
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = w1.base().scale(t).add(&w2.base().scale(1.0 - t)).unwrap();
            let w = Witness::new(mix, Provenance::User).unwrap();
            let det = detects(&w, &rho, DEFAULT_DELTA).unwrap();
            assert!(det.detected, "mix t={t} of instance {k}: tr = {:e}", det.value);
        }
    }
}

#[test]
fn detection_is_lu_covariant() {
    let mut r = rng(7);
    for k in 0..40 {
        let dims = (2 + k % 2, 2 + (k / 2) % 2);
        let rho = npt_state(200 + k as u64, dims);
        let w = witness_from_npt(&rho).unwrap().witness;
        let (u, v) = (haar_unitary(dims.0, &mut r), haar_unitary(dims.1, &mut r));
        let w2 = Witness::new(w.base().apply_local(&u, &v).unwrap(), Provenance::User).unwrap();
        let rho2 = rho.apply_local(&u, &v).unwrap();
        let a = detects(&w, &rho, DEFAULT_DELTA).unwrap();
        let b = detects(&w2, &rho2, DEFAULT_DELTA).unwrap();
        assert_eq!(a.detected, b.detected);
        assert!((a.value - b.value).abs() < 1e-12);
    }
}

#[test]
fn states_with_separable_real_part_obey_the_real_part_inequality() {
    let mut r = rng(11);
    let bell = bell_phase_state(std::f64::consts::FRAC_PI_2).unwrap();
    let w_r = witness_theta(0.0).unwrap();
    for k in 0..30 {
        // p|ψ(π/2)⟩⟨ψ(π/2)| plus product noise keeps ρ⁺ separable
        let p = 0.6 + 0.4 * (k as f64) / 30.0;
        let mut m = bell.matrix() * C64::new(p, 0.0);
        for _ in 0..3 {
            let a = random_unit_vector(2, &mut r);
            let b = random_unit_vector(2, &mut r);
            m += outer(&rewlab_core::linalg::kron_vec(&a, &b)) * C64::new((1.0 - p) / 3.0, 0.0);
        }
        let rho = DensityMatrix::from_matrix((2, 2), m).unwrap();
        let w = witness_from_npt(&rho).unwrap().witness;
        let t = w.expectation(&rho).unwrap();
        let t_conj = w.expectation(&rho.conj()).unwrap();
        assert!(t < 0.0);
        assert!(t_conj >= -t - 1e-12, "tr(Wρ*) = {t_conj:e}, tr(Wρ) = {t:e}");
        // a real witness sees only ρ⁺
        let tr = w_r.expectation(&rho).unwrap();
        assert!((tr - w_r.expectation(&rho.real_part()).unwrap()).abs() < 1e-12);
        assert!(tr >= -1e-12);
    }
}

#[test]
fn real_witnesses_detect_conjugate_and_real_part() {
    let rho = bell_phase_state(0.3).unwrap();
    let rep = rew_detectable(&rho, &GilbertOptions::default()).unwrap();
    let rewlab_core::RewVerdict::Yes { rew, .. } = rep.verdict else { panic!("bell(0.3) not REW-detectable") };
    assert!(rew.is_real(0.0));
    for s in [rho.clone(), rho.conj(), rho.real_part()] {
        assert!(detects(&rew, &s, DEFAULT_DELTA).unwrap().detected);
    }
}

fn constructed_witnesses() -> Vec<Witness> {
    let mut out: Vec<Witness> = [0.0, 0.7, std::f64::consts::FRAC_PI_2, 2.0, 5.0]
        .iter()
        .map(|&t| witness_theta(t).unwrap())
        .collect();
    for k in 0..10 {
        let dims = (2 + k % 2, 3);
        out.push(witness_from_npt(&npt_state(300 + k as u64, dims)).unwrap().witness);
    }
    let rho = npt_state(400, (3, 3));
    if let SeparabilityVerdict::Entangled { witness, .. } = gilbert(&rho, &GilbertOptions::default()).verdict {
        out.push(witness);
    }
    out
}

#[test]
fn partial_transpose_of_a_witness_is_never_a_ppt_state() {
    for w in constructed_witnesses() {
        let g = w.base().partial_transpose();
        let scale = g.op().max_abs();
        if g.op().min_eigenvalue() >= -1e-10 * scale {
            let npt = g.partial_transpose().op().min_eigenvalue() < -1e-10 * scale;
            assert!(npt, "W^Γ is PSD and PPT for provenance {:?}", w.provenance());
        }
    }
}

#[test]
fn w_plus_npt_instances_have_gamma_detecting_real_npt_states() {
    // two-qubit instance: W(π/2) + t|ψ(0)⟩⟨ψ(0)|
    let base = witness_theta(std::f64::consts::FRAC_PI_2).unwrap();
    let bell0 = BipartiteOperator::from_matrix((2, 2), outer(&bell_phase_vector(0.0))).unwrap();
    let w = Witness::new(base.base().add(&bell0.scale(0.5)).unwrap(), Provenance::User).unwrap();
    let mut hits = vec![w];

    // random search over decomposable 3x3 witnesses P^Γ + tQ with Q real
    let mut r = rng(0x3b3);
    for _ in 0..3000 {
        let y = random_vector(9, &mut r);
        let p = BipartiteOperator::from_matrix((3, 3), outer(&y) / C64::new(y.norm_squared(), 0.0)).unwrap();
        let rank = 1 + (rand::Rng::random::<u32>(&mut r) % 8) as usize;
        let g = rewlab_core::RMatrix::from_fn(9, rank, |_, _| rand::Rng::random::<f64>(&mut r) - 0.5);
        let q = &g * g.transpose();
        let t = 3.0 * rand::Rng::random::<f64>(&mut r) / q.trace();
        let q = BipartiteOperator::new((3, 3), Hermitian::from_real(&(q * t)).unwrap()).unwrap();
        let w = p.partial_transpose().add(&q).unwrap();
        let plus = w.real_part();
        let scale = w.op().max_abs();
        let candidate = w.op().min_eigenvalue() < -1e-10 * scale
            && plus.op().min_eigenvalue() >= -1e-10 * scale
            && plus.partial_transpose().op().min_eigenvalue() < -1e-10 * scale;
        if candidate {
            hits.push(Witness::new(w, Provenance::User).unwrap());
        }
    }
    assert!(hits.len() > 1, "random search found no instance");

    for w in hits {
        assert_eq!(classify_w_plus(&w).tag, WPlusTag::NptState);
        // (W^Γ)⁺ = (W⁺)^Γ is real with a negative eigenvector x; |x⟩⟨x| is real,
        // detected by W^Γ and NPT
        let g = w.base().partial_transpose();
        let eig = rewlab_core::linalg::hermitian_eig(g.real_part().op());
        let x = eig.vector(0);
        let rho = DensityMatrix::pure(w.dims(), &x).unwrap();
        assert!(rho.is_real(1e-12));
        assert!(g.trace_with(rho.base()).unwrap() < -1e-10);
        assert!(!rho.is_ppt(1e-9).is_ppt());
        assert!(w.expectation(&rho).unwrap() >= -1e-10, "W must not detect the real state");
    }
}

#[test]
fn hermitian_non_witness_with_witness_real_part() {
    let h = rewlab_core::states::h_counterexample();
    let op = BipartiteOperator::new((2, 2), h).unwrap();
    assert!(Witness::new(op.clone(), Provenance::User).is_err());
    let plus = Witness::new(op.real_part(), Provenance::User).unwrap();
    let w0 = witness_theta(0.0).unwrap();
    assert!((plus.matrix() - w0.matrix()).norm() < 1e-14);
}
