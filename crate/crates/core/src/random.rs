//! Seeded random matrices. All samplers take an explicit generator so that
//! every search in the crate is replayable from a `u64` seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector, Hermitian, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`. Used to give each restart
/// of a parallel search its own generator.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

fn gaussian<R: Rng + ?Sized>(r: &mut R) -> C64 {
    C64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, r: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(r))
}

pub fn random_vector<R: Rng + ?Sized>(len: usize, r: &mut R) -> CVector {
    CVector::from_fn(len, |_, _| gaussian(r))
}

pub fn random_unit_vector<R: Rng + ?Sized>(len: usize, r: &mut R) -> CVector {
    let v = random_vector(len, r);
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_real_unit_vector<R: Rng + ?Sized>(len: usize, r: &mut R) -> CVector {
    let v = CVector::from_fn(len, |_, _| C64::new(r.sample(StandardNormal), 0.0));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, r: &mut R) -> Hermitian {
    let g = ginibre(dim, dim, r);
    Hermitian::new(&g + g.adjoint()).expect("finite square matrix")
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, r: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, r);
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for k in 0..dim {
        let d = rr[(k, k)];
        let ph = if d.norm() > 0.0 { d / C64::new(d.norm(), 0.0) } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= ph;
    }
    q
}

/// Random density matrix `G G† / tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, r: &mut R) -> Hermitian {
    let g = ginibre(dim, rank, r);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    Hermitian::new(m / C64::new(t, 0.0)).expect("finite square matrix")
}
