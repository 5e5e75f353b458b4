//! Alternating eigenvector maximization of `⟨a,b|M|a,b⟩` over product vectors.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use crate::bipartite::BipartiteOperator;
use crate::linalg::{CMatrix, CVector, C64};
use crate::random::{random_unit_vector, stream};

pub const MAX_SWEEPS: usize = 500;

#[derive(Debug, Clone)]
pub struct ProductOptimum {
    pub value: f64,
    pub a: CVector,
    pub b: CVector,
    /// Index of the start that produced the optimum. Warm starts come first.
    pub start: usize,
}

#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub value: f64,
    pub a: CVector,
    pub b: CVector,
    /// Objective after each half-sweep.
    pub history: Vec<f64>,
}

/// `Σ_{i,i'} ā_i a_{i'} M[(i,·),(i',·)]`, an `n × n` operator on B.
fn contract_a(m: &CMatrix, dims: (usize, usize), a: &CVector) -> CMatrix {
    let (da, db) = dims;
    let mut out = CMatrix::zeros(db, db);
    for i in 0..da {
        for ip in 0..da {
            let w = a[i].conj() * a[ip];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..db {
                for jp in 0..db {
                    out[(j, jp)] += w * m[(i * db + j, ip * db + jp)];
                }
            }
        }
    }
    out
}

/// `Σ_{j,j'} b̄_j b_{j'} M[(·,j),(·,j')]`, an `m × m` operator on A.
fn contract_b(m: &CMatrix, dims: (usize, usize), b: &CVector) -> CMatrix {
    let (da, db) = dims;
    let mut out = CMatrix::zeros(da, da);
    for j in 0..db {
        for jp in 0..db {
            let w = b[j].conj() * b[jp];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..da {
                for ip in 0..da {
                    out[(i, ip)] += w * m[(i * db + j, ip * db + jp)];
                }
            }
        }
    }
    out
}

fn top_eigenpair(h: CMatrix) -> (f64, CVector) {
    let n = h.nrows();
    if n == 1 {
        return (h[(0, 0)].re, CVector::from_element(1, C64::new(1.0, 0.0)));
    }
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut k = 0;
    for t in 1..n {
        if eig.eigenvalues[t] > eig.eigenvalues[k] {
            k = t;
        }
    }
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

/// One see-saw run from the start vector `a0` on system A.
pub fn run(m: &BipartiteOperator, a0: &CVector) -> SeesawRun {
    let dims = m.dims();
    let mat = m.matrix();
    let scale = m.op().max_abs().max(f64::MIN_POSITIVE);
    let mut a = a0.normalize();
    let (mut value, mut b) = top_eigenpair(contract_a(mat, dims, &a));
    let mut history = vec![value];
    for _ in 0..MAX_SWEEPS {
        let prev = value;
        let (va, na) = top_eigenpair(contract_b(mat, dims, &b));
        if va >= value {
            a = na;
            value = va;
        }
        history.push(value);
        let (vb, nb) = top_eigenpair(contract_a(mat, dims, &a));
        if vb >= value {
            b = nb;
            value = vb;
        }
        history.push(value);
        if value - prev <= 1e-15 * scale {
            break;
        }
    }
    let value = m.product_expectation(&a, &b);
    SeesawRun { value, a, b, history }
}

/// Best product expectation over the warm starts followed by `restarts`
/// seeded random starts. Restarts run in parallel; the merge keeps the
/// largest value and, on exact ties, the lowest start index.
pub fn maximize_with_starts(
    m: &BipartiteOperator,
    warm: &[CVector],
    restarts: usize,
    seed: u64,
) -> ProductOptimum {
    let (da, _) = m.dims();
    let total = warm.len() + restarts;
    assert!(total >= 1, "at least one start is required");
    let runs: Vec<(usize, SeesawRun)> = (0..total)
        .into_par_iter()
        .map(|k| {
            let a0 = if k < warm.len() {
                warm[k].clone()
            } else {
                let mut r = stream(seed, (k - warm.len()) as u64);
                random_unit_vector(da, &mut r)
            };
            (k, run(m, &a0))
        })
        .collect();
    let (start, best) = runs
        .into_iter()
        .reduce(|x, y| if y.1.value > x.1.value { y } else { x })
        .expect("non-empty");
    ProductOptimum { value: best.value, a: best.a, b: best.b, start }
}

pub fn max_product_expectation(m: &BipartiteOperator, restarts: usize, seed: u64) -> ProductOptimum {
    maximize_with_starts(m, &[], restarts.max(1), seed)
}

/// `min ⟨a,b|M|a,b⟩`, found by maximizing `-M`.
pub fn min_product_expectation(m: &BipartiteOperator, restarts: usize, seed: u64) -> ProductOptimum {
    let mut opt = max_product_expectation(&m.scale(-1.0), restarts, seed);
    opt.value = -opt.value;
    opt
}

/// Heuristic block-positivity check.
#[derive(Debug, Clone)]
pub struct BlockPositivity {
    pub min_value: f64,
    pub threshold: f64,
    pub restarts: usize,
    pub seed: u64,
    pub passed: bool,
}

/// Passes when the smallest product expectation found is at least
/// `-1e-8·‖M‖_max`.
pub fn block_positivity(m: &BipartiteOperator, restarts: usize, seed: u64) -> BlockPositivity {
    let restarts = restarts.max(1);
    let opt = min_product_expectation(m, restarts, seed);
    let threshold = -1e-8 * m.op().max_abs();
    BlockPositivity { min_value: opt.value, threshold, restarts, seed, passed: opt.value >= threshold }
}
