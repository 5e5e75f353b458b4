//! Bipartite structure on operators over `C^m ⊗ C^n`.
//!
//! Index convention: row-major, system A is the slow index, so basis vector
//! `|i⟩⊗|j⟩` sits at position `i·n + j`. The partial transpose acts on A.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, CMatrix, CVector, Hermitian, C64};

/// Partial transpose on system A of an arbitrary (not necessarily Hermitian)
/// `mn × mn` matrix: block `(i, j)` of the result is block `(j, i)` of `m`.
pub fn partial_transpose_matrix(m: &CMatrix, dims: (usize, usize)) -> CMatrix {
    let (da, db) = dims;
    assert_eq!(m.nrows(), da * db);
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, b) = (r / db, r % db);
        let (j, bp) = (c / db, c % db);
        m[(j * db + b, i * db + bp)]
    })
}

/// Swap of the tensor factors: `⟨ji|M'|lk⟩ = ⟨ij|M|kl⟩`.
pub fn swap_matrix(m: &CMatrix, dims: (usize, usize)) -> CMatrix {
    let (da, db) = dims;
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (j, i) = (r / da, r % da);
        let (l, k) = (c / da, c % da);
        m[(i * db + j, k * db + l)]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dim_a: usize,
    dim_b: usize,
    op: Hermitian,
}

impl BipartiteOperator {
    pub fn new(dims: (usize, usize), op: Hermitian) -> Result<Self> {
        let (m, n) = dims;
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("local dimensions must be at least 1".into()));
        }
        if op.dim() != m * n {
            return Err(Error::InvalidInput(format!(
                "operator of dimension {} does not act on C^{m} ⊗ C^{n}",
                op.dim()
            )));
        }
        Ok(Self { dim_a: m, dim_b: n, op })
    }

    pub fn from_matrix(dims: (usize, usize), m: CMatrix) -> Result<Self> {
        Self::new(dims, Hermitian::new(m)?)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn op(&self) -> &Hermitian {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    fn with_op(&self, op: Hermitian) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, op }
    }

    pub fn partial_transpose(&self) -> Self {
        let pt = partial_transpose_matrix(self.matrix(), self.dims());
        self.with_op(Hermitian::new(pt).expect("partial transpose of Hermitian is Hermitian"))
    }

    pub fn conj(&self) -> Self {
        self.with_op(self.op.conj())
    }

    pub fn real_part(&self) -> Self {
        self.with_op(self.op.real_part())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_op(self.op.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(self.with_op(self.op.add(&other.op)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(self.with_op(self.op.sub(&other.op)))
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }

    /// `(A ⊗ B) M (A ⊗ B)†` for `A: m'×m`, `B: n'×n`.
    pub fn apply_local(&self, a: &CMatrix, b: &CMatrix) -> Result<Self> {
        if a.ncols() != self.dim_a || b.ncols() != self.dim_b {
            return Err(Error::InvalidInput(format!(
                "local operators of shape {}x{} and {}x{} do not act on C^{} ⊗ C^{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                self.dim_a,
                self.dim_b
            )));
        }
        let x = linalg::kron(a, b);
        let m = &x * self.matrix() * x.adjoint();
        Self::new((a.nrows(), b.nrows()), Hermitian::new(m)?)
    }

    /// Partial trace over `side`; tracing out B leaves an operator on A.
    pub fn partial_trace(&self, side: Side) -> Hermitian {
        let (da, db) = self.dims();
        let m = self.matrix();
        let out = match side {
            Side::B => CMatrix::from_fn(da, da, |i, j| {
                (0..db).map(|b| m[(i * db + b, j * db + b)]).sum::<C64>()
            }),
            Side::A => CMatrix::from_fn(db, db, |i, j| {
                (0..da).map(|a| m[(a * db + i, a * db + j)]).sum::<C64>()
            }),
        };
        Hermitian::new(out).expect("partial trace of Hermitian is Hermitian")
    }

    pub fn swap_sides(&self) -> Self {
        let m = swap_matrix(self.matrix(), self.dims());
        Self {
            dim_a: self.dim_b,
            dim_b: self.dim_a,
            op: Hermitian::new(m).expect("swap of Hermitian is Hermitian"),
        }
    }

    /// `tr(self · other)`
    pub fn trace_with(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(linalg::trace_product(self.matrix(), other.matrix()).re)
    }

    /// `⟨a,b| M |a,b⟩`
    pub fn product_expectation(&self, a: &CVector, b: &CVector) -> f64 {
        self.op.expectation(&linalg::kron_vec(a, b))
    }
}

/// Convenience wrappers using the operation names of the public API.
pub fn partial_transpose(m: &BipartiteOperator) -> BipartiteOperator {
    m.partial_transpose()
}

pub fn partial_trace(m: &BipartiteOperator, side: Side) -> Hermitian {
    m.partial_trace(side)
}

pub fn apply_local(m: &BipartiteOperator, a: &CMatrix, b: &CMatrix) -> Result<BipartiteOperator> {
    m.apply_local(a, b)
}

pub fn swap_sides(m: &BipartiteOperator) -> BipartiteOperator {
    m.swap_sides()
}

/// Absolute PSD tolerance for unit-trace states.
pub const PSD_TOL: f64 = 1e-10;
pub const PPT_TOL: f64 = 1e-9;

/// Unit-trace positive semidefinite bipartite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    base: BipartiteOperator,
    norm_factor: f64,
}

#[derive(Debug, Clone)]
pub enum PptVerdict {
    Ppt { min_eigenvalue: f64 },
    /// Most negative eigenpair of `ρ^Γ`.
    Npt { eigenvalue: f64, eigenvector: CVector },
}

impl PptVerdict {
    pub fn is_ppt(&self) -> bool {
        matches!(self, PptVerdict::Ppt { .. })
    }
}

impl DensityMatrix {
    /// Normalizes to unit trace, recording the original trace.
    pub fn new(base: BipartiteOperator) -> Result<Self> {
        let t = base.op().trace();
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidState(format!("trace {t} is not positive")));
        }
        let base = base.scale(1.0 / t);
        let min = base.op().min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { base, norm_factor: t })
    }

    pub fn from_matrix(dims: (usize, usize), m: CMatrix) -> Result<Self> {
        Self::new(BipartiteOperator::from_matrix(dims, m)?)
    }

    pub fn pure(dims: (usize, usize), v: &CVector) -> Result<Self> {
        Self::from_matrix(dims, linalg::outer(v))
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let d = dims.0 * dims.1;
        let base = BipartiteOperator::new(dims, Hermitian::identity(d)).expect("valid dims");
        Self::new(base).expect("identity is a state")
    }

    pub fn base(&self) -> &BipartiteOperator {
        &self.base
    }

    pub fn op(&self) -> &Hermitian {
        self.base.op()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.base.dims()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Trace before normalization.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.op().is_real(tol)
    }

    pub fn is_ppt(&self, tol: f64) -> PptVerdict {
        let eig = hermitian_eig(self.base.partial_transpose().op());
        let min = eig.eigenvalues[0];
        if min < -tol {
            PptVerdict::Npt { eigenvalue: min, eigenvector: eig.vector(0) }
        } else {
            PptVerdict::Ppt { min_eigenvalue: min }
        }
    }

    /// `ρ⁺ = (ρ + ρ*)/2`, which is again a state.
    pub fn real_part(&self) -> DensityMatrix {
        Self::new(self.base.real_part()).expect("real part of a state is a state")
    }

    pub fn conj(&self) -> DensityMatrix {
        Self { base: self.base.conj(), norm_factor: self.norm_factor }
    }

    pub fn swap_sides(&self) -> DensityMatrix {
        Self { base: self.base.swap_sides(), norm_factor: self.norm_factor }
    }

    /// `ρ^Γ` as a state; fails for NPT input.
    pub fn partial_transpose(&self) -> Result<DensityMatrix> {
        Self::new(self.base.partial_transpose())
    }

    /// Local conjugation followed by renormalization.
    pub fn apply_local(&self, a: &CMatrix, b: &CMatrix) -> Result<DensityMatrix> {
        Self::new(self.base.apply_local(a, b)?)
    }
}
