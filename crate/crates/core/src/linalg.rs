//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small dense matrices (a few dozen rows at most).
//! Hermitian operators are symmetrized on construction, so downstream code can
//! rely on exact Hermiticity of the stored matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest absolute entry, `‖M‖_max`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute imaginary part over all entries.
pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn is_real(m: &CMatrix, tol: f64) -> bool {
    max_imag(m) <= tol
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product `tr(A† B)`, real part. Both arguments are
/// expected to be Hermitian, in which case the imaginary part vanishes.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn diag_unitary(phases: &[f64]) -> CMatrix {
    let d = DVector::from_iterator(phases.len(), phases.iter().map(|p| C64::from_polar(1.0, *p)));
    CMatrix::from_diagonal(&d)
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Extends the orthonormal columns of `cols` to a full orthonormal basis of
/// `C^dim` by Gram-Schmidt against the computational basis.
pub fn complete_basis(cols: &[CVector], dim: usize) -> CMatrix {
    let mut basis: Vec<CVector> = cols.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = CVector::zeros(dim);
        v[k] = ONE;
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-6 {
            basis.push(v / C64::new(nrm, 0.0));
        }
    }
    CMatrix::from_columns(&basis)
}

/// Hermitian operator. The stored matrix is exactly Hermitian: the input is
/// replaced by `(H + H†)/2` at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(format!(
                "Hermitian operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self(sym))
    }

    pub fn from_real(m: &RMatrix) -> Result<Self> {
        Self::new(to_complex(m))
    }

    /// Real symmetric part plus `i` times a real skew-symmetric part.
    pub fn from_parts(plus: &RMatrix, minus: &RMatrix) -> Result<Self> {
        if plus.shape() != minus.shape() {
            return Err(Error::InvalidInput("real and imaginary parts differ in shape".into()));
        }
        Self::new(plus.zip_map(minus, C64::new))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `H⁺ = (H + H*)/2`, returned as a (complex-typed) Hermitian operator.
    pub fn real_part(&self) -> Self {
        Self(self.0.map(|z| C64::new(z.re, 0.0)))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Hermitian) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Hermitian) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `⟨v|H|v⟩`
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }

    pub fn is_real(&self, tol: f64) -> bool {
        is_real(&self.0, tol)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(self).eigenvalues[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Spectral decomposition with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order as `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|x| C64::new(*x, 0.0)),
        );
        &self.eigenvectors * CMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }
}

/// Rotate `v` so that its largest-magnitude entry (first one on ties) is real
/// and positive.
fn fix_phase(v: &mut CVector) {
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max - 1e-12).unwrap_or(0);
    let phase = v[pivot] / C64::new(v[pivot].norm(), 0.0);
    let rot = phase.conj();
    v.iter_mut().for_each(|z| *z *= rot);
}

fn lex_real_cmp(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn hermitian_eig(h: &Hermitian) -> EigenSystem {
    let n = h.dim();
    if n == 0 {
        return EigenSystem { eigenvalues: vec![], eigenvectors: CMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    // Within clusters of numerically equal eigenvalues order by eigenvector.
    let tie = 1e-10 * h.max_abs().max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end].0 - pairs[end - 1].0).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lex_real_cmp(&a.1, &b.1));
        }
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<CVector> = pairs.into_iter().map(|p| p.1).collect();
    EigenSystem { eigenvalues, eigenvectors: CMatrix::from_columns(&cols) }
}

/// Splits `H = H⁺ + i H⁻` into its real symmetric and real skew-symmetric parts.
pub fn real_imag_split(h: &Hermitian) -> (RMatrix, RMatrix) {
    let plus = real_part(h.matrix());
    let mut minus = imag_part(h.matrix());
    for k in 0..minus.nrows() {
        minus[(k, k)] = 0.0;
    }
    (plus, minus)
}

/// `U = left · diag(phases) · right` with `left`, `right` real orthogonal.
#[derive(Debug, Clone)]
pub struct OdFactors {
    pub left: RMatrix,
    pub phases: CVector,
    pub right: RMatrix,
}

impl OdFactors {
    pub fn diagonal(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.phases)
    }

    pub fn reconstruct(&self) -> CMatrix {
        to_complex(&self.left) * self.diagonal() * to_complex(&self.right)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            left: RMatrix::identity(n, n),
            phases: CVector::from_element(n, ONE),
            right: RMatrix::identity(n, n),
        }
    }
}

/// Real symmetric eigendecomposition with ascending eigenvalues.
fn real_sym_eig(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<_> = idx.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    (vals, RMatrix::from_columns(&cols))
}

/// Factor a unitary as real orthogonal · diagonal unitary · real orthogonal.
///
/// `UᵀU` is complex symmetric and unitary, so its real and imaginary parts
/// are commuting real symmetric matrices and share a real orthonormal
/// eigenbasis `Q`. With `UᵀU = Q Λ Qᵀ` and `D = √Λ` (principal branch),
/// `U Q D̄` is real orthogonal.
pub fn unitary_od_decompose(u: &CMatrix) -> Result<OdFactors> {
    if !u.is_square() {
        return Err(Error::InvalidInput("unitary must be square".into()));
    }
    let n = u.nrows();
    let res = unitarity_residual(u);
    if !(res <= 1e-10) {
        return Err(Error::InvalidInput(format!("matrix is not unitary (residual {res:e})")));
    }
    if is_real(u, 1e-14) {
        return Ok(OdFactors {
            left: real_part(u),
            phases: CVector::from_element(n, ONE),
            right: RMatrix::identity(n, n),
        });
    }

    let m = u.transpose() * u;
    let x = real_part(&m);
    let y = imag_part(&m);
    let x = (&x + x.transpose()) * 0.5;
    let y = (&y + y.transpose()) * 0.5;

    // Diagonalize X, then Y restricted to each eigenspace of X.
    let (xvals, xvecs) = real_sym_eig(&x);
    let mut q = RMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (xvals[end] - xvals[end - 1]).abs() <= 1e-8 {
            end += 1;
        }
        let block = xvecs.columns(start, end - start).into_owned();
        let y_restricted = block.transpose() * &y * &block;
        let (_, w) = real_sym_eig(&((&y_restricted + y_restricted.transpose()) * 0.5));
        let rotated = &block * w;
        q.columns_mut(start, end - start).copy_from(&rotated);
        start = end;
    }

    let qc = to_complex(&q);
    let lambda = qc.transpose() * &m * &qc;
    let phases = CVector::from_iterator(
        n,
        (0..n).map(|k| {
            let z = lambda[(k, k)];
            let arg = z.arg();
            // principal branch: half-angle in (-π/2, π/2]
            C64::from_polar(1.0, arg / 2.0)
        }),
    );
    let dbar = CMatrix::from_diagonal(&phases.map(|z| z.conj()));
    let left_c = u * &qc * dbar;
    let left = real_part(&left_c);
    Ok(OdFactors { left, phases, right: q.transpose() })
}

/// Polar decomposition `A = U |A|` with `|A| = √(A†A)`.
pub fn polar_decompose(a: &CMatrix) -> Result<(CMatrix, Hermitian)> {
    if !a.is_square() {
        return Err(Error::InvalidInput("polar decomposition needs a square matrix".into()));
    }
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let svd = a.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smin > 1e-12 * scale) {
        return Err(Error::SingularInput(smin));
    }
    let w = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V†");
    let sigma = CMatrix::from_diagonal(&svd.singular_values.map(|s| C64::new(s, 0.0)));
    let unitary = &w * &vt;
    let abs = Hermitian::new(vt.adjoint() * sigma * &vt)?;
    Ok((unitary, abs))
}

/// `v = Σ_j c_j |a_j⟩ ⊗ |b_j⟩` with `c_j` descending.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub dims: (usize, usize),
    pub coefficients: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> CVector {
        let (m, n) = self.dims;
        let mut v = CVector::zeros(m * n);
        for ((c, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            v += kron_vec(a, b) * C64::new(*c, 0.0);
        }
        v
    }
}

/// Schmidt decomposition of a vector in `C^m ⊗ C^n` (system A is the slow index).
/// Coefficients below `1e-12 · ‖v‖` are dropped.
pub fn schmidt(v: &CVector, dims: (usize, usize)) -> Result<SchmidtForm> {
    let (m, n) = dims;
    if v.len() != m * n {
        return Err(Error::InvalidInput(format!(
            "vector length {} does not match {}x{}",
            v.len(),
            m,
            n
        )));
    }
    let norm = v.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("Schmidt decomposition of the zero vector".into()));
    }
    if m > n {
        let swapped = CVector::from_fn(m * n, |k, _| v[(k % m) * n + k / m]);
        let t = schmidt(&swapped, (n, m))?;
        return Ok(SchmidtForm { dims, coefficients: t.coefficients, left: t.right, right: t.left });
    }
    // Rows of ψ projected on the eigenbasis of ψψ†. The basis is complete, so
    // Σ_j a_j (a_j† ψ) reproduces ψ to rounding even when the SVD would not.
    let psi = CMatrix::from_fn(m, n, |i, j| v[i * n + j]);
    let gram = Hermitian::new(&psi * psi.adjoint())?;
    let eig = hermitian_eig(&gram);
    let cut = 1e-12 * norm;
    let mut terms: Vec<(f64, CVector, CVector)> = (0..m)
        .rev()
        .map(|k| {
            let a = eig.vector(k);
            let row = (a.adjoint() * &psi).transpose();
            let c = row.norm();
            (c, a, row)
        })
        .filter(|(c, _, _)| *c > cut)
        .collect();
    // stable: equal coefficients keep computation order
    terms.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut form = SchmidtForm { dims, coefficients: vec![], left: vec![], right: vec![] };
    for (c, a, row) in terms {
        form.coefficients.push(c);
        form.left.push(a);
        form.right.push(row / C64::new(c, 0.0));
    }
    Ok(form)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Counts eigenvalues below `-tol`, within `±tol`, and above `tol`.
/// Defaults to `tol = 1e-10 · ‖H‖_max`.
pub fn inertia(h: &Hermitian, tol: Option<f64>) -> Inertia {
    let tol = tol.unwrap_or(1e-10 * h.max_abs());
    let eig = hermitian_eig(h);
    let mut out = Inertia { negative: 0, zero: 0, positive: 0 };
    for &x in &eig.eigenvalues {
        if x < -tol {
            out.negative += 1;
        } else if x > tol {
            out.positive += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

/// Real orthogonal `exp(S)` for the skew-symmetric `S` whose strict upper
/// triangle is filled row by row from `generators`.
pub fn orthogonal_from_generators(generators: &[f64], dim: usize) -> RMatrix {
    let mut s = RMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            s[(i, j)] = generators[k];
            s[(j, i)] = -generators[k];
            k += 1;
        }
    }
    s.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_hermitian, rng};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn diagonal_eigenvalues_ascending() {
        let h = Hermitian::from_real(&RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])))
            .unwrap();
        let eig = hermitian_eig(&h);
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut r = rng(11);
        for _ in 0..20 {
            let h = random_hermitian(6, &mut r);
            let eig = hermitian_eig(&h);
            let scale = h.max_abs();
            let hv = h.matrix() * &eig.eigenvectors;
            let vl = &eig.eigenvectors
                * CMatrix::from_diagonal(&DVector::from_iterator(
                    6,
                    eig.eigenvalues.iter().map(|x| C64::new(*x, 0.0)),
                ));
            assert!(max_abs(&(hv - vl)) <= 1e-10 * scale);
            assert!(unitarity_residual(&eig.eigenvectors) <= 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(Hermitian::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn split_of_real_matrix_has_zero_imaginary_part() {
        let h = Hermitian::from_real(&RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0])).unwrap();
        let (p, m) = real_imag_split(&h);
        assert_eq!(p, RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
        assert_eq!(m, RMatrix::zeros(2, 2));
    }

    #[test]
    fn split_recombines() {
        let mut r = rng(3);
        for _ in 0..10 {
            let h = random_hermitian(5, &mut r);
            let (p, m) = real_imag_split(&h);
            let back = p.zip_map(&m, |a, b| C64::new(a, b));
            assert!(max_abs(&(back - h.matrix())) <= 1e-14);
            assert_eq!(p, p.transpose());
            assert_eq!(m, -m.transpose());
        }
    }

    #[test]
    fn od_of_real_orthogonal_is_trivial() {
        let q = orthogonal_from_generators(&[0.3, -1.2, 0.7], 3);
        let f = unitary_od_decompose(&to_complex(&q)).unwrap();
        assert_eq!(f.left, q);
        assert!(f.phases.iter().all(|z| *z == ONE));
        assert_eq!(f.right, RMatrix::identity(3, 3));
    }

    #[test]
    fn od_of_diagonal_phase() {
        let u = diag_unitary(&[0.0, PI / 4.0]);
        let f = unitary_od_decompose(&u).unwrap();
        assert!(max_abs(&(f.reconstruct() - &u)) < 1e-9);
    }

    #[test]
    fn od_rejects_non_unitary() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(unitary_od_decompose(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn od_haar_random() {
        let mut r = rng(7);
        for n in 2..=6 {
            for _ in 0..20 {
                let u = haar_unitary(n, &mut r);
                let f = unitary_od_decompose(&u).unwrap();
                assert!(max_abs(&(f.reconstruct() - &u)) <= 1e-9);
                let ident = RMatrix::identity(n, n);
                assert!(max_abs_real(&(f.left.transpose() * &f.left - &ident)) <= 1e-10);
                assert!(max_abs_real(&(f.right.transpose() * &f.right - &ident)) <= 1e-10);
                assert!(f.phases.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn polar_of_unitary_and_diagonal() {
        let mut r = rng(5);
        let u = haar_unitary(3, &mut r);
        let (w, abs) = polar_decompose(&u).unwrap();
        assert!(max_abs(&(w - &u)) < 1e-10);
        assert!(max_abs(&(abs.matrix() - CMatrix::identity(3, 3))) < 1e-10);

        let a = to_complex(&RMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])));
        let (w, abs) = polar_decompose(&a).unwrap();
        assert!(max_abs(&(w - CMatrix::identity(2, 2))) < 1e-12);
        assert!(max_abs(&(abs.matrix() - &a)) < 1e-12);
    }

    #[test]
    fn polar_random_and_singular() {
        let mut r = rng(9);
        let a = crate::random::ginibre(3, 3, &mut r);
        let (w, abs) = polar_decompose(&a).unwrap();
        assert!(max_abs(&(&w * abs.matrix() - &a)) < 1e-10);
        assert!(unitarity_residual(&w) < 1e-10);
        assert!(abs.is_psd(1e-12));
        let sq = abs.matrix() * abs.matrix();
        assert!(max_abs(&(sq - a.adjoint() * &a)) < 1e-10);

        let s = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert!(matches!(polar_decompose(&s), Err(Error::SingularInput(_))));
    }

    #[test]
    fn schmidt_of_product_and_bell_phase() {
        let mut v = CVector::zeros(4);
        v[0] = ONE;
        let s = schmidt(&v, (2, 2)).unwrap();
        assert_eq!(s.rank(), 1);
        assert_abs_diff_eq!(s.coefficients[0], 1.0, epsilon = 1e-15);

        for theta in [0.0, 0.4, PI / 2.0, 2.5] {
            let mut v = CVector::zeros(4);
            v[0] = C64::new(1.0 / 2f64.sqrt(), 0.0);
            v[3] = C64::from_polar(1.0 / 2f64.sqrt(), theta);
            let s = schmidt(&v, (2, 2)).unwrap();
            assert_eq!(s.rank(), 2);
            for c in &s.coefficients {
                assert_abs_diff_eq!(*c, 1.0 / 2f64.sqrt(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn schmidt_random_reconstructs() {
        let mut r = rng(13);
        let v = crate::random::random_vector(12, &mut r);
        let s = schmidt(&v, (3, 4)).unwrap();
        assert!(s.rank() <= 3);
        assert!((v - s.reconstruct()).norm() < 1e-12);
        assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn schmidt_errors() {
        assert!(schmidt(&CVector::zeros(4), (2, 2)).is_err());
        assert!(schmidt(&CVector::from_element(5, ONE), (2, 2)).is_err());
    }

    #[test]
    fn inertia_of_psd_and_indefinite() {
        let mut r = rng(1);
        let g = crate::random::ginibre(4, 4, &mut r);
        let psd = Hermitian::new(&g * g.adjoint()).unwrap();
        assert_eq!(inertia(&psd, None).negative, 0);
        let d = Hermitian::from_real(&RMatrix::from_diagonal(&DVector::from_vec(vec![
            -1.0, 0.0, 2.0,
        ])))
        .unwrap();
        assert_eq!(inertia(&d, None), Inertia { negative: 1, zero: 1, positive: 1 });
    }

    #[test]
    fn exp_of_skew_is_orthogonal() {
        let q = orthogonal_from_generators(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 4);
        assert!(max_abs_real(&(q.transpose() * &q - RMatrix::identity(4, 4))) < 1e-13);
    }
}
