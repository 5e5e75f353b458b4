//! Levenberg-Marquardt refinement of the active product atoms.
//!
//! Frank-Wolfe slows to a sublinear crawl on states at the boundary of the
//! separable set. Near a decomposition, fitting `Σ_k (u_k u_k†) ⊗ (v_k v_k†)`
//! directly to `ρ` converges quadratically.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{Atom, Iterate};
use crate::linalg::{frobenius, kron, CMatrix, CVector, C64};

const MAX_FREE_ATOMS: usize = 48;
const MAX_STEPS: usize = 60;

/// Real coordinates of a Hermitian matrix whose Euclidean norm is the
/// Frobenius norm.
fn hermitian_coords(m: &CMatrix, out: &mut [f64]) {
    let d = m.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut k = 0;
    for i in 0..d {
        out[k] = m[(i, i)].re;
        k += 1;
        for j in i + 1..d {
            out[k] = s * m[(i, j)].re;
            out[k + 1] = s * m[(i, j)].im;
            k += 2;
        }
    }
}

struct Model {
    dims: (usize, usize),
    fixed: CMatrix,
    us: Vec<CVector>,
    vs: Vec<CVector>,
}

impl Model {
    fn params(&self) -> usize {
        self.us.len() * 2 * (self.dims.0 + self.dims.1)
    }

    fn value(&self) -> CMatrix {
        let mut s = self.fixed.clone();
        for (u, v) in self.us.iter().zip(&self.vs) {
            s += kron(&(u * u.adjoint()), &(v * v.adjoint()));
        }
        s
    }

    fn jacobian(&self) -> DMatrix<f64> {
        let (m, n) = self.dims;
        let d = m * n;
        let rows = d * d;
        let mut jac = DMatrix::zeros(rows, self.params());
        let mut buf = vec![0.0; rows];
        let mut col = 0;
        let i_unit = C64::new(0.0, 1.0);
        for (u, v) in self.us.iter().zip(&self.vs) {
            let x = u * u.adjoint();
            let y = v * v.adjoint();
            for (len, on_a) in [(m, true), (n, false)] {
                let w = if on_a { u } else { v };
                for unit in [C64::new(1.0, 0.0), i_unit] {
                    for i in 0..len {
                        let mut e = CVector::zeros(len);
                        e[i] = unit;
                        let dw = &e * w.adjoint() + w * e.adjoint();
                        let ds = if on_a { kron(&dw, &y) } else { kron(&x, &dw) };
                        hermitian_coords(&ds, &mut buf);
                        jac.column_mut(col).copy_from_slice(&buf);
                        col += 1;
                    }
                }
            }
        }
        jac
    }

    fn step(&self, delta: &DVector<f64>) -> Model {
        let (m, n) = self.dims;
        let mut out = Model { dims: self.dims, fixed: self.fixed.clone(), us: Vec::new(), vs: Vec::new() };
        let mut col = 0;
        for (u, v) in self.us.iter().zip(&self.vs) {
            let mut nu = u.clone();
            let mut nv = v.clone();
            for (len, w) in [(m, &mut nu), (n, &mut nv)] {
                for i in 0..len {
                    w[i] += C64::new(delta[col + i], delta[col + len + i]);
                }
                col += 2 * len;
            }
            out.us.push(nu);
            out.vs.push(nv);
        }
        out
    }
}

/// Refines the heaviest atoms of `it` toward an exact decomposition of
/// `rho`. The iterate is replaced only if the objective decreases.
pub(crate) fn polish(rho: &CMatrix, it: &mut Iterate, target: f64) {
    let (m, n) = (it.atoms[0].a.len(), it.atoms[0].b.len());
    let d = m * n;
    let mut order: Vec<usize> = (0..it.atoms.len()).collect();
    order.sort_by(|&i, &j| it.weights[j].partial_cmp(&it.weights[i]).unwrap_or(std::cmp::Ordering::Equal));
    let free: Vec<usize> = order.iter().copied().take(MAX_FREE_ATOMS).collect();
    let mut fixed = CMatrix::zeros(d, d);
    for &k in order.iter().skip(MAX_FREE_ATOMS) {
        fixed += &it.atoms[k].proj * C64::new(it.weights[k], 0.0);
    }
    let mut model = Model {
        dims: (m, n),
        fixed,
        us: free.iter().map(|&k| &it.atoms[k].a * C64::new(it.weights[k].sqrt(), 0.0)).collect(),
        vs: free.iter().map(|&k| it.atoms[k].b.clone()).collect(),
    };
    let before = frobenius(&(rho - &it.sigma));
    let rows = d * d;
    let mut resid = vec![0.0; rows];
    let mut cost = frobenius(&(rho - model.value()));
    let mut mu = 1e-3;
    for _ in 0..MAX_STEPS {
        if cost <= target {
            break;
        }
        let jac = model.jacobian();
        hermitian_coords(&(rho - model.value()), &mut resid);
        let r = DVector::from_column_slice(&resid);
        let jjt = &jac * jac.transpose();
        let mut accepted = false;
        while mu < 1e12 {
            let lhs = &jjt + DMatrix::identity(rows, rows) * mu;
            let Some(ch) = Cholesky::new(lhs) else {
                mu *= 10.0;
                continue;
            };
            let delta = jac.transpose() * ch.solve(&r);
            let trial = model.step(&delta);
            let c = frobenius(&(rho - trial.value()));
            if c < cost {
                model = trial;
                cost = c;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }

    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for &k in order.iter().skip(MAX_FREE_ATOMS) {
        atoms.push(it.atoms[k].clone());
        weights.push(it.weights[k]);
    }
    for (u, v) in model.us.iter().zip(&model.vs) {
        let w = u.norm_squared() * v.norm_squared();
        if w > 1e-300 {
            atoms.push(Atom::new(u.clone(), v.clone()));
            weights.push(w);
        }
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut cand = Iterate { atoms, weights, sigma: it.sigma.clone() };
    cand.rebuild();
    cand.reweight(rho, 300);
    if frobenius(&(rho - &cand.sigma)) < before {
        *it = cand;
    }
}
