//! JSON matrix files. Complex entries are stored as separate real and
//! imaginary arrays.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rewlab_core::linalg::{CMatrix, CVector, C64};
use rewlab_core::{BipartiteOperator, DensityMatrix, Hermitian, Provenance, Witness};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    State,
    Witness,
    Hermitian,
}

/// A general complex matrix as `{re, im}` row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let r = self.re.len();
        let c = self.re.first().map_or(0, Vec::len);
        if self.im.len() != r {
            bail!("re has {r} rows but im has {}", self.im.len());
        }
        for (k, (a, b)) in self.re.iter().zip(&self.im).enumerate() {
            if a.len() != c || b.len() != c {
                bail!("row {k} has inconsistent length");
            }
        }
        Ok(CMatrix::from_fn(r, c, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }

    pub fn from_vector(v: &CVector) -> Self {
        Self { re: vec![v.iter().map(|z| z.re).collect()], im: vec![v.iter().map(|z| z.im).collect()] }
    }

    pub fn to_vector(&self) -> Result<CVector> {
        let m = self.to_matrix()?;
        if m.nrows() != 1 {
            bail!("expected a single row, got {}", m.nrows());
        }
        Ok(CVector::from_iterator(m.ncols(), m.row(0).iter().copied()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: [usize; 2],
    pub kind: Kind,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_operator(op: &BipartiteOperator, kind: Kind) -> Self {
        let (m, n) = op.dims();
        let c = ComplexJson::from_matrix(op.matrix());
        Self { dims: [m, n], kind, re: c.re, im: c.im }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        let d = self.dims[0] * self.dims[1];
        if self.dims[0] == 0 || self.dims[1] == 0 {
            bail!("dims must be positive");
        }
        let m = ComplexJson { re: self.re.clone(), im: self.im.clone() }.to_matrix()?;
        if m.nrows() != d || m.ncols() != d {
            bail!("matrix is {}x{} but dims {}x{} need {d}x{d}", m.nrows(), m.ncols(), self.dims[0], self.dims[1]);
        }
        Ok(m)
    }

    /// Parses the operator, checking `re` symmetric and `im` skew-symmetric
    /// to `1e-12` of the largest entry.
    pub fn operator(&self) -> Result<BipartiteOperator> {
        let m = self.matrix()?;
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let skew = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > 1e-12 * scale {
            bail!("matrix is not Hermitian (deviation {skew:e})");
        }
        let h = Hermitian::new(m)?;
        Ok(BipartiteOperator::new((self.dims[0], self.dims[1]), h)?)
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        if self.kind != Kind::State {
            bail!("expected a state file, got kind {:?}", self.kind);
        }
        Ok(DensityMatrix::new(self.operator()?)?)
    }

    pub fn witness(&self) -> Result<Witness> {
        if self.kind != Kind::Witness {
            bail!("expected a witness file, got kind {:?}", self.kind);
        }
        Ok(Witness::new(self.operator()?, Provenance::User)?)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
