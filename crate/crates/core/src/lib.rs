//! Real and complex entanglement witnesses on bipartite systems.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: dense Hermitian eigensolver, real/imaginary split,
//!   orthogonal·diagonal·orthogonal factorization of unitaries, polar and
//!   Schmidt decompositions, inertia.
//! - [`bipartite`]: operators tagged with local dimensions, partial
//!   transpose and trace, local conjugation, density matrices.
//! - [`states`]: the concrete state and witness families.
//! - [`witness`]: detection, witness families and local projections.
//! - [`separability`]: see-saw product oracle, Frank-Wolfe projection onto
//!   the separable set and real-witness detectability.
//! - [`orbit`]: local-unitary orbit search and the detection flowchart.
//!
//! Randomized routines take an explicit `u64` seed and are reproducible.

pub mod bipartite;
pub mod error;
pub mod linalg;
pub mod orbit;
pub mod random;
pub mod separability;
pub mod states;
pub mod witness;

pub use bipartite::{BipartiteOperator, DensityMatrix, PptVerdict, Side};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Hermitian, RMatrix, C64};
pub use orbit::{FlowchartOptions, FlowchartVerdict, LocalUnitary, OrbitOptions, PrsEvidence};
pub use separability::{GilbertOptions, ProductEnsemble, RewVerdict, SeparabilityVerdict};
pub use witness::{Provenance, Witness};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
