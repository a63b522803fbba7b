//! Exact symbolic verification engine for invariant complex geometry on
//! nilpotent complex Lie algebras: holomorphic p-contact and s-symplectic
//! certificates, the sheaf kernels and their splitting, invariant Frölicher
//! spectral-sequence pages, a structure-theorem verifier, and the
//! unobstructedness recursion for essential horizontal deformations. All
//! arithmetic is exact (Gaussian rationals, optionally lifted to
//! polynomials); every report is reproducible byte for byte.

pub mod algebra;
pub mod cohomology;
pub mod deformation;
pub mod dsl;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod linalg;
pub mod maps;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod structure;
pub mod suites;

pub use algebra::AlgebraSpec;
pub use error::CoreError;
pub use exterior::{Form, VectorField, VectorForm};
pub use scalar::GaussRat;
