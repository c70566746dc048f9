//! Exact computations in module categories over finite-dimensional DG-algebras.
//!
//! The ground category is Ch(k) for an exact field k (Q or F_p): finitely
//! supported Z-graded spaces with a degree -1 differential and the Koszul-signed
//! tensor/hom structure. On top of that the crate builds DG-algebras by structure
//! constants, their left/right/bi-modules, tensor-over-A as a coequalizer, internal
//! hom-over-A as an equalizer, duals, dualizability decisions with explicit
//! coevaluation witnesses, Ext^1 via projective presentations by identity cones,
//! battery-relative semi-flatness, finite directed colimits, and the ring-case
//! Lazard factorization of maps from finitely presented modules into flat targets.

pub mod field;
pub mod algebra;
pub mod duality;
pub mod ext;
pub mod graded;
pub mod instances;
pub mod json;
pub mod limits;
pub mod matrix;
pub mod module;
pub mod report;

pub use field::{Field, FieldError, Scalar};
pub use matrix::Matrix;
