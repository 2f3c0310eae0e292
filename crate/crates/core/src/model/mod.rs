//! Generic matrices of indeterminates, their maximal minors, arrangements and
//! derivations.

pub mod arrangement;
pub mod derivation;
pub mod paper;
pub mod shape;

pub use arrangement::Arrangement;
pub use derivation::{CofactorCertificate, Derivation, QDerivation, TangencyFailure};
pub use paper::{paper_basis, paper_basis_named, parse_basis_file, verify_paper_basis, NamedDerivation, PaperBasisId};
pub use shape::{column_permutations, minor, MatrixShape, MinorLabel};
