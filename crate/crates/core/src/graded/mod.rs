//! Graded pieces of the module of tangent derivations, computed by modular
//! linear algebra and certified against rationally verified elements.

pub mod linalg;
pub mod search;
pub mod system;

pub use linalg::{nullspace, solve, BlockSolution, Echelon, ModularSolution};
pub use search::{
    arrangement_seed, graded_dimensions, lift_generators, minimal_generators, DegreeDims, DimReport, Generator,
    GeneratorSet, GradedSearch, LiftOutcome, LiftReport, SearchConfig,
};
pub use system::{euler_dimension, Block, TangencySystem};
