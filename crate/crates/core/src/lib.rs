pub mod algebra;
pub mod analyzer;
pub mod error;
pub mod files;
pub mod graded;
pub mod model;
pub mod saito;
pub mod survey;
