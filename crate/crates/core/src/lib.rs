//! Weisfeiler-Leman refinement, coherent closures and separability of coherent
//! configurations whose fibers have at most 4 points.

pub mod acceptance;
pub mod census;
pub mod closure;
pub mod config;
pub mod error;
pub mod generators;
pub mod gf2;
pub mod irredundant;
pub mod matrix;
pub mod oracle;
pub mod reduction;
pub mod structure;

pub use config::{verify_coherence, CoherentConfiguration, PointMap, Rainbow, RelationMeta};
pub use error::{Error, Precondition, Result};
pub use matrix::{normalize_transpose, validate_colored_graph, ColoredSquareMatrix};
