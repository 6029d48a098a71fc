//! Exact finite metric spaces, sup-metric products, and certificates
//! that product isometries split into a factor permutation plus
//! per-factor isometries.
//!
//! Everything is exact: distances are rationals, searches are exhaustive
//! with explicit budgets, and every certificate or refusal carries a
//! witness that can be re-checked independently.

pub mod book;
pub mod cli;
pub mod decompose;
pub mod io;
pub mod isometry;
pub mod metric;
pub mod product;
pub mod quad;
pub mod rat;
pub mod verify;

pub use decompose::{
    decompose, enumerate_reducible_isometries, factorize, Decomposition, ReducibilityCertificate,
};
pub use isometry::{enumerate_isometries, Isometry, SearchConfig, Space};
pub use metric::{GeodesicChain, MetricSpace};
pub use product::{ProductPoint, ProductSpace, Slice, SliceClass};
pub use quad::{embed_quad, max_quad_dimension, QuadEmbedding, QuadGraph};
pub use rat::Rat;
