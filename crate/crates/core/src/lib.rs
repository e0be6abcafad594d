//! Spectrum topology on finitely encoded stable Krull-Schmidt categories.

mod error;
pub mod catdatum;
pub mod functors;
pub mod linalg;
pub mod packs;
pub mod topology;
pub mod tower;

pub use error::{Error, Result};
