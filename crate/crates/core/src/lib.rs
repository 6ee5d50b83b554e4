//! Two-photon (Hong-Ou-Mandel) interference of single photons from
//! quantum-dot-like emitters.
//!
//! Times are in nanoseconds and angular frequencies in rad/ns throughout.

pub mod analysis;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};

/// Crate version, recorded in run provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
