//! Exact workbench for finite null-preserving maps and dynamical systems.
//!
//! Everything is built on finite partition spaces ([`measure::Space`]) with
//! rational weights. The central operation is the essential image
//! [`images::essential_image`]; the other modules use it to decide
//! invariance, nonsingularity, conservativity, ergodicity, tail structure
//! and exactness, and [`oracle`] re-derives the same answers by brute force.

pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod images;
pub mod laws;
pub mod markov;
pub mod measure;
pub mod oracle;
pub mod orbit;
pub mod random;
pub mod tail;

pub use dynamics::{Classification, DynSystem, InvarianceKind, Modulus};
pub use error::{Error, Result};
pub use images::{essential_image, transfer_density, Density, ImageReport};
pub use markov::{CylinderSystem, MarkovModel};
pub use measure::{rat, AeRelation, MSet, MeasurableMap, Rat, Space};
pub use orbit::Orbit;
pub use tail::{Corridor, ExactnessReport, TailAlgebra};
