//! Exact tropical classification of KP-II line soliton evolutions.
//!
//! Phases `θ_k = Σ p_kʳ t⁽ʳ⁾ + c_k` are compared exactly over the
//! rationals. Coincidence events are found level by level, pruned for
//! visibility, and assembled into maximal chains of Tamari lattices.

pub mod combinatorics;
pub mod critical;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod general;
pub mod linalg;
pub mod model;
pub mod render;
pub mod testkit;
pub mod visibility;

pub use critical::{CriticalPoint, CriticalValue, LevelCriticalValue, Side};
pub use error::{Error, Result};
pub use exact::{IndexSet, Rational};
pub use model::{SolitonConfig, SpacetimePoint};
