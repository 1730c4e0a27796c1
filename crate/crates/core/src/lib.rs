//! Time-like Weingarten surfaces in Minkowski 3-space: natural PDEs,
//! frame reconstruction, invariant checks, parallel families and the
//! classification of linear curvature relations.

pub mod classes;
pub mod classification;
pub mod diff;
pub mod error;
pub mod grid;
pub mod invariants;
pub mod io;
pub mod minkowski;
pub mod parallel;
pub mod pde;
pub mod pipeline;
pub mod reconstruction;

pub use error::{GeomError, Result};
