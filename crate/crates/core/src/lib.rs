//! Exact tools for three-term-progression-free sets in `Z_4^n`: group
//! arithmetic, multilinear polynomials over prime fields, the rank
//! certificate behind the polynomial method, rich-coset analysis, entropy
//! bounds and exhaustive searches.

pub mod bounds;
pub mod cosets;
pub mod epsilon;
pub mod error;
pub mod field;
pub mod group;
pub mod lemma;
pub mod linalg;
pub mod poly;
pub mod precision;
pub mod report;
pub mod search;
pub mod setfile;
pub mod verify;

pub use epsilon::Epsilon;
pub use error::{Error, Result};
pub use group::{GroupVector, PointSet};
