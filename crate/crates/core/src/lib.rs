//! Stability of rank-1 torsion-free sheaf classes on nodal curves.
//!
//! A nodal curve is described by its dual graph ([`curve::DualGraph`]), a
//! torsion-free rank-1 sheaf by its numerical class ([`sheaf::CombSheaf`]).
//! On top of that the crate decides the stability predicates for a
//! polarization, computes Jordan–Hölder data, runs semistable and
//! quasistable reduction as chip-firing on multidegrees, and enumerates
//! stability classes.

pub mod curve;
pub mod enumeration;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod jordan_holder;
mod lp;
pub mod reduction;
pub mod sheaf;
pub mod stability;

pub use curve::{DualGraph, EdgeSet, MinCut, Subcurve};
pub use error::{Error, Result};
pub use sheaf::CombSheaf;
pub use stability::{Polarization, Predicate, StabilityReport};

/// Exact rational used for slopes and beta values.
pub type Rational = num_rational::Ratio<i64>;
