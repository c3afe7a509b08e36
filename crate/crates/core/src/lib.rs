//! Exact computations around the moduli space of stable rational curves and
//! its realization as a quotient of `(P^1)^n` by `PGL_2`.
//!
//! The crate covers stable trees and stabilization, cross-ratio signatures,
//! the multihomogeneous forms cutting out orbit closures, multigraded Hilbert
//! polynomials, Chow classes of orbit closures, the procyclic-operad
//! structures relating them, and brute-force oracles that check the formulas
//! independently.

pub mod chow;
pub mod configurations;
pub mod error;
pub mod exact_geometry;
pub mod hilbert;
pub mod json;
pub mod label;
pub mod operads;
pub mod oracles;
pub mod polynomials;
pub mod sampling;
pub mod trees;

pub use error::{Error, Result, Violation};
pub use exact_geometry::{Configuration, Mobius, ProjPoint, Rat};
pub use label::{Label, LabelSet};
