//! Exact-arithmetic lattice toolkit.
//!
//! The crate builds and verifies even unimodular lattices with exact rational
//! arithmetic: a short-vector / coset enumeration kernel, Hermitian lattices
//! over Z[a] with a^2 = a - 2 (the ring of integers of discriminant -7),
//! quadratic spaces over GF(2) with polarizations, a tensor-product and
//! Construction-I build of a 72-dimensional extremal lattice, and the
//! counting machinery that certifies its minimum.

pub mod error;
pub mod linalg;
pub mod lattice;
pub mod reduce;
pub mod enumerate;
pub mod golay;
pub mod catalog;
pub mod zalpha;
pub mod hermitian;
pub mod f2;
pub mod structure;
pub mod polarization;
pub mod census;

pub use error::{Error, Result};
