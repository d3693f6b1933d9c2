//! Numerical toolkit for rank-preserving maps between spaces of hermitian
//! matrices: a Jacobi-based complex kernel, coordinates on `H_n`, the
//! geometry of pairs of subspaces, generators of rank-k projection
//! preservers and the engines that classify a given map.

pub mod constructions;
pub mod error;
pub mod grassmann;
pub mod herm_space;
pub mod linalg;
pub mod preserver;
pub mod sampling;
pub mod selftest;
pub mod tolerance;

pub use error::{Error, Result};
