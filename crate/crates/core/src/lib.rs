//! Numerical toolkit for Lagrangian self-shrinkers in `C^n`.
//!
//! Charts are evaluated in truncated Taylor arithmetic so that every
//! derivative entering the geometry is exact. On top of that sit the
//! Gaussian-weighted measure, a Galerkin solver for the drifted Laplacian
//! `𝓛 = Δ - ½<x, ∇·>`, and the second variation of the F-functional with
//! its Hamiltonian and Lagrangian stability verdicts.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measure;
pub mod potential;
pub mod quadrature;
pub mod spectral;
pub mod taylor;
pub mod tolerances;
pub mod variations;

pub use error::{Error, Result};
