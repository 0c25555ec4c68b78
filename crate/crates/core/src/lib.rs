//! Spectra of linear harmonic oscillator chains whose nearest neighbour
//! couplings come from discrete orthogonal polynomials.

pub mod chain;
pub mod cli;
pub mod error;
pub mod jacobi;
pub mod polynomials;

pub use error::{Error, Result};
