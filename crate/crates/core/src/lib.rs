//! Numerical laboratory for modular twisted spectral triples on crossed
//! products G ⋉ A: the sampled convolution algebra, the extended Dirac /
//! modular operators, cocycle checks, and the closed-form vs quadrature
//! trace machinery for the affine, integer and dilation models.

pub mod algebra;
pub mod cli;
pub mod cocycle;
pub mod config;
pub mod error;
pub mod grid;
pub mod group;
pub mod hilbert;
pub mod quad;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
