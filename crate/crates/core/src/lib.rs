//! Numerical laboratory for radial Fourier multipliers.
//!
//! The crate is organised by subsystem:
//! - [`specfun`]: Bessel kernels, Hankel transforms, radial L^p and Lorentz norms;
//! - [`kernels`]: the bump ψ, spherical shell functions F_{y,r}, Gram products and synthesized fields;
//! - [`density`]: separated point families and their density decompositions;
//! - [`dyadic`]: grid Littlewood–Paley bands, maximal functions, Whitney cubes and atoms;
//! - [`ineq_lab`]: measurement of both sides of the inequalities on generated instances;
//! - [`multiplier`]: the dilation-sup and kernel criteria for radial multipliers;
//! - [`wave`]: half-wave propagation, averaging weights and local smoothing ratios.
//!
//! Fourier convention throughout: f̂(ξ) = ∫ f(x) e^{−2πi⟨x,ξ⟩} dx.

pub mod density;
pub mod dyadic;
pub mod error;
pub mod ineq_lab;
pub mod kernels;
pub mod multiplier;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod wave;

pub use error::{Result, RmlError};
pub use num_complex::Complex64 as C64;
