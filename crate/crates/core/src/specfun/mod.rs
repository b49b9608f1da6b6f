//! Dimension-parametric radial Fourier analysis.

pub mod bessel;
pub mod exponents;
pub mod hankel;
pub mod norms;
pub mod profile;
pub mod quad;

pub use bessel::{ball_volume, bd_kernel, sphere_area, BdKernel};
pub use hankel::{hankel_fn, hankel_forward, hankel_inverse, HankelOptions, Transformed};
pub use norms::{lorentz_norm, lp_norm_radial, LorentzExponents};
pub use profile::{linspace, RadialProfile, UniformTable};
pub use quad::Rule;
