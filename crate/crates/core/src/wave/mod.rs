//! Half-wave propagation of radial data, the averaging representation of the band kernels
//! K_k and local smoothing ratios.

pub mod window;

pub use window::{theta_kernel, Theta, Window, WINDOW_BREAKS};
pub mod kernel;

pub use kernel::{
    check_decay_bound, tau_integral, wk_weights, DecayReport, GaussianWave, OscillatoryProfile, WaveBandKernel,
    WkProfiles, W_L1_BOUND,
};
pub mod propagate;

pub use propagate::{
    bessel_symbol, default_times, fixed_time_sobolev, halfwave, halfwave_band, local_smoothing_band,
    local_smoothing_ratio, local_smoothing_sweep, lp_multiplier, lp_projections, rescaling_chain, single_band,
    smoothing_sides, spectral_cutoff, BandLimited, SmoothingSides, Spectrum,
};
