//! Radial Fourier multipliers on L^p: the dilation criterion with a fixed test function η,
//! kernel L^p and Lorentz criteria for compactly supported multipliers, and empirical
//! lower bounds for operator norms.

pub mod criterion;
pub mod family;
pub mod kernel;

pub use criterion::{
    criterion_kernel, criterion_norm, ScaleKernel, empirical_opnorm_lower, eta_profile, CriterionReport, CriterionRow,
    EmpiricalEntry, EmpiricalReport, SuiteSpec, TGrid,
};
pub use family::{eta_o_hat, Break, EtaChoice, MultiplierKind, MultiplierSpec, TestFunction, ETA_SUPPORT};
pub use kernel::{
    apply_radial, fit_tail, kernel_lp_criterion, kernel_lp_of, lorentz_criteria, lorentz_pair, multiplier_kernel,
    radial_lorentz, ApplyOptions, KernelLp, KernelOptions, LorentzReport, TailFit,
};
