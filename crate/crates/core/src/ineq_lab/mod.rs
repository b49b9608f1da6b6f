//! Measurement of both sides of the inequalities on generated instances.

pub mod families;
pub mod frozen;
pub mod interp;
pub mod large_radii;
pub mod model;
pub mod report;
pub mod shells;

pub use families::{Coefficients, StressFamily};
pub use frozen::{apply_frozen, gram_decay_report, single_shell_power, support_report};
pub use interp::{check_dyadic_interpolation, geometric_stack, interpolation_constant, LevelFunctions};
pub use large_radii::{check_large_radii, default_epsilon, large_radii_sweep, radial_large_radii_instance};
pub use model::{check_model_lemma, model_critical_p, model_sweep, ModelFamily};
pub use report::{InequalityReport, SweepPoint};
pub use shells::{
    check_l2_density, check_lp_bound, check_main_inequality, l2_sweep, lp_bound_sweep, main_sweep, measured_density,
    ShellSweep,
};
