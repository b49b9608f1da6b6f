//! Point families and their density decompositions.

pub mod decompose;
pub mod family;
pub mod support;

pub use decompose::{
    density_decompose, density_type_check, exhaustive_levels, verify_stratification, vitali_select, Ball,
    DensityCheck, DensityStratification, InvariantWitness, Stratum, KAPPA,
};
pub use family::{shell_index, Member, PointFamily};
pub use support::{annulus_volume, support_measure, SupportMeasure};
