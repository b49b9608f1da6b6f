//! The bump ψ, shell functions F_{y,r} = σ_r * ψ(· − y), their Gram products and
//! synthesized fields Σ c(y,r) F_{y,r}.

pub mod bump;
pub mod field;
pub mod gram;
pub mod shell;

pub use bump::{make_bump, Bump, BumpSpec};
pub use shell::{shell_profile, shell_profile_direct, ANNULUS_HALF_WIDTH};
pub use gram::{gram_entry, gram_matrix, supports_disjoint, Gram};
pub use field::{field_eval, field_l2, field_lp, LpEstimate, SynthField};
