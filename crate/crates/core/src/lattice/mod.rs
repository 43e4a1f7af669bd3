//! Integer quadratic forms: Smith normal form, discriminant groups, value
//! representation, positive-cone rays, isometries and obstruction certificates.

mod certificate;
mod gram;
mod isometry;
mod obstruction;
mod quadirr;
mod represent;

pub use certificate::{rational_json, Certificate, CertificateBuilder, Step, Verdict, HODGE_AXIOM, TORELLI_AXIOM};
pub use gram::{disc_action, discriminant_group, reduce_mod, smith_normal_form, DiscAction, DiscGroup, GramMatrix, Snf};
pub use isometry::{bounded_isometry_search, isometries_mapping, rank2_exact, IsometryMatrix};
pub use obstruction::{
    cremona_obstruction_check, cremona_scan, epsilon_max, noether_fano_check, projective_obstruction,
    projective_obstruction_with_bound, CremonaWitness, NoetherFanoCase, DEFAULT_MIN_ELL,
};
pub use quadirr::{boundary_rays, pair_quad, QuadIrr};
pub use represent::{pell_fundamental, represents_decision, NoReason, Representation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("rank {0} is not supported")]
    UnsupportedRank(usize),
    #[error("form is definite")]
    Definite,
    #[error("matrix is not an isometry of the lattice")]
    NotIsometry,
    #[error("vector is not in the dual lattice")]
    NotInDual,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("a proof needs search bound {needed}, but only {given} is allowed")]
    BoundTooSmall { needed: String, given: u64 },
}
