//! Exact arithmetic: coefficient domains, sparse polynomials in
//! `x1..x4, y1..y4`, polynomial matrices, exact division and gcd.

mod gcd;
mod identity;
mod matrix;
mod monomial;
mod mpoly;
mod ops;
mod scalar;
mod text;

pub use gcd::{gcd, gcd_all};
pub use identity::{identity_test, IdentityEvidence, LARGE_PRIME, MIN_SAMPLES};
pub use matrix::PolyMatrix;
pub use monomial::{Block, Monomial, Var, NVARS};
pub use mpoly::MPoly;
pub use ops::{block_monomial, compose, divides, gradient};
pub use scalar::{is_prime, parse_rational, Domain, Scalar, MAX_PRIME};

pub(crate) use scalar::mod_inv;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operands belong to different coefficient domains")]
    DomainMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported maximum {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("{0} is not invertible in this domain")]
    NotInvertible(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("gcd of the zero polynomial is undefined")]
    ZeroInput,
    #[error("map components must be homogeneous of one common degree")]
    UnequalMapDegrees,
    #[error("polynomial involves variables outside the substituted block")]
    WrongBlock,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
