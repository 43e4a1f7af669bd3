//! Exact toolkit for determinantal quartic K3 surface pairs.
//!
//! A 4x4x4 tensor `a_ijk` defines two 4x4 matrices of linear forms `M(x)` and
//! `N(y)` with `M(x) y^t = N(y) x^t`. Their determinants cut out quartic
//! surfaces `S1 ⊂ P^3_x` and `S2 ⊂ P^3_y`, and the first three rows of `M`
//! define a cubo-cubic Cremona map `τ` of `P^3` carrying `S1` onto `S2`.
//! The crate builds all of this symbolically, verifies it over finite fields,
//! and checks the Néron–Severi lattice arguments that separate "isomorphic",
//! "Cremona isomorphic" and "projectively equivalent".
//!
//! Modules:
//! - [`algebra`]: rationals, prime fields, sparse polynomials, determinants, gcd.
//! - [`lattice`]: integer quadratic forms, discriminant groups, obstruction certificates.
//! - [`determinantal`]: tensors, `M(x)`, `N(y)`, quartics and bilinear forms.
//! - [`cremona`]: the map `τ`, its inverse, pushforward checks, intersection numbers.
//! - [`verify_fp`]: point enumeration over `F_p`, smoothness, rank profiles, bijection.
//! - [`cli`]: run configurations and the JSON report.

pub mod algebra;
pub mod cli;
pub mod cremona;
pub mod determinantal;
pub mod lattice;
pub mod rng;
pub mod verify_fp;

pub use algebra::{Block, Domain, MPoly, PolyMatrix, Scalar, Var};
