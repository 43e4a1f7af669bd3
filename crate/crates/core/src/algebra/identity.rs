//! Probabilistic polynomial identity testing by random evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_core::RngCore;

use super::mpoly::MPoly;
use super::scalar::{Domain, Scalar};
use super::AlgebraError;

/// Prime used when checking rational identities by reduction (`2^31 - 1`).
pub const LARGE_PRIME: u64 = 2_147_483_647;

/// Minimum number of evaluation points accepted by [`identity_test`].
pub const MIN_SAMPLES: usize = 64;

/// Outcome of evaluating `f - g` at random points of `F^8`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityEvidence {
    /// Size of the field the points were drawn from.
    pub field: u64,
    pub samples: usize,
    /// Total degree of `f - g` (0 when it is identically zero).
    pub degree: u32,
    /// True when `f` and `g` agreed at every sampled point.
    pub agreed: bool,
    /// Upper bound on the probability that `agreed` is true while `f != g`:
    /// `(degree / field)^samples`, or zero once a disagreement was seen.
    pub failure_bound: BigRational,
}

/// Evaluates `f` and `g` at `samples` random points. Rational inputs are
/// reduced modulo [`LARGE_PRIME`]; prime-field inputs use their own field.
pub fn identity_test(
    f: &MPoly,
    g: &MPoly,
    samples: usize,
    rng: &mut impl RngCore,
) -> Result<IdentityEvidence, AlgebraError> {
    if f.domain() != g.domain() {
        return Err(AlgebraError::DomainMismatch);
    }
    let samples = samples.max(MIN_SAMPLES);
    let diff = f - g;
    let degree = diff.total_degree().unwrap_or(0);
    let field = match f.domain() {
        Domain::Rational => Domain::PrimeField(LARGE_PRIME),
        d => d,
    };
    let diff = diff.to_domain(field)?;
    let p = field.characteristic();
    let mut agreed = true;
    for _ in 0..samples {
        let point: Vec<Scalar> = (0..8).map(|_| Scalar::Residue(rng.next_u64() % p)).collect();
        if !field.is_zero(&diff.eval(&point)?) {
            agreed = false;
            break;
        }
    }
    let failure_bound = if agreed {
        let ratio = BigRational::new(BigInt::from(degree), BigInt::from(p));
        num_traits::pow(ratio, samples)
    } else {
        BigRational::from_integer(0.into())
    };
    Ok(IdentityEvidence { field: p, samples, degree, agreed, failure_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand_core::SeedableRng;
    use rand_xoshiro::SplitMix64;

    #[test]
    fn detects_equal_and_unequal_polynomials() {
        let q = Domain::Rational;
        let a = MPoly::parse(q, "x1^2 - y1^2").unwrap();
        let b = &MPoly::parse(q, "x1 + y1").unwrap() * &MPoly::parse(q, "x1 - y1").unwrap();
        let mut rng = SplitMix64::seed_from_u64(7);
        let ev = identity_test(&a, &b, 64, &mut rng).unwrap();
        assert!(ev.agreed);
        assert_eq!(ev.degree, 0);
        assert!(ev.failure_bound.is_zero());

        let c = MPoly::parse(q, "x1^2 - y1^2 + 1/3*x2*x3").unwrap();
        let ev = identity_test(&a, &c, 64, &mut rng).unwrap();
        assert!(!ev.agreed);
        assert_eq!(ev.field, LARGE_PRIME);
    }

    #[test]
    fn bound_shrinks_with_samples() {
        let f101 = Domain::prime_field(101).unwrap();
        let a = MPoly::parse(f101, "x1^3").unwrap();
        let mut rng = SplitMix64::seed_from_u64(1);
        let ev = identity_test(&a, &a, 10, &mut rng).unwrap();
        assert_eq!(ev.samples, MIN_SAMPLES);
        assert!(ev.agreed);
    }
}
