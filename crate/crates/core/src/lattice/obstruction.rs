//! Lattice-theoretic obstructions: to projective equivalence, to
//! low-degree Cremona maps, and the Noether–Fano inequality chains.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use super::certificate::{rational_json, Certificate, HODGE_AXIOM, TORELLI_AXIOM};
use super::{disc_action, discriminant_group, isometries_mapping, GramMatrix, LatticeError};

/// Gram matrices whose surfaces are known to satisfy `g*σ_S = ±σ_S` for the
/// automorphisms in question (the very general member with this lattice), so
/// that the `±id` test on the discriminant group is unconditional. Everywhere
/// else the test is recorded as an axiom.
fn hodge_condition_established(a: &GramMatrix) -> bool {
    *a == GramMatrix::binary(4, 6, 4)
}

fn show(g: &[Vec<i64>]) -> String {
    serde_json::to_string(g).expect("matrix serializes")
}

/// Certifies that no automorphism `f` has `f* u = v` on `NS = A`.
///
/// Every candidate isometry `G` with `G u = v` must be ruled out. An automorphism
/// acts on the discriminant group as `±id`; where that rests on Hodge theory the
/// exclusion names [`HODGE_AXIOM`], and finite-order candidates (other than the
/// identity) are excluded through [`TORELLI_AXIOM`]. A candidate that cannot be
/// excluded becomes a witness and the verdict is FAIL.
pub fn projective_obstruction(a: &GramMatrix, u: &[i64], v: &[i64]) -> Result<Certificate, LatticeError> {
    projective_obstruction_with_bound(a, u, v, a.max_abs_entry().max(1))
}

pub fn projective_obstruction_with_bound(
    a: &GramMatrix,
    u: &[i64],
    v: &[i64],
    entry_bound: i64,
) -> Result<Certificate, LatticeError> {
    if u.len() != a.rank() || v.len() != a.rank() {
        return Err(LatticeError::Shape(format!("vectors must have {} coordinates", a.rank())));
    }
    let group = discriminant_group(a)?;
    let candidates = isometries_mapping(a, u, v, entry_bound);
    let established = hodge_condition_established(a);
    let mut cert = Certificate::builder(Some(a.clone()));
    cert.data("u", json!(u))
        .data("v", json!(v))
        .data("discriminant_group", json!(group.invariant_factors))
        .data("candidates", serde_json::to_value(&candidates).expect("matrices serialize"));
    let method = if a.rank() == 2 && u.iter().any(|&c| c != 0) {
        "exact rank-2 solution, complete"
    } else {
        "bounded search"
    };
    cert.step(
        format!("isometries G of {} with G·{u:?} = {v:?}", show(a.entries())),
        format!("{} candidate(s); {method}; entry bound {entry_bound}", candidates.len()),
        true,
    );
    if established {
        cert.note("g*σ_S = ±σ_S is established for this lattice; the ±id test needs no axiom");
    }
    for g in &candidates {
        let act = disc_action(&group, g)?;
        let name = show(g.rows());
        let images = serde_json::to_string(&act.matrix).expect("serializes");
        let reason = if established {
            (!act.is_plus_minus_id).then(|| format!("action {images} on NS*/NS is not ±id"))
        } else if !g.is_identity() && g.finite_order().is_some() {
            cert.axiom(HODGE_AXIOM).axiom(TORELLI_AXIOM);
            Some(format!(
                "finite order {}; excluded by Torelli-axiom (action {images}, ±id: {})",
                g.finite_order().expect("finite"),
                act.is_plus_minus_id
            ))
        } else if !act.is_plus_minus_id {
            cert.axiom(HODGE_AXIOM);
            Some(format!("action {images} on NS*/NS is not ±id; excluded by Hodge-axiom"))
        } else {
            None
        };
        match reason {
            Some(r) => {
                cert.step(format!("G = {name} is not induced by an automorphism"), r, true);
            }
            None => {
                cert.step(
                    format!("G = {name} is not induced by an automorphism"),
                    format!("action {images} is ±id; nothing excludes it"),
                    false,
                );
                cert.witness(serde_json::to_value(g).expect("serializes"));
            }
        }
    }
    Ok(cert.finish())
}

/// Lowest `l` the obstruction argument is stated for.
pub const DEFAULT_MIN_ELL: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CremonaWitness {
    pub s: i64,
    pub e: i64,
    /// `s^2 - 4e`.
    pub value: i64,
}

/// All `(s, e)` with `0 < s < 16`, `e >= 0` even and `s^2 - 4e` a positive multiple of `m`,
/// in ascending order.
pub fn cremona_scan(m: i64) -> Vec<CremonaWitness> {
    let mut out = Vec::new();
    for s in 1..16i64 {
        let mut e = 0;
        while s * s - 4 * e > 0 {
            let value = s * s - 4 * e;
            if value % m == 0 {
                out.push(CremonaWitness { s, e, value });
            }
            e += 2;
        }
    }
    out
}

/// Checks that `NS(S) = [[4, 4l], [4l, 4]]` leaves no room for a class of degree
/// `s < 16` independent of `h1` and `h2`.
///
/// A class `C` with `(C, h1) = s` and `C^2 = e` spans with `h1` a lattice of
/// determinant `4e - s^2`. Were it independent of `h1`, this sublattice of
/// `NS(S)` would make `s^2 - 4e` a positive multiple of `16l^2 - 16`. PASS means
/// the finite window has no such pair, so every low-degree curve class depends
/// on `h1, h2`. On FAIL the witness with the largest `s`, then the largest `e`,
/// is reported first.
pub fn cremona_obstruction_check(l: i64) -> Result<Certificate, LatticeError> {
    if l < 2 {
        return Err(LatticeError::InvalidArgument(format!("l = {l} must be at least 2")));
    }
    let gram = GramMatrix::ell_family(l);
    let m = 16 * l * l - 16;
    let found = cremona_scan(m);
    let mut cert = Certificate::builder(Some(gram.clone()));
    cert.data("l", json!(l)).data("det_abs", json!(gram.det().abs())).data("modulus", json!(m));
    cert.step(
        format!("|det NS| = 16l^2 - 16 = {m}"),
        format!("det {} = {}", show(gram.entries()), gram.det()),
        gram.det().abs() == m,
    );
    cert.step(
        "scanned 0 < s < 16, e >= 0 even, s^2 - 4e > 0",
        format!("{} pair(s) with s^2 - 4e ≡ 0 mod {m}; max s^2 = 225", found.len()),
        true,
    );
    if let Some(best) = found.iter().max_by_key(|w| (w.s, w.e)) {
        cert.data("witness", serde_json::to_value(best).expect("serializes"));
        cert.witness(serde_json::to_value(best).expect("serializes"));
        for w in found.iter().filter(|w| *w != best) {
            cert.witness(serde_json::to_value(w).expect("serializes"));
        }
    } else if l < DEFAULT_MIN_ELL {
        cert.note(format!("PASS for l = {l} is below the default range l >= {DEFAULT_MIN_ELL}"));
    }
    Ok(cert.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NoetherFanoCase {
    #[serde(rename = "point")]
    Point,
    #[serde(rename = "curve-off-S")]
    CurveOffS,
    #[serde(rename = "curve-in-S")]
    CurveInS,
}

impl std::str::FromStr for NoetherFanoCase {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "point" => Ok(Self::Point),
            "curve-off-S" | "curve-off-s" => Ok(Self::CurveOffS),
            "curve-in-S" | "curve-in-s" => Ok(Self::CurveInS),
            _ => Err(LatticeError::InvalidArgument(format!("unknown case {s:?}"))),
        }
    }
}

/// Upper end of the admissible `ε`: `a d ε = 4 ε < 1`, and `a ε < 1` follows since `a <= 4`.
pub fn epsilon_max() -> BigRational {
    BigRational::new(1.into(), 4.into())
}

/// `f(ε) = c0 + c1 ε` is positive on the open interval `(0, 1/4)`: both
/// endpoint values are nonnegative and not both zero.
fn affine_positive(c0: &BigRational, c1: &BigRational) -> bool {
    let end = c0 + c1 * epsilon_max();
    let zero = BigRational::zero();
    *c0 >= zero && end >= zero && !(c0.is_zero() && end.is_zero())
}

fn affine_string(c0: &BigRational, c1: &BigRational) -> String {
    format!("{c0} + ({c1})ε")
}

/// Discrepancy bookkeeping for `(P^3, (1 - ε) S)` against a linear system of
/// degree `d` with multiplicity `m`, where `a = 4 / d`.
///
/// Point and curve-off-S centres must have positive order on `0 < ε < 1/4`.
/// For a curve `F ⊂ S` the order is `ε (1 - a m)`; it is negative exactly when
/// `a m > 1`, and then `deg F <= (4 / (a m))^2 < 16`. A supplied `deg_f` is
/// checked against that bound.
pub fn noether_fano_check(d: u64, m: u64, case: NoetherFanoCase, deg_f: Option<u64>) -> Result<Certificate, LatticeError> {
    if d == 0 {
        return Err(LatticeError::InvalidArgument("degree d must be at least 1".into()));
    }
    if m > d {
        return Err(LatticeError::InvalidArgument(format!("multiplicity {m} exceeds degree {d}")));
    }
    let q = |n: u64| BigRational::from_integer(n.into());
    let a = BigRational::new(4.into(), d.into());
    let am = &a * q(m);
    let one = BigRational::one();
    let mut cert = Certificate::builder(None);
    cert.data("d", json!(d))
        .data("m", json!(m))
        .data("case", serde_json::to_value(case).expect("serializes"))
        .data("a", rational_json(&a))
        .data("am", rational_json(&am))
        .data("epsilon_range", json!(["0", "1/4"]));
    cert.step(
        "aε < 1 and adε = 4ε < 1 on 0 < ε < 1/4",
        format!("a = {a} <= 4, so aε <= 4ε < 1"),
        a <= q(4),
    );
    match case {
        NoetherFanoCase::Point => {
            // 2 - (1 - ε) - aε·m
            let (c0, c1) = (one.clone(), &one - &am);
            let ok = affine_positive(&c0, &c1);
            cert.data("order", json!(affine_string(&c0, &c1)));
            cert.step(
                "order 2 - (1 - ε) - aεm > 0",
                format!("{} at ε = 0 and {} at ε = 1/4", c0, &c0 + &c1 * epsilon_max()),
                ok,
            );
        }
        NoetherFanoCase::CurveOffS => {
            // 1 - aε·m
            let (c0, c1) = (one.clone(), -am.clone());
            let ok = affine_positive(&c0, &c1);
            cert.data("order", json!(affine_string(&c0, &c1)));
            cert.step(
                "order 1 - aεm > 0",
                format!("{} at ε = 0 and {} at ε = 1/4", c0, &c0 + &c1 * epsilon_max()),
                ok,
            );
        }
        NoetherFanoCase::CurveInS => {
            // 1 - (1 - ε) - aε·m = ε (1 - a m)
            let c1 = &one - &am;
            cert.data("order", json!(affine_string(&BigRational::zero(), &c1)));
            if am > one {
                let bound = {
                    let r = q(4) / &am;
                    &r * &r
                };
                cert.data("deg_bound", rational_json(&bound));
                cert.step("am > 1, so the order ε(1 - am) is negative", format!("am = {am}"), true);
                cert.step(format!("deg F <= (4/(am))^2 = {bound} < 16"), format!("4/(am) = {}", q(4) / &am), bound < q(16));
                if let Some(f) = deg_f {
                    cert.step(format!("deg F = {f} <= {bound}"), "supplied curve degree".to_string(), q(f) <= bound);
                }
            } else {
                cert.step("am <= 1: order ε(1 - am) >= 0", format!("am = {am}"), true);
                cert.note("no negative order; this case cannot occur");
            }
        }
    }
    Ok(cert.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Verdict;
    use serde_json::Value;

    #[test]
    fn projective_obstruction_cases() {
        let c = projective_obstruction(&GramMatrix::binary(4, 6, 4), &[1, 0], &[0, 1]).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.axioms.is_empty());
        assert_eq!(c.data["candidates"].as_array().unwrap().len(), 2);

        for l in 5..=10 {
            let c = projective_obstruction(&GramMatrix::ell_family(l), &[1, 0], &[0, 1]).unwrap();
            assert_eq!(c.verdict, Verdict::Conditional);
            assert_eq!(c.axioms, vec![HODGE_AXIOM.to_string(), TORELLI_AXIOM.to_string()]);
        }

        let c = projective_obstruction(&GramMatrix::ell_family(5), &[1, 0], &[1, 0]).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.witnesses.contains(&json!([[1, 0], [0, 1]])));
    }

    #[test]
    fn cremona_scan_matches_naive_loop() {
        for l in 2..=12i64 {
            let m = 16 * l * l - 16;
            let mut naive = Vec::new();
            for s in 1..16i64 {
                for e in (0..=s * s / 4).filter(|e| e % 2 == 0) {
                    let v = s * s - 4 * e;
                    if v > 0 && v % m == 0 {
                        naive.push((s, e));
                    }
                }
            }
            let scanned: Vec<_> = cremona_scan(m).iter().map(|w| (w.s, w.e)).collect();
            assert_eq!(scanned, naive);
            let c = cremona_obstruction_check(l).unwrap();
            assert_eq!(c.verdict == Verdict::Pass, naive.is_empty());
        }
    }

    #[test]
    fn cremona_witnesses() {
        let c = cremona_obstruction_check(2).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.data["witness"], json!({"s": 12, "e": 24, "value": 48}));
        let c = cremona_obstruction_check(3).unwrap();
        assert_eq!(c.data["witness"], json!({"s": 12, "e": 4, "value": 128}));
        let c = cremona_obstruction_check(4).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.notes.len(), 1);
        let c = cremona_obstruction_check(5).unwrap();
        assert_eq!(c.data["det_abs"], json!(384));
        assert!(c.notes.is_empty());
        assert!(cremona_obstruction_check(1).is_err());
    }

    #[test]
    fn noether_fano_examples() {
        let c = noether_fano_check(4, 2, NoetherFanoCase::CurveInS, Some(4)).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.data["deg_bound"], Value::String("4".into()));
        let c = noether_fano_check(4, 2, NoetherFanoCase::CurveInS, Some(5)).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        let c = noether_fano_check(8, 2, NoetherFanoCase::CurveInS, None).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(!c.data.contains_key("deg_bound"));
        assert_eq!(c.notes.len(), 1);
        assert_eq!(noether_fano_check(7, 7, NoetherFanoCase::Point, None).unwrap().verdict, Verdict::Pass);
        assert_eq!(noether_fano_check(7, 7, NoetherFanoCase::CurveOffS, None).unwrap().verdict, Verdict::Pass);
        assert!(noether_fano_check(3, 4, NoetherFanoCase::Point, None).is_err());
        assert!(noether_fano_check(0, 0, NoetherFanoCase::Point, None).is_err());
    }

    #[test]
    fn affine_positivity() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert!(affine_positive(&r(0, 1), &r(1, 1)));
        assert!(affine_positive(&r(1, 1), &r(-4, 1)));
        assert!(!affine_positive(&r(1, 1), &r(-5, 1)));
        assert!(!affine_positive(&r(0, 1), &r(0, 1)));
    }
}
