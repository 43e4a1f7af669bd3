//! Deciding whether a binary form `q(x, y) = a x^2 + 2 b x y + c y^2` takes a value.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::quadirr::isqrt;
use super::{GramMatrix, LatticeError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoReason {
    /// Every value is a multiple of `modulus`, and `n` is not.
    Congruence { modulus: i64 },
    /// `n = 0` needs an isotropic vector, which exists iff `b^2 - ac` is a square.
    NonSquareDiscriminant { discriminant: i64 },
    /// A definite form only takes values of one sign.
    WrongSign,
    /// Every solution class has a representative with `|y| <= bound`, and none was found.
    Exhausted { bound: String },
    /// The form factors over `Z`; all factorizations of `a n` were tried.
    DivisorsExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Representation {
    Yes { witness: [i64; 2] },
    No(NoReason),
}

impl Representation {
    pub fn is_yes(&self) -> bool {
        matches!(self, Representation::Yes { .. })
    }
}

fn perfect_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Decides whether the rank-2 form takes the value `n` on a nonzero vector.
///
/// "No" answers carry their proof. For indefinite forms with non-square
/// discriminant `D = b^2 - ac`, `a q = X^2 - D y^2` with `X = a x + b y`, and a
/// Pell unit `t + u√D` with `t ≡ 1`, `u ≡ 0 (mod a)` acts on the solutions while
/// preserving `X ≡ b y (mod a)`; every orbit meets `|y| <= u √|a n| / √(2(t - 1))`.
/// Definite forms are bounded directly. When the bound needed for a proof
/// exceeds `search_bound`, an error is returned instead of a guess.
pub fn represents_decision(g: &GramMatrix, n: i64, search_bound: u64) -> Result<Representation, LatticeError> {
    if g.rank() != 2 {
        return Err(LatticeError::UnsupportedRank(g.rank()));
    }
    if !g.is_nondegenerate() {
        return Err(LatticeError::Degenerate);
    }
    let (a, b, c) = (g.get(0, 0), g.get(0, 1), g.get(1, 1));
    let m = a.gcd(&(2 * b)).gcd(&c);
    if n % m != 0 {
        return Ok(Representation::No(NoReason::Congruence { modulus: m }));
    }
    let disc = b * b - a * c;
    if n == 0 {
        return Ok(match perfect_sqrt(disc) {
            None => Representation::No(NoReason::NonSquareDiscriminant { discriminant: disc }),
            Some(r) => {
                let w = if a == 0 {
                    [1, 0]
                } else {
                    let (x, y) = (r - b, a);
                    let g = x.gcd(&y);
                    [x / g, y / g]
                };
                Representation::Yes { witness: w }
            }
        });
    }
    let q = |x: i64, y: i64| g.norm(&[x, y]);
    if disc < 0 {
        // a q = (a x + b y)^2 + |D| y^2, so a n > 0 and |D| y^2 <= a n.
        if a.signum() != n.signum() {
            return Ok(Representation::No(NoReason::WrongSign));
        }
        let ybound = ((a as i128 * n as i128) / (-disc) as i128).sqrt() as u64;
        if ybound > search_bound {
            return Err(LatticeError::BoundTooSmall { needed: ybound.to_string(), given: search_bound });
        }
        for y in 0..=ybound as i64 {
            for y in [y, -y] {
                // a x^2 + 2 b y x + (c y^2 - n) = 0
                let dd = b as i128 * b as i128 * (y as i128) * (y as i128) - a as i128 * (c as i128 * (y as i128) * (y as i128) - n as i128);
                if dd < 0 {
                    continue;
                }
                let r = dd.sqrt();
                if r * r != dd {
                    continue;
                }
                for s in [r, -r] {
                    let num = -(b as i128) * y as i128 + s;
                    if num % a as i128 == 0 {
                        let x = (num / a as i128) as i64;
                        if q(x, y) == n {
                            return Ok(Representation::Yes { witness: [x, y] });
                        }
                    }
                }
            }
        }
        return Ok(Representation::No(NoReason::Exhausted { bound: ybound.to_string() }));
    }
    if let Some(r) = perfect_sqrt(disc) {
        return Ok(split_form(a, b, c, r, n));
    }
    pell_search(a, b, disc, n, search_bound, q)
}

/// `q` factors as a product of two integral linear forms: try every divisor.
fn split_form(a: i64, b: i64, c: i64, r: i64, n: i64) -> Representation {
    let mut found: Vec<[i64; 2]> = Vec::new();
    if a == 0 {
        // y (2 b x + c y) = n
        for d in divisors(n) {
            for y in [d, -d] {
                let rest = n / y - c * y;
                if rest % (2 * b) == 0 {
                    found.push([rest / (2 * b), y]);
                }
            }
        }
    } else {
        // a q = (a x + (b - r) y)(a x + (b + r) y) = P Q
        let an = a * n;
        for d in divisors(an) {
            for p in [d, -d] {
                let qq = an / p;
                if (qq - p) % (2 * r) != 0 {
                    continue;
                }
                let y = (qq - p) / (2 * r);
                let ax = p - (b - r) * y;
                if ax % a == 0 {
                    found.push([ax / a, y]);
                }
            }
        }
    }
    found.sort_by_key(|w| (w[0].abs() + w[1].abs(), std::cmp::Reverse(w[0]), std::cmp::Reverse(w[1])));
    match found.first() {
        Some(&w) => Representation::Yes { witness: w },
        None => Representation::No(NoReason::DivisorsExhausted),
    }
}

/// Fundamental solution of `t^2 - D u^2 = 1` by the continued fraction of `√D`.
pub fn pell_fundamental(d: i64) -> (BigInt, BigInt) {
    let a0 = d.sqrt();
    assert!(a0 * a0 != d, "D must not be a square");
    let (mut m, mut den, mut ak) = (BigInt::zero(), BigInt::one(), BigInt::from(a0));
    let (mut h_prev, mut h) = (BigInt::one(), BigInt::from(a0));
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    let big_d = BigInt::from(d);
    let a0 = BigInt::from(a0);
    loop {
        if &h * &h - &big_d * &k * &k == BigInt::one() {
            return (h, k);
        }
        m = &den * &ak - &m;
        den = (&big_d - &m * &m) / &den;
        ak = (&a0 + &m) / &den;
        let h_next = &ak * &h + &h_prev;
        let k_next = &ak * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

/// Smallest power of the fundamental unit with `t ≡ 1`, `u ≡ 0 (mod a)`.
fn congruent_unit(d: i64, a: i64) -> (BigInt, BigInt) {
    let (t1, u1) = pell_fundamental(d);
    let md = BigInt::from(a.abs());
    let big_d = BigInt::from(d);
    let (mut t, mut u) = (t1.clone(), u1.clone());
    // Residues mod a decide the power; the exact values follow along.
    let (rt1, ru1) = (t1.mod_floor(&md), u1.mod_floor(&md));
    let (mut rt, mut ru) = (rt1.clone(), ru1.clone());
    loop {
        if (rt.clone() - BigInt::one()).mod_floor(&md).is_zero() && ru.is_zero() {
            return (t, u);
        }
        let nt = &t * &t1 + &big_d * &u * &u1;
        let nu = &t * &u1 + &u * &t1;
        let nrt = (&rt * &rt1 + &big_d * &ru * &ru1).mod_floor(&md);
        let nru = (&rt * &ru1 + &ru * &rt1).mod_floor(&md);
        (t, u, rt, ru) = (nt, nu, nrt, nru);
    }
}

fn pell_search(
    a: i64,
    b: i64,
    disc: i64,
    n: i64,
    search_bound: u64,
    q: impl Fn(i64, i64) -> i64,
) -> Result<Representation, LatticeError> {
    if a == 0 {
        unreachable!("a = 0 makes the discriminant a square");
    }
    let (t, u) = congruent_unit(disc, a);
    let big_n = BigInt::from(a as i128 * n as i128).abs();
    // |y| <= u √|N| / √(2(t - 1))
    let bound = isqrt(&(&u * &u * &big_n / (BigInt::from(2) * (&t - BigInt::one()))));
    let ybound = match bound.to_u64() {
        Some(y) if y <= search_bound => y,
        _ => return Err(LatticeError::BoundTooSmall { needed: bound.to_string(), given: search_bound }),
    };
    let an = a as i128 * n as i128;
    for y in 0..=ybound as i64 {
        for y in [y, -y] {
            let x2 = an + disc as i128 * y as i128 * y as i128;
            if x2 < 0 {
                continue;
            }
            let r = x2.sqrt();
            if r * r != x2 {
                continue;
            }
            for big_x in [r, -r] {
                let num = big_x - b as i128 * y as i128;
                if num % a as i128 == 0 {
                    let x = (num / a as i128) as i64;
                    if q(x, y) == n {
                        return Ok(Representation::Yes { witness: [x, y] });
                    }
                }
            }
        }
    }
    Ok(Representation::No(NoReason::Exhausted { bound: ybound.to_string() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive scan of a box, for cross-checking.
    fn box_scan(g: &GramMatrix, n: i64, r: i64) -> bool {
        (-r..=r).any(|x| (-r..=r).any(|y| (x, y) != (0, 0) && g.norm(&[x, y]) == n))
    }

    #[test]
    fn ell_family_avoids_zero_and_two() {
        let g = GramMatrix::ell_family(5);
        assert_eq!(
            represents_decision(&g, 0, 1000).unwrap(),
            Representation::No(NoReason::NonSquareDiscriminant { discriminant: 384 })
        );
        for n in [2, -2] {
            assert_eq!(represents_decision(&g, n, 1000).unwrap(), Representation::No(NoReason::Congruence { modulus: 4 }));
        }
    }

    #[test]
    fn witness_for_four() {
        let g = GramMatrix::binary(4, 6, 4);
        assert_eq!(represents_decision(&g, 4, 1000).unwrap(), Representation::Yes { witness: [1, 0] });
    }

    #[test]
    fn pell_units() {
        assert_eq!(pell_fundamental(2), (BigInt::from(3), BigInt::from(2)));
        assert_eq!(pell_fundamental(61), (BigInt::from(1766319049u64), BigInt::from(226153980u64)));
        let (t, u) = congruent_unit(20, 4);
        assert_eq!(&t * &t - BigInt::from(20) * &u * &u, BigInt::one());
        assert!((t - 1u32).mod_floor(&BigInt::from(4)).is_zero() && u.mod_floor(&BigInt::from(4)).is_zero());
    }

    #[test]
    fn agrees_with_box_scan() {
        let forms = [
            GramMatrix::binary(4, 6, 4),
            GramMatrix::binary(2, 1, -4),
            GramMatrix::binary(2, 3, 2),
            GramMatrix::binary(-2, 1, 6),
            GramMatrix::binary(2, 1, 2),
            GramMatrix::binary(0, 1, 2),
            GramMatrix::binary(2, 3, 4),
        ];
        for g in &forms {
            for n in -40..=40 {
                match represents_decision(g, n, 100_000).unwrap() {
                    Representation::Yes { witness } => {
                        assert_ne!(witness, [0, 0]);
                        assert_eq!(g.norm(&witness), n);
                    }
                    Representation::No(reason) => {
                        assert!(!box_scan(g, n, 60), "{g:?} represents {n} despite {reason:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn oversized_bound_is_an_error() {
        let g = GramMatrix::binary(2, 1, 2);
        assert!(matches!(represents_decision(&g, 2_000_000, 10), Err(LatticeError::BoundTooSmall { .. })));
        assert!(represents_decision(&GramMatrix::new(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap(), 2, 10).is_err());
    }
}
