//! Multivariate gcd over a field.
//!
//! Common monomial factors are split off first. A polynomial is then viewed
//! as univariate in a shared variable of least degree with coefficients in
//! the ring of the remaining variables. Contents are handled recursively and
//! primitive parts go through the subresultant remainder sequence, so every
//! intermediate division is exact. A univariate image over `F_q` settles
//! coprime pairs and pairs where one side divides the other without running
//! the sequence. Over `Q` the gcd is first sought from images modulo large
//! primes, since rational coefficients swell inside the sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, Var, NVARS};
use super::mpoly::MPoly;
use super::ops::{divides, exact_div};
use super::scalar::{is_prime, mod_inv, mod_pow, reduce_bigint, Domain, Scalar, MAX_PRIME};
use super::AlgebraError;

/// Greatest common divisor, normalized to leading coefficient one.
pub fn gcd(f: &MPoly, g: &MPoly) -> Result<MPoly, AlgebraError> {
    if f.domain() != g.domain() {
        return Err(AlgebraError::DomainMismatch);
    }
    if f.is_zero() || g.is_zero() {
        return Err(AlgebraError::ZeroInput);
    }
    Ok(gcd_rec(f, g))
}

/// Gcd of a nonempty list; zero entries are skipped.
pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a MPoly>) -> Result<MPoly, AlgebraError> {
    let mut acc: Option<MPoly> = None;
    for p in polys.into_iter().filter(|p| !p.is_zero()) {
        acc = Some(match acc {
            None => p.monic(),
            Some(a) => gcd(&a, p)?,
        });
        if acc.as_ref().is_some_and(MPoly::is_one) {
            break;
        }
    }
    acc.ok_or(AlgebraError::ZeroInput)
}

fn gcd_rec(f: &MPoly, g: &MPoly) -> MPoly {
    let d = f.domain();
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.is_constant() || g.is_constant() {
        return MPoly::one(d);
    }
    let (mf, f1) = split_monomial(f);
    let (mg, g1) = split_monomial(g);
    if mf != Monomial::ONE || mg != Monomial::ONE {
        let common = Monomial(std::array::from_fn(|i| mf.0[i].min(mg.0[i])));
        return gcd_rec(&f1, &g1).shift(&common);
    }
    let only = |a: &MPoly, b: &MPoly| var_list().find(|&v| a.degree_in(v) > 0 && b.degree_in(v) == 0);
    if let Some(v) = only(f, g) {
        return gcd_rec(&content(f, v), g);
    }
    if let Some(v) = only(g, f) {
        return gcd_rec(f, &content(g, v));
    }
    if d == Domain::Rational {
        if let Some(h) = modular_gcd(f, g) {
            return h;
        }
    }
    let v = var_list()
        .filter(|&v| f.degree_in(v) > 0)
        .min_by_key(|&v| f.degree_in(v).max(g.degree_in(v)))
        .expect("non-constant polynomials have a variable");
    let cf = content(f, v);
    let cg = content(g, v);
    let pf = exact_div(f, &cf);
    let pg = exact_div(g, &cg);
    let c = gcd_rec(&cf, &cg);
    let h = primitive_gcd(&pf, &pg, v);
    (&c * &h).monic()
}

fn var_list() -> impl Iterator<Item = Var> {
    (0..NVARS).map(Var::from_index)
}

/// Splits `f` into its largest monomial factor and the cofactor.
fn split_monomial(f: &MPoly) -> (Monomial, MPoly) {
    let mut low = [u16::MAX; NVARS];
    for (m, _) in f.terms() {
        for (l, e) in low.iter_mut().zip(m.0) {
            *l = (*l).min(e);
        }
    }
    if low == [0; NVARS] {
        return (Monomial::ONE, f.clone());
    }
    let terms = f.terms().map(|(m, c)| (Monomial(std::array::from_fn(|i| m.0[i] - low[i])), c.clone()));
    (Monomial(low), MPoly::from_terms(f.domain(), terms).expect("terms from a valid polynomial"))
}

/// Gcd of the coefficients of `f` viewed as a polynomial in `v`.
fn content(f: &MPoly, v: Var) -> MPoly {
    let mut acc = MPoly::zero(f.domain());
    for c in f.coefficients_in(v).iter().filter(|c| !c.is_zero()) {
        acc = gcd_rec(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

type Uni = Vec<MPoly>;

fn trim(u: &mut Uni) {
    while u.last().is_some_and(MPoly::is_zero) {
        u.pop();
    }
}

fn deg(u: &Uni) -> usize {
    u.len() - 1
}

fn lc(u: &Uni) -> &MPoly {
    u.last().expect("nonzero univariate polynomial")
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &Uni, b: &Uni) -> Uni {
    let n = deg(b);
    let lcb = lc(b).clone();
    let mut r = a.clone();
    let mut steps = deg(a) + 1 - n;
    while !r.is_empty() && deg(&r) >= n {
        let shift = deg(&r) - n;
        let lr = lc(&r).clone();
        for c in r.iter_mut() {
            *c = &*c * &lcb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &(&lr * bc);
        }
        trim(&mut r);
        steps -= 1;
    }
    if steps > 0 {
        let f = lcb.pow(steps as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Gcd of two polynomials that are primitive with respect to `v`.
fn primitive_gcd(f: &MPoly, g: &MPoly, v: Var) -> MPoly {
    let d = f.domain();
    if let Some(k) = image_gcd_degree(f, g, v) {
        if k == 0 {
            return MPoly::one(d);
        }
        for (a, b) in [(f, g), (g, f)] {
            if k == b.degree_in(v) as usize && divides(b, a).ok().flatten().is_some() {
                return b.monic();
            }
        }
    }
    let mut a: Uni = f.coefficients_in(v);
    let mut b: Uni = g.coefficients_in(v);
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g_s = MPoly::one(d);
    let mut h_s = MPoly::one(d);
    loop {
        let delta = deg(&a) - deg(&b);
        let r = prem(&a, &b);
        if r.is_empty() {
            break;
        }
        if deg(&r) == 0 {
            return MPoly::one(d);
        }
        a = b;
        let divisor = &g_s * &h_s.pow(delta as u32);
        b = r.iter().map(|c| exact_div(c, &divisor)).collect();
        g_s = lc(&a).clone();
        h_s = if delta == 0 {
            h_s
        } else {
            exact_div(&g_s.pow(delta as u32), &h_s.pow(delta as u32 - 1))
        };
    }
    let last = MPoly::from_coefficients_in(d, v, &b);
    exact_div(&last, &content(&last, v)).monic()
}

/// Primes tried by [`modular_gcd`] before it gives up.
const MODULAR_PRIMES: usize = 24;

/// Gcd over `Q` from images over large primes, combined by CRT and rational
/// reconstruction. A candidate dividing both inputs whose degree in every
/// variable reaches the bound from [`image_gcd_degree`] divides the true gcd
/// with no room left in any degree, hence equals it. `None` when no candidate
/// passes within [`MODULAR_PRIMES`] primes.
fn modular_gcd(f: &MPoly, g: &MPoly) -> Option<MPoly> {
    let bounds: Vec<u32> = var_list()
        .map(|v| match (f.degree_in(v), g.degree_in(v)) {
            (0, _) | (_, 0) => 0,
            (a, b) => image_gcd_degree(f, g, v).map_or(a.min(b), |k| k as u32),
        })
        .collect();
    let mut image: Option<(Vec<u32>, Vec<Monomial>, Vec<BigInt>)> = None;
    let mut modulus = BigInt::one();
    let mut q = MAX_PRIME;
    for _ in 0..MODULAR_PRIMES {
        q = (2..q).rev().find(|&n| is_prime(n)).expect("primes below 2^31");
        let fd = Domain::PrimeField(q);
        let (Ok(fq), Ok(gq)) = (f.to_domain(fd), g.to_domain(fd)) else { continue };
        if fq.is_zero() || gq.is_zero() {
            continue;
        }
        let h = gcd_rec(&fq, &gq);
        let degs: Vec<u32> = var_list().map(|v| h.degree_in(v)).collect();
        let support: Vec<Monomial> = h.terms().map(|(m, _)| *m).collect();
        let residues = h.terms().map(|(_, c)| match c {
            Scalar::Residue(r) => BigInt::from(*r),
            Scalar::Rational(_) => unreachable!("residue domain"),
        });
        match &mut image {
            Some((d, s, r)) if *d == degs && *s == support => {
                // x = a + M * ((b - a) / M mod q)
                let m_inv = mod_inv(reduce_bigint(&modulus, q), q).expect("distinct primes");
                for (a, b) in r.iter_mut().zip(residues) {
                    let diff = reduce_bigint(&(b - &*a), q);
                    *a += &modulus * BigInt::from(diff * m_inv % q);
                }
                modulus *= q;
            }
            Some((d, ..)) if degs.iter().sum::<u32>() >= d.iter().sum::<u32>() => continue,
            _ => {
                image = Some((degs, support, residues.collect()));
                modulus = BigInt::from(q);
            }
        }
        let (degs, support, r) = image.as_ref().expect("image set above");
        if degs.iter().zip(&bounds).any(|(d, b)| d < b) {
            continue;
        }
        let Some(coeffs) = r.iter().map(|a| rational_reconstruct(a, &modulus)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let cand = MPoly::from_terms(Domain::Rational, support.iter().copied().zip(coeffs.into_iter().map(Scalar::Rational)))
            .expect("rational coefficients");
        if divides(&cand, f).ok().flatten().is_some() && divides(&cand, g).ok().flatten().is_some() {
            return Some(cand.monic());
        }
    }
    None
}

/// `a/b` with `|a|, |b| <= sqrt(m/2)` and `a = b r mod m`, if one exists.
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let quo = &r0 / &r1;
        let r2 = &r0 - &quo * &r1;
        let t2 = &t0 - &quo * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Upper bound on `deg_v gcd(f, g)`.
///
/// The other variables are specialized to a point of `F_q` where neither
/// leading coefficient vanishes. The gcd then keeps its degree in `v` and
/// maps to a common divisor of the images, so the image gcd is at least as
/// large. `None` when no usable point turns up.
fn image_gcd_degree(f: &MPoly, g: &MPoly, v: Var) -> Option<usize> {
    let q = match f.domain() {
        Domain::Rational => MAX_PRIME,
        Domain::PrimeField(p) => p,
    };
    let fq = f.to_domain(Domain::PrimeField(q)).ok()?;
    let gq = g.to_domain(Domain::PrimeField(q)).ok()?;
    for attempt in 0..4u64 {
        let point: [u64; NVARS] = std::array::from_fn(|i| (attempt * 7919 + i as u64 * 104_729 + 12_345) % q);
        let a = specialize(&fq, v, &point, q);
        let b = specialize(&gq, v, &point, q);
        if a.len() == f.degree_in(v) as usize + 1 && b.len() == g.degree_in(v) as usize + 1 {
            return Some(uni_gcd_mod(a, b, q).len() - 1);
        }
    }
    None
}

/// Coefficients in `v` of `f` with every other variable set from `point`,
/// trailing zeros trimmed.
fn specialize(f: &MPoly, v: Var, point: &[u64; NVARS], q: u64) -> Vec<u64> {
    let mut out = vec![0u64; f.degree_in(v) as usize + 1];
    for (m, c) in f.terms() {
        let Scalar::Residue(mut t) = *c else { unreachable!("residue domain") };
        for (i, &e) in m.0.iter().enumerate() {
            if i != v.index() {
                t = t * mod_pow(point[i], e as u64, q) % q;
            }
        }
        let k = m.exponent(v) as usize;
        out[k] = (out[k] + t) % q;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Euclid over `F_q`; both inputs nonzero.
fn uni_gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> Vec<u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = mod_inv(*b.last().expect("nonzero"), q).expect("nonzero residue");
        while a.len() >= b.len() {
            let t = a.last().copied().expect("nonzero") * inv % q;
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + q - t * bc % q) % q;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Domain;

    fn p(s: &str) -> MPoly {
        MPoly::parse(Domain::Rational, s).unwrap()
    }

    #[test]
    fn shared_variable() {
        assert_eq!(gcd(&p("x1*x2"), &p("x1*x3")).unwrap(), p("x1"));
        assert_eq!(gcd(&p("x1^2 - x2^2"), &p("x1^2 + 2*x1*x2 + x2^2")).unwrap(), p("x1 + x2"));
        assert_eq!(gcd(&p("3*x1"), &p("6")).unwrap(), p("1"));
    }

    #[test]
    fn gcd_with_nontrivial_content() {
        let h = p("x2*y1 - x3^2 + 1");
        let f = &p("x1^2*x2 + x3") * &h;
        let g = &p("x1*x4 - y2") * &h;
        assert_eq!(gcd(&f, &g).unwrap(), h.monic());
    }

    #[test]
    fn zero_inputs_rejected() {
        assert!(matches!(gcd(&p("0"), &p("x1")), Err(AlgebraError::ZeroInput)));
        assert!(matches!(gcd_all([&p("0")]), Err(AlgebraError::ZeroInput)));
    }

    #[test]
    fn prime_field_gcd() {
        let f7 = Domain::prime_field(7).unwrap();
        let a = MPoly::parse(f7, "x1^7 - x1").unwrap();
        let b = MPoly::parse(f7, "x1^2 - 1").unwrap();
        assert_eq!(gcd(&a, &b).unwrap(), b);
    }
}
