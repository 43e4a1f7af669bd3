use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::monomial::{Block, Monomial, Var, NVARS};
use super::scalar::{Domain, Scalar};
use super::AlgebraError;

/// Sparse polynomial in `x1..x4, y1..y4` over a [`Domain`].
///
/// No zero coefficient is ever stored. Terms are kept in a `BTreeMap` keyed by
/// grevlex, so [`MPoly::terms`] yields them leading term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    domain: Domain,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MPoly {
    pub fn zero(domain: Domain) -> Self {
        MPoly { domain, terms: BTreeMap::new() }
    }

    pub fn one(domain: Domain) -> Self {
        Self::constant_unchecked(domain, domain.one())
    }

    pub fn from_i64(domain: Domain, n: i64) -> Self {
        Self::constant_unchecked(domain, domain.from_i64(n))
    }

    pub fn constant(domain: Domain, c: Scalar) -> Result<Self, AlgebraError> {
        if !domain.contains(&c) {
            return Err(AlgebraError::DomainMismatch);
        }
        Ok(Self::constant_unchecked(domain, c))
    }

    fn constant_unchecked(domain: Domain, c: Scalar) -> Self {
        Self::monomial_unchecked(domain, c, Monomial::ONE)
    }

    pub fn var(domain: Domain, v: Var) -> Self {
        Self::monomial_unchecked(domain, domain.one(), Monomial::var(v))
    }

    pub(crate) fn monomial_unchecked(domain: Domain, c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !domain.is_zero(&c) {
            terms.insert(m, c);
        }
        MPoly { domain, terms }
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, summing repeats.
    pub fn from_terms<I>(domain: Domain, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in terms {
            if !domain.contains(&c) {
                return Err(AlgebraError::DomainMismatch);
            }
            accumulate(&domain, &mut acc, m, c);
        }
        acc.retain(|_, c| !domain.is_zero(c));
        Ok(MPoly { domain, terms: acc })
    }

    /// Linear form `sum_i c_i * v_i` over the variables of `block`.
    pub fn linear_form(domain: Domain, block: Block, coeffs: &[Scalar; 4]) -> Self {
        let terms = block
            .vars()
            .into_iter()
            .zip(coeffs.iter())
            .filter(|(_, c)| !domain.is_zero(c))
            .map(|(v, c)| (Monomial::var(v), c.clone()))
            .collect();
        MPoly { domain, terms }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.keys().all(Monomial::is_one)
            && self.terms.values().all(|c| self.domain.is_one(c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending grevlex order (leading term first).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + ExactSizeIterator {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.domain.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Common degree of all terms; `None` for the zero polynomial or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// `(x-degree, y-degree)` shared by every term, if there is one.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut degs = self.terms.keys().map(Monomial::bidegree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v) as u32).max().unwrap_or(0)
    }

    /// True when every term uses only variables of `block`.
    pub fn in_block(&self, block: Block) -> bool {
        self.terms.keys().all(|m| m.in_block(block))
    }

    /// Smallest-index variable that occurs, if any.
    pub fn first_var(&self) -> Option<Var> {
        (0..NVARS)
            .map(Var::from_index)
            .find(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
    }

    fn check_domain(&self, other: &MPoly) -> Result<(), AlgebraError> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(AlgebraError::DomainMismatch)
        }
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly, AlgebraError> {
        self.check_domain(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&self.domain, &mut terms, *m, c.clone());
        }
        terms.retain(|_, c| !self.domain.is_zero(c));
        Ok(MPoly { domain: self.domain, terms })
    }

    pub fn checked_sub(&self, other: &MPoly) -> Result<MPoly, AlgebraError> {
        self.check_domain(other)?;
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly, AlgebraError> {
        self.check_domain(other)?;
        let d = self.domain;
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&d, &mut terms, ma.mul(mb), d.mul(ca, cb));
            }
        }
        terms.retain(|_, c| !d.is_zero(c));
        Ok(MPoly { domain: d, terms })
    }

    fn neg_ref(&self) -> MPoly {
        let d = self.domain;
        MPoly {
            domain: d,
            terms: self.terms.iter().map(|(m, c)| (*m, d.neg(c))).collect(),
        }
    }

    /// Multiplies by a scalar of the same domain.
    pub fn scale(&self, c: &Scalar) -> MPoly {
        let d = self.domain;
        assert!(d.contains(c), "scalar outside {d}");
        if d.is_zero(c) {
            return MPoly::zero(d);
        }
        MPoly {
            domain: d,
            terms: self.terms.iter().map(|(m, a)| (*m, d.mul(a, c))).collect(),
        }
    }

    /// Multiplies by a monomial.
    pub fn shift(&self, m: &Monomial) -> MPoly {
        MPoly {
            domain: self.domain,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.domain);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Scales so the leading coefficient is one. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> MPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.domain.inv(c).expect("nonzero coefficient in a field");
                self.scale(&inv)
            }
        }
    }

    /// Evaluates at a point of `domain^8` (coordinates ordered `x1..x4, y1..y4`).
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, AlgebraError> {
        if point.len() != NVARS {
            return Err(AlgebraError::Arity { expected: NVARS, found: point.len() });
        }
        if !point.iter().all(|s| self.domain.contains(s)) {
            return Err(AlgebraError::DomainMismatch);
        }
        let d = self.domain;
        let mut acc = d.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = d.mul(&t, &d.pow(&point[i], e as u32));
                }
            }
            acc = d.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: Var) -> MPoly {
        let d = self.domain;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let c = d.mul(c, &d.from_i64(e as i64));
            if !d.is_zero(&c) {
                terms.insert(m.with_exponent(v, e - 1), c);
            }
        }
        MPoly { domain: d, terms }
    }

    /// Reduces the coefficients into another domain (e.g. `Q -> F_p`).
    pub fn to_domain(&self, target: Domain) -> Result<MPoly, AlgebraError> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((*m, target.convert(c)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        MPoly::from_terms(target, terms)
    }

    /// `self -= c * m * f`, in place.
    pub(crate) fn sub_scaled_shift(&mut self, f: &MPoly, m: &Monomial, c: &Scalar) {
        use std::collections::btree_map::Entry;
        let d = self.domain;
        for (k, a) in &f.terms {
            let prod = d.neg(&d.mul(a, c));
            match self.terms.entry(k.mul(m)) {
                Entry::Vacant(e) => {
                    e.insert(prod);
                }
                Entry::Occupied(mut e) => {
                    let s = d.add(e.get(), &prod);
                    if d.is_zero(&s) {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
    }

    /// Splits into coefficients of powers of `v`: `self = sum_k out[k] * v^k`.
    pub(crate) fn coefficients_in(&self, v: Var) -> Vec<MPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out: Vec<BTreeMap<Monomial, Scalar>> = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exponent(v) as usize;
            out[k].insert(m.with_exponent(v, 0), c.clone());
        }
        out.into_iter().map(|terms| MPoly { domain: self.domain, terms }).collect()
    }

    pub(crate) fn from_coefficients_in(domain: Domain, v: Var, coeffs: &[MPoly]) -> MPoly {
        let mut terms = BTreeMap::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                debug_assert_eq!(m.exponent(v), 0);
                terms.insert(m.with_exponent(v, k as u16), a.clone());
            }
        }
        MPoly { domain, terms }
    }
}

fn accumulate(d: &Domain, terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let s = d.add(e.get(), &c);
            *e.get_mut() = s;
        }
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.checked_add(rhs).expect("polynomials over different domains")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.checked_sub(rhs).expect("polynomials over different domains")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.checked_mul(rhs).expect("polynomials over different domains")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Domain {
        Domain::Rational
    }

    #[test]
    fn difference_of_squares() {
        let x1 = MPoly::var(q(), Var::x(1));
        let y1 = MPoly::var(q(), Var::y(1));
        let prod = &(&x1 + &y1) * &(&x1 - &y1);
        let expect = &x1.pow(2) - &y1.pow(2);
        assert_eq!(prod, expect);
        assert_eq!(prod.to_string(), "x1^2 - y1^2");
    }

    #[test]
    fn evaluate_product_of_x_block() {
        let d = q();
        let p = [1, 2, 3, 4]
            .iter()
            .fold(MPoly::one(d), |acc, &i| &acc * &MPoly::var(d, Var::x(i)));
        let pt: Vec<Scalar> = [1, 2, 3, 4, 9, 9, 9, 9].iter().map(|&n| d.from_i64(n)).collect();
        assert_eq!(p.eval(&pt).unwrap(), d.from_i64(24));
    }

    #[test]
    fn mixed_domains_are_rejected() {
        let a = MPoly::var(q(), Var::x(1));
        let b = MPoly::var(Domain::prime_field(7).unwrap(), Var::x(1));
        assert!(matches!(a.checked_add(&b), Err(AlgebraError::DomainMismatch)));
        assert!(matches!(a.checked_mul(&b), Err(AlgebraError::DomainMismatch)));
    }

    #[test]
    fn degrees_and_blocks() {
        let d = q();
        let f = &(&MPoly::var(d, Var::x(1)) * &MPoly::var(d, Var::y(2))) + &MPoly::var(d, Var::x(3)).pow(2);
        assert_eq!(f.homogeneous_degree(), Some(2));
        assert_eq!(f.bidegree(), None);
        assert!(!f.in_block(Block::X));
        let g = &MPoly::var(d, Var::x(1)) * &MPoly::var(d, Var::y(2));
        assert_eq!(g.bidegree(), Some((1, 1)));
        assert_eq!(MPoly::zero(d).homogeneous_degree(), None);
        assert!(MPoly::zero(d).is_homogeneous());
    }

    #[test]
    fn derivative_drops_vanishing_terms_in_small_characteristic() {
        let f2 = Domain::prime_field(2).unwrap();
        let x1 = MPoly::var(f2, Var::x(1));
        assert!(x1.pow(2).derivative(Var::x(1)).is_zero());
        assert_eq!(x1.pow(3).derivative(Var::x(1)), x1.pow(2));
    }

    #[test]
    fn coefficient_split_roundtrip() {
        let d = q();
        let x1 = MPoly::var(d, Var::x(1));
        let x2 = MPoly::var(d, Var::x(2));
        let f = &(&x1.pow(2) * &x2) + &(&x1 - &x2.pow(3));
        let parts = f.coefficients_in(Var::x(1));
        assert_eq!(parts.len(), 3);
        assert_eq!(MPoly::from_coefficients_in(d, Var::x(1), &parts), f);
    }
}
