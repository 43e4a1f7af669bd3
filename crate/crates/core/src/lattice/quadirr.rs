//! Exact arithmetic in `Q(√D)` and the isotropic rays of a binary form.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{GramMatrix, LatticeError};

/// `a + b√D` with `D` square-free. `D = 1` is used only for rationals (`b = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    a: BigRational,
    b: BigRational,
    d: i64,
}

/// `(s, f)` with `n = f^2 s` and `s` square-free.
fn square_free_part(n: i64) -> (i64, i64) {
    let mut s = n;
    let mut f = 1;
    let mut p = 2;
    while p * p <= s {
        while s % (p * p) == 0 {
            s /= p * p;
            f *= p;
        }
        p += 1;
    }
    (s, f)
}

impl QuadIrr {
    /// `a + b√D` for `D > 0`; square factors of `D` move into `b`.
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Result<Self, LatticeError> {
        if d <= 0 {
            return Err(LatticeError::InvalidArgument(format!("radicand {d} must be positive")));
        }
        let (s, f) = square_free_part(d);
        let b = b * BigRational::from_integer(f.into());
        if s == 1 {
            return Ok(QuadIrr::rational(a + b));
        }
        if b.is_zero() {
            return Ok(QuadIrr::rational(a));
        }
        Ok(QuadIrr { a, b, d: s })
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Result<Self, LatticeError> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d)
    }

    pub fn rational(a: BigRational) -> Self {
        QuadIrr { a, b: BigRational::zero(), d: 1 }
    }

    pub fn integer(a: i64) -> Self {
        Self::rational(BigRational::from_integer(a.into()))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn common_radicand(&self, o: &QuadIrr) -> i64 {
        match (self.b.is_zero(), o.b.is_zero()) {
            (true, _) => o.d,
            (_, true) => self.d,
            _ => {
                assert_eq!(self.d, o.d, "mixing Q(√{}) and Q(√{})", self.d, o.d);
                self.d
            }
        }
    }

    fn make(a: BigRational, b: BigRational, d: i64) -> Self {
        if b.is_zero() {
            QuadIrr::rational(a)
        } else {
            QuadIrr { a, b, d }
        }
    }

    pub fn add(&self, o: &QuadIrr) -> QuadIrr {
        let d = self.common_radicand(o);
        Self::make(&self.a + &o.a, &self.b + &o.b, d)
    }

    pub fn neg(&self) -> QuadIrr {
        QuadIrr { a: -&self.a, b: -&self.b, d: self.d }
    }

    pub fn sub(&self, o: &QuadIrr) -> QuadIrr {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QuadIrr) -> QuadIrr {
        let d = self.common_radicand(o);
        let dd = BigRational::from_integer(d.into());
        Self::make(&self.a * &o.a + &self.b * &o.b * dd, &self.a * &o.b + &self.b * &o.a, d)
    }

    pub fn scale(&self, c: &BigRational) -> QuadIrr {
        Self::make(&self.a * c, &self.b * c, self.d)
    }

    /// `a - b√D`.
    pub fn conjugate(&self) -> QuadIrr {
        QuadIrr { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    /// `a^2 - D b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.into())
    }

    pub fn inv(&self) -> Result<QuadIrr, LatticeError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(LatticeError::InvalidArgument("inverse of zero".into()));
        }
        Ok(self.conjugate().scale(&n.recip()))
    }

    pub fn div(&self, o: &QuadIrr) -> Result<QuadIrr, LatticeError> {
        Ok(self.mul(&o.inv()?))
    }

    /// Exact sign, decided by comparing `a^2` with `D b^2` when the parts disagree.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * BigRational::from_integer(self.d.into());
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> QuadIrr {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, o: &QuadIrr) -> Ordering {
        self.sub(o).signum().cmp(&0)
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = |b: &BigRational| if b.abs().is_one() { String::new() } else { format!("{}*", b.abs()) };
        if self.a.is_zero() {
            let s = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{s}{}√{}", coeff(&self.b), self.d)
        } else {
            let s = if self.b.is_negative() { "-" } else { "+" };
            write!(f, "{} {s} {}√{}", self.a, coeff(&self.b), self.d)
        }
    }
}

/// `u^t A v` for `Q(√D)` vectors.
pub fn pair_quad(a: &GramMatrix, u: &[QuadIrr], v: &[QuadIrr]) -> QuadIrr {
    let n = a.rank();
    let mut s = QuadIrr::integer(0);
    for i in 0..n {
        for j in 0..n {
            let e = a.get(i, j);
            if e != 0 {
                s = s.add(&u[i].mul(&v[j]).scale(&BigRational::from_integer(e.into())));
            }
        }
    }
    s
}

/// Divides by the coordinate of largest absolute value (ties go to the later index).
fn normalize(v: [QuadIrr; 2]) -> [QuadIrr; 2] {
    let k = if v[0].abs().cmp_value(&v[1].abs()) == Ordering::Greater { 0 } else { 1 };
    let piv = v[k].abs();
    [v[0].div(&piv).expect("nonzero"), v[1].div(&piv).expect("nonzero")]
}

fn dominant_index(v: &[QuadIrr; 2]) -> usize {
    if v[0].abs().cmp_value(&v[1].abs()) == Ordering::Greater {
        0
    } else {
        1
    }
}

/// The two isotropic rays bounding the positive cone of a binary form of
/// signature `(1, 1)`.
///
/// Each ray is scaled so that its largest coordinate has absolute value 1 and
/// oriented to pair positively with `e1` when `a > 0`, else with `e2` when
/// `c > 0`; when neither diagonal entry is positive the sum of the rays gets a
/// positive first nonzero coordinate. `v1` is the ray whose second coordinate
/// dominates (for `[[4, 4l], [4l, 4]]` it is `(-l + √(l^2 - 1), 1)`) and `v2` the
/// other one.
pub fn boundary_rays(g: &GramMatrix) -> Result<[[QuadIrr; 2]; 2], LatticeError> {
    if g.rank() != 2 {
        return Err(LatticeError::UnsupportedRank(g.rank()));
    }
    let (a, b, c) = (g.get(0, 0), g.get(0, 1), g.get(1, 1));
    let disc = b * b - a * c;
    if disc < 0 {
        return Err(LatticeError::Definite);
    }
    if disc == 0 {
        return Err(LatticeError::Degenerate);
    }
    let q = |n: i64| BigRational::from_integer(BigInt::from(n));
    let mut rays: Vec<[QuadIrr; 2]> = if a != 0 {
        // a x^2 + 2 b x y + c y^2 = 0 with y = 1: x = (-b ± √disc) / a.
        [1i64, -1]
            .iter()
            .map(|&s| {
                let x = QuadIrr::new(q(-b) / q(a), q(s) / q(a), disc).expect("positive radicand");
                [x, QuadIrr::integer(1)]
            })
            .collect()
    } else {
        // y (2 b x + c y) = 0.
        vec![[QuadIrr::integer(1), QuadIrr::integer(0)], [QuadIrr::integer(-c), QuadIrr::integer(2 * b)]]
    };
    for r in rays.iter_mut() {
        *r = normalize(r.clone());
    }
    if pair_quad(g, &rays[0], &rays[1]).signum() < 0 {
        rays[1] = [rays[1][0].neg(), rays[1][1].neg()];
    }
    let reference: Option<[QuadIrr; 2]> = if a > 0 {
        Some([QuadIrr::integer(1), QuadIrr::integer(0)])
    } else if c > 0 {
        Some([QuadIrr::integer(0), QuadIrr::integer(1)])
    } else {
        None
    };
    let sum = [rays[0][0].add(&rays[1][0]), rays[0][1].add(&rays[1][1])];
    let flip = match reference {
        Some(r) => pair_quad(g, &r, &sum).signum() < 0,
        None => {
            let lead = if sum[0].is_zero() { &sum[1] } else { &sum[0] };
            lead.signum() < 0
        }
    };
    if flip {
        for r in rays.iter_mut() {
            *r = [r[0].neg(), r[1].neg()];
        }
    }
    let (i1, i2) = match (dominant_index(&rays[0]), dominant_index(&rays[1])) {
        (1, 0) => (0, 1),
        (0, 1) => (1, 0),
        // Same dominant coordinate: order by the other coordinate, larger first.
        (k, _) => {
            if rays[0][1 - k].cmp_value(&rays[1][1 - k]) == Ordering::Less {
                (1, 0)
            } else {
                (0, 1)
            }
        }
    };
    Ok([rays[i1].clone(), rays[i2].clone()])
}

/// `floor(√n)` for `n >= 0`.
pub(crate) fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_normalisation() {
        let x = QuadIrr::from_ints(-5, 1, 24).unwrap();
        assert_eq!(x.radicand(), 6);
        assert_eq!(x.irrational_part(), &BigRational::from_integer(2.into()));
        assert_eq!(x.mul(&x.conjugate()), QuadIrr::integer(1));
        assert_eq!(x.signum(), -1);
        assert_eq!(x.inv().unwrap(), QuadIrr::from_ints(-5, -1, 24).unwrap());
        assert_eq!(QuadIrr::from_ints(3, 2, 4).unwrap(), QuadIrr::integer(7));
        assert_eq!(QuadIrr::from_ints(0, -1, 2).unwrap().to_string(), "-√2");
        assert_eq!(x.to_string(), "-5 + 2*√6");
    }

    #[test]
    fn exact_signs() {
        assert_eq!(QuadIrr::from_ints(7, -5, 2).unwrap().signum(), -1); // 7 - 7.07
        assert_eq!(QuadIrr::from_ints(-7, 5, 2).unwrap().signum(), 1);
        assert_eq!(QuadIrr::from_ints(99, -70, 2).unwrap().signum(), 1); // 99 - 98.99
    }

    #[test]
    fn ell_family_rays() {
        for l in 2..=12 {
            let g = GramMatrix::ell_family(l);
            let [v1, v2] = boundary_rays(&g).unwrap();
            assert_eq!(v1, [QuadIrr::from_ints(-l, 1, l * l - 1).unwrap(), QuadIrr::integer(1)]);
            assert_eq!(v2, [v1[1].clone(), v1[0].clone()]);
            assert!(pair_quad(&g, &v1, &v1).is_zero());
            assert!(pair_quad(&g, &v2, &v2).is_zero());
            let mid = [v1[0].add(&v2[0]), v1[1].add(&v2[1])];
            assert_eq!(pair_quad(&g, &mid, &mid).signum(), 1);
        }
    }

    #[test]
    fn hyperbolic_plane_rays() {
        let g = GramMatrix::binary(0, 2, 0);
        let [v1, v2] = boundary_rays(&g).unwrap();
        assert_eq!(v1, [QuadIrr::integer(0), QuadIrr::integer(1)]);
        assert_eq!(v2, [QuadIrr::integer(1), QuadIrr::integer(0)]);
    }

    #[test]
    fn other_indefinite_forms() {
        for (a, b, c) in [(2, 1, -4), (-2, 3, -2), (0, 3, 4), (6, 1, 0), (-4, 5, 2)] {
            let g = GramMatrix::binary(a, b, c);
            let [v1, v2] = boundary_rays(&g).unwrap();
            assert!(pair_quad(&g, &v1, &v1).is_zero());
            assert!(pair_quad(&g, &v2, &v2).is_zero());
            let mid = [v1[0].add(&v2[0]), v1[1].add(&v2[1])];
            assert_eq!(pair_quad(&g, &mid, &mid).signum(), 1, "{a} {b} {c}");
        }
    }

    #[test]
    fn definite_and_degenerate_rejected() {
        assert_eq!(boundary_rays(&GramMatrix::binary(2, 1, 2)).unwrap_err(), LatticeError::Definite);
        assert_eq!(boundary_rays(&GramMatrix::binary(2, 2, 2)).unwrap_err(), LatticeError::Degenerate);
    }
}
