//! Tensors `a_ijk`, the matrices `M(x)` and `N(y)`, and the surfaces they define.
//!
//! Indices are 0-based in code: `m_ij(x) = sum_k a_ijk x_(k+1)` and
//! `n_ik(y) = sum_j a_ijk y_(j+1)`. The bilinear forms are the rows of
//! `M(x) y^t`, i.e. `Q_i = sum_j m_ij(x) y_j`, which also equal the rows of
//! `N(y) x^t`.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::algebra::{
    parse_rational, AlgebraError, Block, Domain, MPoly, PolyMatrix, Scalar, Var,
};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeterminantalError {
    #[error("degenerate tensor: {0} vanishes identically")]
    Degenerate(&'static str),
    #[error("tensor needs 64 entries, got {0}")]
    EntryCount(usize),
    #[error("tensor file: {0}")]
    Format(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The 4x4x4 coefficient array, stored row-major in `(i, j, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor4 {
    domain: Domain,
    a: Vec<Scalar>,
}

fn flat(i: usize, j: usize, k: usize) -> usize {
    i * 16 + j * 4 + k
}

impl Tensor4 {
    pub fn new(domain: Domain, entries: Vec<Scalar>) -> Result<Self, DeterminantalError> {
        if entries.len() != 64 {
            return Err(DeterminantalError::EntryCount(entries.len()));
        }
        if !entries.iter().all(|s| domain.contains(s)) {
            return Err(AlgebraError::DomainMismatch.into());
        }
        Ok(Tensor4 { domain, a: entries })
    }

    pub fn from_fn(domain: Domain, mut f: impl FnMut(usize, usize, usize) -> i64) -> Self {
        let a = (0..64).map(|n| domain.from_i64(f(n / 16, (n / 4) % 4, n % 4))).collect();
        Tensor4 { domain, a }
    }

    /// `a_ijk = [i = j = k]`, giving `M = diag(x)` and `N = diag(y)`.
    pub fn delta(domain: Domain) -> Self {
        Self::from_fn(domain, |i, j, k| (i == j && j == k) as i64)
    }

    pub fn ones(domain: Domain) -> Self {
        Self::from_fn(domain, |_, _, _| 1)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.a[flat(i, j, k)]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.a
    }

    pub fn with_entry(&self, i: usize, j: usize, k: usize, value: Scalar) -> Result<Self, DeterminantalError> {
        let mut a = self.a.clone();
        a[flat(i, j, k)] = value;
        Tensor4::new(self.domain, a)
    }

    /// Exchanges the roles of `j` and `k`: `a'_ijk = a_ikj`.
    pub fn swap_jk(&self) -> Self {
        let a = (0..64).map(|n| self.a[flat(n / 16, n % 4, (n / 4) % 4)].clone()).collect();
        Tensor4 { domain: self.domain, a }
    }

    /// Reduces every entry into another domain.
    pub fn to_domain(&self, target: Domain) -> Result<Self, DeterminantalError> {
        let a = self.a.iter().map(|s| target.convert(s)).collect::<Result<Vec<_>, _>>()?;
        Tensor4::new(target, a)
    }

    /// Residues of the entries when the tensor lives over `F_p`.
    pub fn residues(&self) -> Option<Vec<u64>> {
        self.a
            .iter()
            .map(|s| match s {
                Scalar::Residue(r) => Some(*r),
                Scalar::Rational(_) => None,
            })
            .collect()
    }

    /// Serializes to `{"domain": "Q" | {"Fp": p}, "a": [[[...]]]}`.
    /// Rational entries are `"p/q"` strings, residues are integers.
    pub fn to_json(&self) -> Value {
        let domain = match self.domain {
            Domain::Rational => json!("Q"),
            Domain::PrimeField(p) => json!({ "Fp": p }),
        };
        let entry = |s: &Scalar| match s {
            Scalar::Rational(q) => json!(q.to_string()),
            Scalar::Residue(r) => json!(r),
        };
        let a: Vec<Value> = (0..4)
            .map(|i| {
                Value::Array(
                    (0..4)
                        .map(|j| Value::Array((0..4).map(|k| entry(self.get(i, j, k))).collect()))
                        .collect(),
                )
            })
            .collect();
        json!({ "domain": domain, "a": a })
    }

    pub fn from_json(v: &Value) -> Result<Self, DeterminantalError> {
        let err = |m: &str| DeterminantalError::Format(m.to_string());
        let domain = match v.get("domain") {
            Some(Value::String(s)) if s == "Q" => Domain::Rational,
            Some(Value::Object(o)) => {
                let p = o.get("Fp").and_then(Value::as_u64).ok_or_else(|| err("domain must be \"Q\" or {\"Fp\": p}"))?;
                Domain::prime_field(p)?
            }
            _ => return Err(err("domain must be \"Q\" or {\"Fp\": p}")),
        };
        let a = v.get("a").and_then(Value::as_array).ok_or_else(|| err("missing array `a`"))?;
        let mut entries = Vec::with_capacity(64);
        if a.len() != 4 {
            return Err(err("`a` must be 4x4x4"));
        }
        for plane in a {
            let plane = plane.as_array().filter(|p| p.len() == 4).ok_or_else(|| err("`a` must be 4x4x4"))?;
            for row in plane {
                let row = row.as_array().filter(|r| r.len() == 4).ok_or_else(|| err("`a` must be 4x4x4"))?;
                for x in row {
                    let q: BigRational = match x {
                        Value::String(s) => parse_rational(s)?,
                        Value::Number(n) => {
                            let i = n.as_i64().ok_or_else(|| err("numeric entries must be integers"))?;
                            BigRational::from_integer(i.into())
                        }
                        _ => return Err(err("entries must be integers or \"p/q\" strings")),
                    };
                    entries.push(domain.from_rational(&q)?);
                }
            }
        }
        Tensor4::new(domain, entries)
    }
}

/// Deterministic tensor for `seed` (stream [`rng::tags::TENSOR`]).
///
/// Entries are drawn in `(i, j, k)` row-major order, one 64-bit draw each:
/// over `F_p` the entry is `draw mod p`; over `Q` it is `(draw mod 19) - 9`.
pub fn random_tensor(seed: u64, domain: Domain) -> Tensor4 {
    let mut g = rng::stream(seed, rng::tags::TENSOR);
    let a = (0..64)
        .map(|_| match domain {
            Domain::PrimeField(p) => Scalar::Residue(rng::below(&mut g, p)),
            Domain::Rational => domain.from_i64(rng::below(&mut g, 19) as i64 - 9),
        })
        .collect();
    Tensor4 { domain, a }
}

/// `M(x)` with `m_ij = sum_k a_ijk x_k`.
pub fn build_m(t: &Tensor4) -> PolyMatrix {
    PolyMatrix::from_fn(4, 4, |i, j| {
        let c = [0, 1, 2, 3].map(|k| t.get(i, j, k).clone());
        MPoly::linear_form(t.domain, Block::X, &c)
    })
    .expect("4x4 over one domain")
}

/// `N(y)` with `n_ik = sum_j a_ijk y_j`.
pub fn build_n(t: &Tensor4) -> PolyMatrix {
    PolyMatrix::from_fn(4, 4, |i, k| {
        let c = [0, 1, 2, 3].map(|j| t.get(i, j, k).clone());
        MPoly::linear_form(t.domain, Block::Y, &c)
    })
    .expect("4x4 over one domain")
}

fn block_vector(domain: Domain, block: Block) -> Vec<MPoly> {
    block.vars().iter().map(|&v| MPoly::var(domain, v)).collect()
}

/// `M(x) y^t - N(y) x^t`, row by row.
pub fn bilinear_residual(m: &PolyMatrix, n: &PolyMatrix) -> Result<Vec<MPoly>, DeterminantalError> {
    let d = m.domain();
    let my = m.mul_vec(&block_vector(d, Block::Y))?;
    let nx = n.mul_vec(&block_vector(d, Block::X))?;
    Ok(my.iter().zip(&nx).map(|(a, b)| a - b).collect())
}

/// Recomputes both sides of `M(x) y^t = N(y) x^t` from independent matrices.
pub fn bilinear_identity_holds(m: &PolyMatrix, n: &PolyMatrix) -> Result<bool, DeterminantalError> {
    Ok(bilinear_residual(m, n)?.iter().all(MPoly::is_zero))
}

pub fn bilinear_identity_check(t: &Tensor4) -> bool {
    bilinear_identity_holds(&build_m(t), &build_n(t)).expect("shapes agree by construction")
}

/// The four bidegree-(1,1) forms `Q_i = sum_j m_ij(x) y_j`.
pub fn quadric_forms(t: &Tensor4) -> [MPoly; 4] {
    let d = t.domain;
    let rows = build_m(t).mul_vec(&block_vector(d, Block::Y)).expect("4 columns");
    rows.try_into().expect("4 rows")
}

/// Everything the construction derives from one tensor.
#[derive(Clone, Debug)]
pub struct DeterminantalPair {
    pub m: PolyMatrix,
    pub n: PolyMatrix,
    /// `det M(x)`, a quartic in `x` or zero.
    pub f1: MPoly,
    /// `det N(y)`, a quartic in `y` or zero.
    pub f2: MPoly,
    pub q: [MPoly; 4],
    /// Set when `f1` or `f2` vanishes identically.
    pub degenerate: bool,
}

impl DeterminantalPair {
    pub fn new(t: &Tensor4) -> Self {
        let m = build_m(t);
        let n = build_n(t);
        let f1 = m.det().expect("square");
        let f2 = n.det().expect("square");
        let degenerate = f1.is_zero() || f2.is_zero();
        DeterminantalPair { q: quadric_forms(t), m, n, f1, f2, degenerate }
    }

    pub fn require_nondegenerate(&self) -> Result<&Self, DeterminantalError> {
        if self.f1.is_zero() {
            Err(DeterminantalError::Degenerate("det M(x)"))
        } else if self.f2.is_zero() {
            Err(DeterminantalError::Degenerate("det N(y)"))
        } else {
            Ok(self)
        }
    }
}

/// `(det M(x), det N(y))`.
pub fn quartic_surfaces(t: &Tensor4) -> (MPoly, MPoly) {
    let p = DeterminantalPair::new(t);
    (p.f1, p.f2)
}

/// Renames `y_i -> x_i` in a y-block polynomial.
pub fn y_to_x(f: &MPoly) -> MPoly {
    let d = f.domain();
    let xs = [1, 2, 3, 4].map(|i| MPoly::var(d, Var::x(i)));
    crate::algebra::compose(f, Block::Y, &xs).expect("y-block polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> Domain {
        Domain::prime_field(101).unwrap()
    }

    fn p(d: Domain, s: &str) -> MPoly {
        MPoly::parse(d, s).unwrap()
    }

    #[test]
    fn delta_tensor_gives_diagonal_matrices() {
        let d = Domain::Rational;
        let t = Tensor4::delta(d);
        let m = build_m(&t);
        let n = build_n(&t);
        for i in 0..4 {
            for j in 0..4 {
                let want_m = if i == j { MPoly::var(d, Var::x(i + 1)) } else { MPoly::zero(d) };
                let want_n = if i == j { MPoly::var(d, Var::y(i + 1)) } else { MPoly::zero(d) };
                assert_eq!(m.get(i, j), &want_m);
                assert_eq!(n.get(i, j), &want_n);
            }
        }
        let (f1, f2) = quartic_surfaces(&t);
        assert_eq!(f1, p(d, "x1*x2*x3*x4"));
        assert_eq!(f2, p(d, "y1*y2*y3*y4"));
        let q = quadric_forms(&t);
        for (i, qi) in q.iter().enumerate() {
            assert_eq!(qi, &(&MPoly::var(d, Var::x(i + 1)) * &MPoly::var(d, Var::y(i + 1))));
        }
        assert!(bilinear_identity_check(&t));
    }

    #[test]
    fn all_ones_tensor() {
        let d = Domain::Rational;
        let m = build_m(&Tensor4::ones(d));
        assert!(m.entries().iter().all(|e| e == &p(d, "x1 + x2 + x3 + x4")));
        let pair = DeterminantalPair::new(&Tensor4::ones(d));
        assert!(pair.degenerate);
        assert!(matches!(pair.require_nondegenerate(), Err(DeterminantalError::Degenerate(_))));
    }

    #[test]
    fn random_entries_are_linear_forms() {
        let t = random_tensor(5, f101());
        assert!(build_m(&t).is_linear_in(Block::X));
        assert!(build_n(&t).is_linear_in(Block::Y));
        for q in quadric_forms(&t) {
            assert_eq!(q.bidegree(), Some((1, 1)));
        }
    }

    #[test]
    fn swapping_j_and_k_exchanges_m_and_n() {
        let t = random_tensor(11, Domain::Rational);
        let s = t.swap_jk();
        let n = build_n(&t);
        let m_swapped = build_m(&s);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(y_to_x(n.get(i, j)), *m_swapped.get(i, j));
            }
        }
    }

    #[test]
    fn quadric_rows_equal_n_times_x() {
        let t = random_tensor(3, f101());
        let d = t.domain();
        let nx = build_n(&t).mul_vec(&block_vector(d, Block::X)).unwrap();
        assert_eq!(quadric_forms(&t).to_vec(), nx);
    }

    #[test]
    fn random_tensor_is_reproducible_and_in_range() {
        let a = random_tensor(42, f101());
        assert_eq!(a, random_tensor(42, f101()));
        assert!(a.residues().unwrap().iter().all(|&r| r < 101));
        let q = random_tensor(42, Domain::Rational);
        for s in q.entries() {
            match s {
                Scalar::Rational(r) => assert!(r.is_integer() && r.numer().magnitude() <= &9u32.into()),
                _ => panic!("rational tensor with residue entry"),
            }
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_tensors() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..1000u64 {
            assert!(seen.insert(random_tensor(seed, f101())), "collision at seed {seed}");
        }
    }

    #[test]
    fn json_roundtrip_and_rational_entries() {
        let t = random_tensor(9, Domain::Rational).with_entry(1, 2, 3, Scalar::Rational(parse_rational("-5/7").unwrap())).unwrap();
        let v = t.to_json();
        assert_eq!(v["domain"], json!("Q"));
        assert_eq!(v["a"][1][2][3], json!("-5/7"));
        assert_eq!(Tensor4::from_json(&v).unwrap(), t);
        let fp = random_tensor(9, f101());
        assert_eq!(fp.to_json()["domain"], json!({"Fp": 101}));
        assert_eq!(Tensor4::from_json(&fp.to_json()).unwrap(), fp);
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(Tensor4::from_json(&json!({"domain": "R", "a": []})).is_err());
        assert!(Tensor4::from_json(&json!({"domain": {"Fp": 100}, "a": []})).is_err());
        assert!(Tensor4::from_json(&json!({"domain": "Q", "a": [[[1]]]})).is_err());
    }
}
