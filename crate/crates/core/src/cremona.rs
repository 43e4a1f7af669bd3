//! The cubo-cubic Cremona map `τ` and its inverse `σ`, checked symbolically.
//!
//! For `x` off the base locus, the first three rows of `M(x)` have a
//! one-dimensional kernel in `y`, spanned by the vector of signed 3x3 minors.
//! That vector is `τ(x)`; `σ` is built the same way from `N(y)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    compose, divides, gcd_all, identity_test, AlgebraError, Block, Domain, IdentityEvidence, MPoly, PolyMatrix, Scalar,
};
use crate::determinantal::{DeterminantalError, DeterminantalPair};
use crate::lattice::GramMatrix;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CremonaError {
    #[error("degenerate map: {0}")]
    Degenerate(String),
    #[error("maps do not compose: {0}")]
    BlockMismatch(String),
    #[error("expected a 3x4 matrix of linear forms in one block")]
    NotLinearRows,
    #[error("intersection product has degree {0}, expected 6")]
    ChowDegree(u32),
    #[error("cannot parse intersection product: {0}")]
    ChowParse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Determinantal(#[from] DeterminantalError),
}

/// A rational map given by four homogeneous forms of one degree in `source`,
/// whose values are coordinates in `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMap {
    source: Block,
    target: Block,
    components: [MPoly; 4],
    degree: u32,
    reduced: bool,
}

impl RatMap {
    pub fn new(source: Block, target: Block, components: [MPoly; 4]) -> Result<Self, CremonaError> {
        let domain = components[0].domain();
        if components.iter().any(|c| c.domain() != domain) {
            return Err(AlgebraError::DomainMismatch.into());
        }
        if components.iter().all(MPoly::is_zero) {
            return Err(CremonaError::Degenerate("all components vanish".into()));
        }
        let mut degree = None;
        for c in components.iter().filter(|c| !c.is_zero()) {
            if !c.in_block(source) {
                return Err(AlgebraError::WrongBlock.into());
            }
            let d = c.homogeneous_degree().ok_or(AlgebraError::UnequalMapDegrees)?;
            if degree.is_some_and(|e| e != d) {
                return Err(AlgebraError::UnequalMapDegrees.into());
            }
            degree = Some(d);
        }
        let reduced = gcd_all(components.iter().filter(|c| !c.is_zero()))?.is_constant();
        Ok(RatMap { source, target, components, degree: degree.expect("a nonzero component"), reduced })
    }

    pub fn source(&self) -> Block {
        self.source
    }

    pub fn target(&self) -> Block {
        self.target
    }

    pub fn components(&self) -> &[MPoly; 4] {
        &self.components
    }

    pub fn domain(&self) -> Domain {
        self.components[0].domain()
    }

    /// Degree of the components as given.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// True when the components have no common factor.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// The same map with the gcd of the components divided out.
    pub fn reduce(&self) -> Result<RatMap, CremonaError> {
        if self.reduced {
            return Ok(self.clone());
        }
        let g = gcd_all(self.components.iter().filter(|c| !c.is_zero()))?;
        let comps = self.components.clone().map(|c| {
            if c.is_zero() {
                c
            } else {
                divides(&g, &c).expect("same domain").expect("gcd divides")
            }
        });
        RatMap::new(self.source, self.target, comps)
    }

    /// Components are linearly dependent, so the image lies in a hyperplane and
    /// the map cannot be birational. Covers constant maps.
    pub fn is_degenerate(&self) -> bool {
        linear_rank(&self.components) < 4
    }

    pub fn identity(domain: Domain, source: Block, target: Block) -> RatMap {
        let comps = source.vars().map(|v| MPoly::var(domain, v));
        RatMap::new(source, target, comps).expect("coordinate functions")
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<[Scalar; 4], AlgebraError> {
        let v: Vec<Scalar> = self.components.iter().map(|c| c.eval(point)).collect::<Result<_, _>>()?;
        Ok(v.try_into().expect("4 components"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source,
            "target": self.target,
            "degree": self.degree,
            "reduced": self.reduced,
            "components": self.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {} : {}]", self.components[0], self.components[1], self.components[2], self.components[3])
    }
}

/// Rank of the coefficient matrix of the four forms.
fn linear_rank(forms: &[MPoly; 4]) -> usize {
    let d = forms[0].domain();
    let monos: Vec<_> = {
        let mut m: Vec<_> = forms.iter().flat_map(|f| f.terms().map(|(m, _)| *m)).collect();
        m.sort();
        m.dedup();
        m
    };
    let mut rows: Vec<Vec<Scalar>> = forms.iter().map(|f| monos.iter().map(|m| f.coeff(m)).collect()).collect();
    let mut rank = 0;
    for col in 0..monos.len() {
        let Some(p) = (rank..rows.len()).find(|&r| !d.is_zero(&rows[r][col])) else { continue };
        rows.swap(rank, p);
        let inv = d.inv(&rows[rank][col]).expect("nonzero pivot");
        for r in 0..rows.len() {
            if r != rank && !d.is_zero(&rows[r][col]) {
                let f = d.mul(&rows[r][col], &inv);
                for c in col..monos.len() {
                    let t = d.mul(&f, &rows[rank][c]);
                    rows[r][c] = d.sub(&rows[r][c], &t);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The vector of signed maximal minors of a 3x4 matrix of linear forms:
/// component `j` (0-based) is `(-1)^j` times the minor deleting column `j`.
/// Each row of `rows` dotted with the result is a determinant with a repeated
/// row, hence zero.
pub fn kernel_map(rows: &PolyMatrix) -> Result<RatMap, CremonaError> {
    if rows.rows() != 3 || rows.cols() != 4 {
        return Err(CremonaError::NotLinearRows);
    }
    let source = [Block::X, Block::Y]
        .into_iter()
        .find(|&b| rows.is_linear_in(b))
        .ok_or(CremonaError::NotLinearRows)?;
    let d = rows.domain();
    let comps: Vec<MPoly> = (0..4)
        .map(|j| {
            let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
            let m = rows.select(&[0, 1, 2], &cols).det()?;
            Ok(if j % 2 == 0 { m } else { m.scale(&d.from_i64(-1)) })
        })
        .collect::<Result<_, AlgebraError>>()?;
    RatMap::new(source, source.other(), comps.try_into().expect("4 minors"))
}

/// Rows used for `τ` and `σ` unless overridden.
pub const DEFAULT_ROWS: [usize; 3] = [0, 1, 2];

/// `(τ, σ)` from the chosen rows of `M(x)` and `N(y)`.
pub fn cremona_maps(pair: &DeterminantalPair, rows: [usize; 3]) -> Result<(RatMap, RatMap), CremonaError> {
    if rows.iter().any(|&r| r > 3) || rows[0] == rows[1] || rows[1] == rows[2] || rows[0] == rows[2] {
        return Err(CremonaError::BlockMismatch(format!("row selection {rows:?} must be three distinct indices in 0..4")));
    }
    let all = [0, 1, 2, 3];
    let tau = kernel_map(&pair.m.select(&rows, &all))?;
    let sigma = kernel_map(&pair.n.select(&rows, &all))?;
    Ok((tau, sigma))
}

/// Outcome of composing `σ ∘ τ`.
#[derive(Clone, Debug)]
pub struct CompositionCheck {
    pub holds: bool,
    /// `g` with `σ(τ(x)) = g · x`, when the check holds.
    pub factor: Option<MPoly>,
    pub composite: [MPoly; 4],
}

fn ensure_usable(m: &RatMap, name: &str) -> Result<(), CremonaError> {
    if m.is_degenerate() {
        return Err(CremonaError::Degenerate(format!("{name} has linearly dependent components")));
    }
    Ok(())
}

/// Checks `σ ∘ τ = id` projectively: with `c = σ(τ(x))`, every `c_i x_j - c_j x_i` vanishes.
pub fn projective_compose_check(sigma: &RatMap, tau: &RatMap) -> Result<CompositionCheck, CremonaError> {
    ensure_usable(sigma, "σ")?;
    ensure_usable(tau, "τ")?;
    if tau.target != sigma.source || sigma.target != tau.source {
        return Err(CremonaError::BlockMismatch(format!(
            "τ: {:?} -> {:?}, σ: {:?} -> {:?}",
            tau.source, tau.target, sigma.source, sigma.target
        )));
    }
    let composite: [MPoly; 4] = sigma
        .components
        .iter()
        .map(|c| compose(c, sigma.source, &tau.components))
        .collect::<Result<Vec<_>, _>>()?
        .try_into()
        .expect("4 components");
    let d = tau.domain();
    let xs = tau.source.vars().map(|v| MPoly::var(d, v));
    let mut holds = true;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            if !(&(&composite[i] * &xs[j]) - &(&composite[j] * &xs[i])).is_zero() {
                holds = false;
                break 'outer;
            }
        }
    }
    let factor = if holds {
        let i = (0..4).find(|&i| !composite[i].is_zero());
        match i {
            Some(i) => divides(&xs[i], &composite[i])?,
            None => {
                holds = false;
                None
            }
        }
    } else {
        None
    };
    Ok(CompositionCheck { holds, factor, composite })
}

/// Outcome of testing `F1 | F2 ∘ τ`.
#[derive(Clone, Debug)]
pub struct PushforwardCheck {
    pub holds: bool,
    pub pulled_back: MPoly,
    pub quotient: Option<MPoly>,
    /// Random-evaluation confirmation of `F1 · quotient = F2 ∘ τ`.
    pub evidence: Option<IdentityEvidence>,
}

impl PushforwardCheck {
    pub fn quotient_degree(&self) -> Option<u32> {
        self.quotient.as_ref().and_then(MPoly::homogeneous_degree)
    }
}

/// Tests whether `f1` (in `τ`'s source block) divides `f2 ∘ τ` exactly.
pub fn pushforward_check(f1: &MPoly, f2: &MPoly, tau: &RatMap, seed: u64) -> Result<PushforwardCheck, CremonaError> {
    ensure_usable(tau, "τ")?;
    if f1.is_zero() || f2.is_zero() {
        return Err(CremonaError::Degenerate("zero surface equation".into()));
    }
    if !f1.in_block(tau.source) || !f2.in_block(tau.target) {
        return Err(CremonaError::BlockMismatch("surface equations must live in the source and target blocks".into()));
    }
    let pulled_back = compose(f2, tau.target, &tau.components)?;
    let quotient = divides(f1, &pulled_back)?;
    let evidence = match &quotient {
        Some(q) => {
            let mut g = rng::stream(seed, rng::tags::IDENTITY_TEST);
            Some(identity_test(&(f1 * q), &pulled_back, crate::algebra::MIN_SAMPLES, &mut g)?)
        }
        None => None,
    };
    let holds = quotient.is_some() && evidence.as_ref().is_some_and(|e| e.agreed);
    Ok(PushforwardCheck { holds, pulled_back, quotient, evidence })
}

/// Degree of the components once their gcd is removed.
pub fn map_degree(m: &RatMap) -> Result<u32, CremonaError> {
    Ok(m.reduce()?.degree())
}

/// A generator of `A^1(P^3 x P^3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ChowBase {
    H1,
    H2,
    /// `H1 + H2`.
    Sum,
}

/// A product of powers of `H1`, `H2` and `H1 + H2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChowExpr {
    pub factors: Vec<(ChowBase, u32)>,
}

impl ChowExpr {
    pub fn new(factors: Vec<(ChowBase, u32)>) -> Self {
        ChowExpr { factors }
    }

    /// `H1^a H2^b`.
    pub fn monomial(a: u32, b: u32) -> Self {
        ChowExpr { factors: vec![(ChowBase::H1, a), (ChowBase::H2, b)] }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.1).sum()
    }

    /// Exchanges `H1` and `H2`.
    pub fn swapped(&self) -> Self {
        let s = |b| match b {
            ChowBase::H1 => ChowBase::H2,
            ChowBase::H2 => ChowBase::H1,
            ChowBase::Sum => ChowBase::Sum,
        };
        ChowExpr { factors: self.factors.iter().map(|&(b, e)| (s(b), e)).collect() }
    }
}

impl fmt::Display for ChowExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|&(b, e)| {
                let base = match b {
                    ChowBase::H1 => "H1",
                    ChowBase::H2 => "H2",
                    ChowBase::Sum => "(H1+H2)",
                };
                if e == 1 {
                    base.to_string()
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        f.write_str(&if parts.is_empty() { "1".to_string() } else { parts.join("*") })
    }
}

impl FromStr for ChowExpr {
    type Err = CremonaError;

    /// Accepts products such as `H1^3*(H1+H2)^3`; spaces are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || CremonaError::ChowParse(s.clone());
        let mut factors = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (base, after) = if let Some(r) = rest.strip_prefix("(H1+H2)").or_else(|| rest.strip_prefix("(H2+H1)")) {
                (ChowBase::Sum, r)
            } else if let Some(r) = rest.strip_prefix("H1") {
                (ChowBase::H1, r)
            } else if let Some(r) = rest.strip_prefix("H2") {
                (ChowBase::H2, r)
            } else {
                return Err(err());
            };
            let (exp, after) = match after.strip_prefix('^') {
                Some(r) => {
                    let n = r.chars().take_while(char::is_ascii_digit).count();
                    (r[..n].parse::<u32>().map_err(|_| err())?, &r[n..])
                }
                None => (1, after),
            };
            factors.push((base, exp));
            rest = match after.strip_prefix('*') {
                Some(r) if !r.is_empty() => r,
                Some(_) => return Err(err()),
                None if after.is_empty() => after,
                None => return Err(err()),
            };
        }
        Ok(ChowExpr { factors })
    }
}

/// Element of `Z[H1, H2] / (H1^4, H2^4)`: `c[i][j]` is the coefficient of `H1^i H2^j`.
type Truncated = [[i64; 4]; 4];

fn truncated_mul(a: &Truncated, b: &Truncated) -> Truncated {
    let mut c = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if a[i][j] == 0 {
                continue;
            }
            for k in 0..4 - i {
                for l in 0..4 - j {
                    c[i + k][j + l] += a[i][j] * b[k][l];
                }
            }
        }
    }
    c
}

/// Degree of `H1^3 H2^3` in `P^3 x P^3` applied to the product: its coefficient
/// after expansion in `Z[H1, H2] / (H1^4, H2^4)`.
pub fn chow_intersect(expr: &ChowExpr) -> Result<i64, CremonaError> {
    if expr.degree() != 6 {
        return Err(CremonaError::ChowDegree(expr.degree()));
    }
    let mut acc: Truncated = [[0; 4]; 4];
    acc[0][0] = 1;
    for &(base, e) in &expr.factors {
        let mut f: Truncated = [[0; 4]; 4];
        match base {
            ChowBase::H1 => f[1][0] = 1,
            ChowBase::H2 => f[0][1] = 1,
            ChowBase::Sum => {
                f[1][0] = 1;
                f[0][1] = 1;
            }
        }
        for _ in 0..e {
            acc = truncated_mul(&acc, &f);
        }
    }
    Ok(acc[3][3])
}

/// `Σ c_k · chow_intersect(e_k)`.
pub fn chow_intersect_sum(terms: &[(i64, ChowExpr)]) -> Result<i64, CremonaError> {
    terms.iter().try_fold(0, |s, (c, e)| Ok(s + c * chow_intersect(e)?))
}

/// Values quoted in the literature for the two products compared below.
pub const LITERATURE_CHOW_VALUES: (i64, i64) = (3, 6);

/// `H1^3 (H1+H2)^3` against `H1^2 H2 (H1+H2)^3`. Their difference separates a
/// cubo-cubic map from a linear one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChowComparison {
    pub h1_cubed: i64,
    pub h1_squared_h2: i64,
    pub differ: bool,
    pub literature_values: (i64, i64),
    pub matches_literature: bool,
}

pub fn chow_comparison() -> ChowComparison {
    let sum3 = (ChowBase::Sum, 3);
    let a = chow_intersect(&ChowExpr::new(vec![(ChowBase::H1, 3), sum3])).expect("degree 6");
    let b = chow_intersect(&ChowExpr::new(vec![(ChowBase::H1, 2), (ChowBase::H2, 1), sum3])).expect("degree 6");
    ChowComparison {
        h1_cubed: a,
        h1_squared_h2: b,
        differ: a != b,
        literature_values: LITERATURE_CHOW_VALUES,
        matches_literature: (a, b) == LITERATURE_CHOW_VALUES,
    }
}

/// `χ(n(h1 + h2)) = n^2 (h1 + h2)^2 / 2 + χ(O_S)` on a K3 surface with
/// `NS = [[4, 6], [6, 4]]`, which must equal `10 n^2 + 2`.
pub fn euler_char_check(n: u64) -> i64 {
    let gram = GramMatrix::binary(4, 6, 4);
    let h = gram.norm(&[1, 1]);
    let n = n as i64;
    let chi = n * n * h / 2 + 2;
    assert_eq!(chi, 10 * n * n + 2, "Riemann–Roch value disagrees with 10n^2 + 2");
    chi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinantal::{random_tensor, Tensor4};

    fn f101() -> Domain {
        Domain::prime_field(101).unwrap()
    }

    fn p(d: Domain, s: &str) -> MPoly {
        MPoly::parse(d, s).unwrap()
    }

    fn smooth_pair(domain: Domain) -> DeterminantalPair {
        (0..)
            .map(|s| DeterminantalPair::new(&random_tensor(s, domain)))
            .find(|p| !p.degenerate)
            .unwrap()
    }

    #[test]
    fn delta_rows_give_constant_map() {
        let d = Domain::Rational;
        let pair = DeterminantalPair::new(&Tensor4::delta(d));
        let (tau, _) = cremona_maps(&pair, DEFAULT_ROWS).unwrap();
        assert_eq!(tau.components()[3], p(d, "-x1*x2*x3"));
        assert!(tau.components()[..3].iter().all(MPoly::is_zero));
        assert!(tau.is_degenerate());
        assert_eq!(map_degree(&tau).unwrap(), 0);
        let (_, sigma) = cremona_maps(&pair, DEFAULT_ROWS).unwrap();
        assert!(matches!(projective_compose_check(&sigma, &tau), Err(CremonaError::Degenerate(_))));
    }

    #[test]
    fn laplace_identity() {
        for seed in 0..5 {
            let pair = DeterminantalPair::new(&random_tensor(seed, Domain::Rational));
            let rows = pair.m.select(&[0, 1, 2], &[0, 1, 2, 3]);
            let tau = kernel_map(&rows).unwrap();
            for r in 0..3 {
                let dot = rows.row(r).iter().zip(tau.components()).fold(MPoly::zero(Domain::Rational), |s, (a, b)| &s + &(a * b));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn seeded_maps_are_cubic_and_invert() {
        for d in [f101(), Domain::Rational] {
            let pair = smooth_pair(d);
            let (tau, sigma) = cremona_maps(&pair, DEFAULT_ROWS).unwrap();
            assert!(tau.is_reduced() && sigma.is_reduced());
            assert_eq!(map_degree(&tau).unwrap(), 3);
            let c = projective_compose_check(&sigma, &tau).unwrap();
            assert!(c.holds);
            assert_eq!(c.factor.as_ref().unwrap().homogeneous_degree(), Some(8));
            assert!(projective_compose_check(&tau, &sigma).unwrap().holds);

            let fw = pushforward_check(&pair.f1, &pair.f2, &tau, 1).unwrap();
            assert!(fw.holds);
            assert_eq!(fw.quotient_degree(), Some(8));
            assert!(pushforward_check(&pair.f2, &pair.f1, &sigma, 1).unwrap().holds);
        }
    }

    #[test]
    fn random_quartic_is_not_a_pushforward() {
        let d = f101();
        let pair = smooth_pair(d);
        let (tau, _) = cremona_maps(&pair, DEFAULT_ROWS).unwrap();
        let other = DeterminantalPair::new(&random_tensor(999, d)).f2;
        let fw = pushforward_check(&pair.f1, &other, &tau, 1).unwrap();
        assert!(!fw.holds && fw.quotient.is_none());
    }

    #[test]
    fn identity_and_linear_maps() {
        let d = Domain::Rational;
        let id_xy = RatMap::identity(d, Block::X, Block::Y);
        let id_yx = RatMap::identity(d, Block::Y, Block::X);
        let c = projective_compose_check(&id_yx, &id_xy).unwrap();
        assert!(c.holds);
        assert!(c.factor.unwrap().is_one());

        let swap = RatMap::new(Block::X, Block::Y, [p(d, "x2"), p(d, "x1"), p(d, "x3"), p(d, "x4")]).unwrap();
        assert_eq!(map_degree(&swap).unwrap(), 1);

        let l = p(d, "x1 + 2*x3 - x4");
        let scaled = Block::X.vars().map(|v| &MPoly::var(d, v) * &l);
        let m = RatMap::new(Block::X, Block::Y, scaled).unwrap();
        assert!(!m.is_reduced());
        assert_eq!(m.degree(), 2);
        assert_eq!(map_degree(&m).unwrap(), 1);
    }

    #[test]
    fn rejects_mixed_degrees() {
        let d = Domain::Rational;
        let comps = [p(d, "x1"), p(d, "x2^2"), p(d, "x3"), p(d, "x4")];
        assert!(RatMap::new(Block::X, Block::Y, comps).is_err());
        let z = MPoly::zero(d);
        assert!(RatMap::new(Block::X, Block::Y, [z.clone(), z.clone(), z.clone(), z]).is_err());
    }

    #[test]
    fn chow_values() {
        assert_eq!(chow_intersect(&ChowExpr::monomial(3, 3)).unwrap(), 1);
        assert_eq!(chow_intersect(&"(H1+H2)^6".parse().unwrap()).unwrap(), 20);
        assert_eq!(chow_intersect(&"H1^4*H2^2".parse().unwrap()).unwrap(), 0);
        assert!(matches!(chow_intersect(&"H1^3".parse().unwrap()), Err(CremonaError::ChowDegree(3))));
        let c = chow_comparison();
        assert_eq!((c.h1_cubed, c.h1_squared_h2), (1, 3));
        assert!(c.differ && !c.matches_literature);
        assert!("H1^*H2".parse::<ChowExpr>().is_err());
        assert_eq!("H1^2 * H2 * (H1+H2)^3".parse::<ChowExpr>().unwrap().to_string(), "H1^2*H2*(H1+H2)^3");
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(euler_char_check(0), 2);
        assert_eq!(euler_char_check(1), 12);
        assert_eq!(euler_char_check(4), 162);
    }
}
