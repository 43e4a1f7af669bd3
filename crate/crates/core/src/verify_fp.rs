//! Brute-force verification over `F_p`: every point of `P^3(F_p)` is visited.
//!
//! Work is split into fixed-size index ranges independent of the thread count,
//! and partial results are concatenated in range order, so the output never
//! depends on scheduling. `QC_THREADS` caps the worker pool.

use std::io::Write;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::algebra::{gradient, is_prime, AlgebraError, Block, Domain, MPoly, Scalar};
use crate::cremona::{cremona_maps, CremonaError, RatMap, DEFAULT_ROWS};
use crate::determinantal::{DeterminantalError, DeterminantalPair, Tensor4};

/// Largest prime accepted for full enumeration.
pub const MAX_ENUMERATION_PRIME: u64 = 1 << 12;

const CHUNK: u64 = 1 << 14;

/// Entries kept per violation list in JSON output; totals are always reported.
pub const JSON_LIST_LIMIT: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large to enumerate (limit {MAX_ENUMERATION_PRIME})")]
    PrimeTooLarge(u64),
    #[error("expected a polynomial over F_{expected}")]
    WrongField { expected: u64 },
    #[error("polynomial must be a nonzero form of degree <= 4 in one block")]
    BadPolynomial,
    #[error("thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Determinantal(#[from] DeterminantalError),
    #[error(transparent)]
    Cremona(#[from] CremonaError),
}

fn check_prime(p: u64) -> Result<(), VerifyError> {
    if !is_prime(p) {
        return Err(VerifyError::NotPrime(p));
    }
    if p > MAX_ENUMERATION_PRIME {
        return Err(VerifyError::PrimeTooLarge(p));
    }
    Ok(())
}

/// A point of `P^3(F_p)` whose first nonzero coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    p: u64,
    coords: [u64; 4],
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl ProjPoint {
    /// Scales a nonzero vector into canonical form.
    pub fn canonical(p: u64, v: [u64; 4]) -> Option<ProjPoint> {
        let lead = v.iter().position(|&c| c % p != 0)?;
        let inv = inv_mod(v[lead] % p, p);
        Some(ProjPoint { p, coords: v.map(|c| c % p * inv % p) })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coords(&self) -> [u64; 4] {
        self.coords
    }

    pub fn as_scalars(&self) -> [Scalar; 4] {
        self.coords.map(Scalar::Residue)
    }

    /// Position in [`proj_points`] order.
    pub fn index(&self) -> u64 {
        let p = self.p;
        let lead = self.coords.iter().position(|&c| c != 0).expect("nonzero");
        let offset: u64 = (lead + 1..4).map(|k| p.pow((3 - k) as u32)).sum();
        let tail = self.coords[lead + 1..].iter().fold(0, |acc, &c| acc * p + c);
        offset + tail
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::algebra::mod_inv(a, p).expect("nonzero residue")
}

/// `p^3 + p^2 + p + 1`.
pub fn point_count(p: u64) -> u64 {
    p * p * p + p * p + p + 1
}

/// The `idx`-th canonical point in lexicographic order of coordinates:
/// first `[0:0:0:1]`, then the `p` points `[0:0:1:*]`, then `[0:1:*:*]`, then `[1:*:*:*]`.
pub fn point_at(p: u64, idx: u64) -> ProjPoint {
    let mut rest = idx;
    for lead in (0..4).rev() {
        let size = p.pow((3 - lead) as u32);
        if rest < size {
            let mut coords = [0u64; 4];
            coords[lead] = 1;
            let mut t = rest;
            for k in (lead + 1..4).rev() {
                coords[k] = t % p;
                t /= p;
            }
            return ProjPoint { p, coords };
        }
        rest -= size;
    }
    panic!("index {idx} out of range for p = {p}");
}

pub fn proj_points(p: u64) -> Result<Vec<ProjPoint>, VerifyError> {
    check_prime(p)?;
    Ok((0..point_count(p)).map(|i| point_at(p, i)).collect())
}

/// Dense evaluator for a form in one coordinate block over `F_p`.
#[derive(Clone, Debug)]
pub struct FpPoly {
    p: u64,
    terms: Vec<(u64, [usize; 4])>,
}

impl FpPoly {
    pub fn new(f: &MPoly, block: Block) -> Result<Self, VerifyError> {
        let Domain::PrimeField(p) = f.domain() else {
            return Err(VerifyError::WrongField { expected: 0 });
        };
        if !f.in_block(block) || f.total_degree().unwrap_or(0) > 4 {
            return Err(VerifyError::BadPolynomial);
        }
        let vars = block.vars();
        let terms = f
            .terms()
            .map(|(m, c)| {
                let Scalar::Residue(r) = c else { unreachable!("prime-field polynomial") };
                (*r, vars.map(|v| m.exponent(v) as usize))
            })
            .collect();
        Ok(FpPoly { p, terms })
    }

    /// `pw[v][e] = a_v^e`.
    #[inline]
    pub fn eval_powers(&self, pw: &[[u64; 5]; 4]) -> u64 {
        let p = self.p;
        let mut s = 0u64;
        for (c, e) in &self.terms {
            let t = c * pw[0][e[0]] % p * pw[1][e[1]] % p * pw[2][e[2]] % p * pw[3][e[3]] % p;
            s += t;
            if s >= p {
                s -= p;
            }
        }
        s
    }

    pub fn eval(&self, a: &[u64; 4]) -> u64 {
        self.eval_powers(&powers(self.p, a))
    }
}

pub fn powers(p: u64, a: &[u64; 4]) -> [[u64; 5]; 4] {
    a.map(|x| {
        let mut r = [1u64; 5];
        for e in 1..5 {
            r[e] = r[e - 1] * x % p;
        }
        r
    })
}

/// Numeric `A(a)` for `A` a 4x4 matrix of linear forms given by coefficients
/// `coef[i][j][k]`: entry `(i, j)` is `Σ_k coef[i][j][k] a_k`.
fn eval_linear_matrix(p: u64, coef: &[[[u64; 4]; 4]; 4], a: &[u64; 4]) -> [[u64; 4]; 4] {
    let mut m = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| coef[i][j][k] * a[k]).sum::<u64>() % p;
        }
    }
    m
}

/// Row-reduces in place with pivots chosen by fixed index order; returns the pivot columns.
fn row_reduce(p: u64, m: &mut [[u64; 4]; 4]) -> Vec<usize> {
    let mut pivots = Vec::with_capacity(4);
    let mut r = 0;
    for c in 0..4 {
        let Some(pr) = (r..4).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for k in 0..4 {
            m[r][k] = m[r][k] * inv % p;
        }
        for i in 0..4 {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..4 {
                    m[i][k] = (m[i][k] + p * p - f * m[r][k] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_mod_p(p: u64, m: &[[u64; 4]; 4]) -> usize {
    let mut m = *m;
    row_reduce(p, &mut m).len()
}

/// The kernel line of a rank-3 matrix, canonically scaled; `None` for other ranks.
pub fn kernel_point(p: u64, m: &[[u64; 4]; 4]) -> Option<ProjPoint> {
    let mut m = *m;
    let pivots = row_reduce(p, &mut m);
    if pivots.len() != 3 {
        return None;
    }
    let free = (0..4).find(|c| !pivots.contains(c)).expect("one free column");
    let mut v = [0u64; 4];
    v[free] = 1;
    for (row, &c) in pivots.iter().enumerate() {
        v[c] = (p - m[row][free]) % p;
    }
    ProjPoint::canonical(p, v)
}

fn pool() -> Result<rayon::ThreadPool, VerifyError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("QC_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| VerifyError::Threads(e.to_string()))
}

/// Runs `f` on each fixed index range of `P^3(F_p)` and returns the results in range order.
fn for_ranges<T: Send>(p: u64, f: impl Fn(std::ops::Range<u64>) -> T + Sync) -> Result<Vec<T>, VerifyError> {
    let total = point_count(p);
    let n = total.div_ceil(CHUNK);
    let pool = pool()?;
    Ok(pool.install(|| (0..n).into_par_iter().map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(total))).collect()))
}

/// Points of `F = 0` and the singular ones among them.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SmoothReport {
    pub prime: u64,
    pub points_on_surface: u64,
    pub singular_points: Vec<ProjPoint>,
}

impl SmoothReport {
    pub fn is_smooth(&self) -> bool {
        self.singular_points.is_empty()
    }
}

/// Jacobian criterion at every `F_p`-point: singular iff `F` and all four partials vanish.
pub fn smooth_check(f: &MPoly, p: u64) -> Result<SmoothReport, VerifyError> {
    check_prime(p)?;
    if f.domain() != Domain::PrimeField(p) {
        return Err(VerifyError::WrongField { expected: p });
    }
    if f.is_zero() || !f.is_homogeneous() {
        return Err(VerifyError::BadPolynomial);
    }
    let block = [Block::X, Block::Y].into_iter().find(|&b| f.in_block(b)).ok_or(VerifyError::BadPolynomial)?;
    let fe = FpPoly::new(f, block)?;
    let grad: Vec<FpPoly> = gradient(f, block).iter().map(|g| FpPoly::new(g, block)).collect::<Result<_, _>>()?;
    let parts = for_ranges(p, |range| {
        let mut on = 0u64;
        let mut sing = Vec::new();
        for idx in range {
            let a = point_at(p, idx);
            let pw = powers(p, &a.coords);
            if fe.eval_powers(&pw) == 0 {
                on += 1;
                if grad.iter().all(|g| g.eval_powers(&pw) == 0) {
                    sing.push(a);
                }
            }
        }
        (on, sing)
    })?;
    let mut rep = SmoothReport { prime: p, ..Default::default() };
    for (on, sing) in parts {
        rep.points_on_surface += on;
        rep.singular_points.extend(sing);
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankViolation {
    pub point: ProjPoint,
    pub rank: usize,
    pub on_surface: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RankReport {
    pub prime: u64,
    pub points_on_surface: u64,
    pub violations: Vec<RankViolation>,
}

/// Coefficients of `M`: `coef[i][j][k] = a_ijk`.
fn m_coefficients(t: &[u64]) -> [[[u64; 4]; 4]; 4] {
    let mut c = [[[0u64; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j][k] = t[i * 16 + j * 4 + k];
            }
        }
    }
    c
}

/// Coefficients of `N`: `coef[i][k][j] = a_ijk`.
fn n_coefficients(t: &[u64]) -> [[[u64; 4]; 4]; 4] {
    let mut c = [[[0u64; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][k][j] = t[i * 16 + j * 4 + k];
            }
        }
    }
    c
}

/// Reduces the tensor to `F_p` and builds its determinantal pair, refusing degenerate input.
fn prepare(t: &Tensor4, p: u64) -> Result<(Tensor4, DeterminantalPair), VerifyError> {
    check_prime(p)?;
    let t = t.to_domain(Domain::PrimeField(p))?;
    let pair = DeterminantalPair::new(&t);
    pair.require_nondegenerate()?;
    Ok((t, pair))
}

/// `rank M(a) = 4` off `S1` and `= 3` on `S1`, where membership in `S1` is decided by
/// evaluating the symbolic `det M(x)`.
pub fn rank_profile(t: &Tensor4, p: u64) -> Result<RankReport, VerifyError> {
    let (t, pair) = prepare(t, p)?;
    let coef = m_coefficients(&t.residues().expect("F_p tensor"));
    let f1 = FpPoly::new(&pair.f1, Block::X)?;
    let parts = for_ranges(p, |range| {
        let mut on = 0u64;
        let mut bad = Vec::new();
        for idx in range {
            let a = point_at(p, idx);
            let zero = f1.eval(&a.coords) == 0;
            let rank = rank_mod_p(p, &eval_linear_matrix(p, &coef, &a.coords));
            on += zero as u64;
            if rank != if zero { 3 } else { 4 } {
                bad.push(RankViolation { point: a, rank, on_surface: zero });
            }
        }
        (on, bad)
    })?;
    let mut rep = RankReport { prime: p, ..Default::default() };
    for (on, bad) in parts {
        rep.points_on_surface += on;
        rep.violations.extend(bad);
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberViolation {
    /// The kernel of the matrix at a surface point is not a single point.
    KernelDimension { point: ProjPoint, rank: usize },
    /// The kernel point does not lie on the other surface.
    OffTarget { point: ProjPoint, image: ProjPoint },
    /// The minors are defined at the point but disagree with the kernel.
    MinorsDisagree { point: ProjPoint, kernel: ProjPoint, minors: ProjPoint },
    /// Going there and back does not return to the start.
    NotInverse { point: ProjPoint, image: ProjPoint, back: Option<ProjPoint> },
}

/// Outcome of the full finite-field comparison of `S1` and `S2`.
#[derive(Clone, Debug, Serialize)]
pub struct FpCertificate {
    pub prime: u64,
    pub counts: (u64, u64),
    pub singular_s1: Vec<ProjPoint>,
    pub singular_s2: Vec<ProjPoint>,
    pub rank_violations_s1: Vec<RankViolation>,
    pub rank_violations_s2: Vec<RankViolation>,
    pub fiber_violations: Vec<FiberViolation>,
    /// Points of `S1` where all minors defining `τ` vanish; the kernel of `M(a)` is used there.
    pub tau_base_points: u64,
    pub sigma_base_points: u64,
    pub bijection: bool,
    pub pass: bool,
}

fn truncated<T: Serialize>(v: &[T]) -> Value {
    json!({
        "total": v.len(),
        "shown": v.iter().take(JSON_LIST_LIMIT).collect::<Vec<_>>(),
    })
}

impl FpCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "prime": self.prime,
            "counts": [self.counts.0, self.counts.1],
            "singular_s1": truncated(&self.singular_s1),
            "singular_s2": truncated(&self.singular_s2),
            "rank_violations_s1": truncated(&self.rank_violations_s1),
            "rank_violations_s2": truncated(&self.rank_violations_s2),
            "fiber_violations": truncated(&self.fiber_violations),
            "tau_base_points": self.tau_base_points,
            "sigma_base_points": self.sigma_base_points,
            "bijection": self.bijection,
            "verdict": if self.pass { "PASS" } else { "FAIL" },
        })
    }
}

/// What one side of the correspondence records at a surface point.
struct Side {
    f: FpPoly,
    grad: Vec<FpPoly>,
    coef: [[[u64; 4]; 4]; 4],
    minors: Vec<FpPoly>,
}

#[derive(Default)]
struct SidePart {
    count: u64,
    singular: Vec<ProjPoint>,
    rank_bad: Vec<RankViolation>,
    fiber_bad: Vec<FiberViolation>,
    base: u64,
    /// `(point, kernel point)` for each surface point with a 1-dimensional kernel.
    map: Vec<(ProjPoint, ProjPoint)>,
}

impl Side {
    fn new(f: &MPoly, block: Block, coef: [[[u64; 4]; 4]; 4], map: &RatMap) -> Result<Self, VerifyError> {
        Ok(Side {
            f: FpPoly::new(f, block)?,
            grad: gradient(f, block).iter().map(|g| FpPoly::new(g, block)).collect::<Result<_, _>>()?,
            coef,
            minors: map.components().iter().map(|c| FpPoly::new(c, block)).collect::<Result<_, _>>()?,
        })
    }

    fn visit(&self, p: u64, a: ProjPoint, out: &mut SidePart) {
        let pw = powers(p, &a.coords);
        let on = self.f.eval_powers(&pw) == 0;
        let m = eval_linear_matrix(p, &self.coef, &a.coords);
        let rank = rank_mod_p(p, &m);
        if rank != if on { 3 } else { 4 } {
            out.rank_bad.push(RankViolation { point: a, rank, on_surface: on });
        }
        if !on {
            return;
        }
        out.count += 1;
        if self.grad.iter().all(|g| g.eval_powers(&pw) == 0) {
            out.singular.push(a);
        }
        let Some(k) = kernel_point(p, &m) else {
            out.fiber_bad.push(FiberViolation::KernelDimension { point: a, rank });
            return;
        };
        let minors: [u64; 4] = std::array::from_fn(|j| self.minors[j].eval_powers(&pw));
        match ProjPoint::canonical(p, minors) {
            None => out.base += 1,
            Some(mp) if mp != k => out.fiber_bad.push(FiberViolation::MinorsDisagree { point: a, kernel: k, minors: mp }),
            Some(_) => {}
        }
        out.map.push((a, k));
    }
}

fn merge(parts: Vec<SidePart>) -> SidePart {
    let mut all = SidePart::default();
    for p in parts {
        all.count += p.count;
        all.singular.extend(p.singular);
        all.rank_bad.extend(p.rank_bad);
        all.fiber_bad.extend(p.fiber_bad);
        all.base += p.base;
        all.map.extend(p.map);
    }
    all
}

/// Enumerates `P^3(F_p)` once for each surface and compares the two sides.
///
/// For `a ∈ S1(F_p)` the image is the kernel of `M(a)`, which the minors of the
/// first three rows reproduce wherever they do not all vanish. Points where they
/// all vanish lie on the base curve of `τ` and are counted separately. The map
/// must land in `S2(F_p)`, be inverted by `b ↦ ker N(b)`, and hit every point
/// of `S2(F_p)` exactly once.
pub fn correspondence_check(t: &Tensor4, p: u64) -> Result<FpCertificate, VerifyError> {
    let (t, pair) = prepare(t, p)?;
    let res = t.residues().expect("F_p tensor");
    let (tau, sigma) = cremona_maps(&pair, DEFAULT_ROWS)?;
    let s1 = Side::new(&pair.f1, Block::X, m_coefficients(&res), &tau)?;
    let s2 = Side::new(&pair.f2, Block::Y, n_coefficients(&res), &sigma)?;
    let parts = for_ranges(p, |range| {
        let mut a_part = SidePart::default();
        let mut b_part = SidePart::default();
        for idx in range {
            let a = point_at(p, idx);
            s1.visit(p, a, &mut a_part);
            s2.visit(p, a, &mut b_part);
        }
        (a_part, b_part)
    })?;
    let (pa, pb): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    let side1 = merge(pa);
    let side2 = merge(pb);

    let mut fiber_violations = side1.fiber_bad.clone();
    fiber_violations.extend(side2.fiber_bad.iter().copied());
    // side2.map is sorted by point (enumeration order), so lookups can bisect.
    let back = |b: &ProjPoint| side2.map.binary_search_by(|(x, _)| x.index().cmp(&b.index())).ok().map(|i| side2.map[i].1);
    let on_s2 = |b: &ProjPoint| s2.f.eval(&b.coords) == 0;
    for &(a, b) in &side1.map {
        if !on_s2(&b) {
            fiber_violations.push(FiberViolation::OffTarget { point: a, image: b });
            continue;
        }
        let r = back(&b);
        if r != Some(a) {
            fiber_violations.push(FiberViolation::NotInverse { point: a, image: b, back: r });
        }
    }
    let mut images: Vec<ProjPoint> = side1.map.iter().map(|&(_, b)| b).collect();
    images.sort_by_key(ProjPoint::index);
    let injective = images.windows(2).all(|w| w[0] != w[1]);
    let s2_list: Vec<ProjPoint> = side2.map.iter().map(|&(b, _)| b).collect();
    let bijection = injective
        && side1.map.len() as u64 == side1.count
        && side2.map.len() as u64 == side2.count
        && images == s2_list;

    let pass = bijection
        && side1.count == side2.count
        && side1.singular.is_empty()
        && side2.singular.is_empty()
        && side1.rank_bad.is_empty()
        && side2.rank_bad.is_empty()
        && fiber_violations.is_empty();
    Ok(FpCertificate {
        prime: p,
        counts: (side1.count, side2.count),
        singular_s1: side1.singular,
        singular_s2: side2.singular,
        rank_violations_s1: side1.rank_bad,
        rank_violations_s2: side2.rank_bad,
        fiber_violations,
        tau_base_points: side1.base,
        sigma_base_points: side2.base,
        bijection,
        pass,
    })
}

/// Writes points as CSV with header `x1,x2,x3,x4`.
pub fn write_points_csv(w: &mut impl Write, points: &[ProjPoint]) -> std::io::Result<()> {
    writeln!(w, "x1,x2,x3,x4")?;
    for pt in points {
        let [a, b, c, d] = pt.coords;
        writeln!(w, "{a},{b},{c},{d}")?;
    }
    Ok(())
}

/// Points of `F = 0` in enumeration order.
pub fn surface_points(f: &MPoly, p: u64) -> Result<Vec<ProjPoint>, VerifyError> {
    check_prime(p)?;
    let block = [Block::X, Block::Y].into_iter().find(|&b| f.in_block(b)).ok_or(VerifyError::BadPolynomial)?;
    let fe = FpPoly::new(f, block)?;
    let parts = for_ranges(p, |range| range.map(|i| point_at(p, i)).filter(|a| fe.eval(&a.coords) == 0).collect::<Vec<_>>())?;
    Ok(parts.into_iter().flatten().collect())
}
