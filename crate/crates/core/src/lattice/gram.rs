//! Gram matrices, Smith normal form and discriminant groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::LatticeError;

/// Symmetric integer matrix `((h_i, h_j))` of rank 2 to 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    entries: Vec<Vec<i64>>,
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = entries.len();
        if !(2..=4).contains(&n) {
            return Err(LatticeError::UnsupportedRank(n));
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        Ok(GramMatrix { entries })
    }

    /// `[[a, b], [b, c]]`.
    pub fn binary(a: i64, b: i64, c: i64) -> Self {
        GramMatrix { entries: vec![vec![a, b], vec![b, c]] }
    }

    /// `[[4, 4l], [4l, 4]]`.
    pub fn ell_family(l: i64) -> Self {
        Self::binary(4, 4 * l, 4)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries.iter().flatten().map(|e| e.abs()).max().unwrap_or(0)
    }

    pub fn det(&self) -> i64 {
        let m: Vec<Vec<i128>> = self.entries.iter().map(|r| r.iter().map(|&e| e as i128).collect()).collect();
        i64::try_from(det_i128(&m)).expect("determinant fits in i64")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.entries[i][i] % 2 == 0)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.det() != 0
    }

    /// `u^t A v`.
    pub fn pair(&self, u: &[i64], v: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0i128;
        for i in 0..n {
            for j in 0..n {
                s += u[i] as i128 * self.entries[i][j] as i128 * v[j] as i128;
            }
        }
        i64::try_from(s).expect("pairing fits in i64")
    }

    pub fn norm(&self, v: &[i64]) -> i64 {
        self.pair(v, v)
    }

    pub fn pair_rational(&self, u: &[BigRational], v: &[BigRational]) -> BigRational {
        let n = self.rank();
        let mut s = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                if self.entries[i][j] != 0 {
                    s += &u[i] * &v[j] * BigRational::from_integer(self.entries[i][j].into());
                }
            }
        }
        s
    }

    pub fn basis_vector(&self, i: usize) -> Vec<i64> {
        (0..self.rank()).map(|j| (i == j) as i64).collect()
    }

    /// `A v` over the integers.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.entries.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

pub(crate) fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &e)| e).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i128(&minor)
            })
            .sum(),
    }
}

/// `U A V = D` with `U`, `V` unimodular and `d_1 | d_2 | ...` on the diagonal of `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len))).map(|i| self.d[i][i]).collect()
    }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

fn narrow(m: Vec<Vec<i128>>) -> Vec<Vec<i64>> {
    m.into_iter().map(|r| r.into_iter().map(|e| i64::try_from(e).expect("Smith form entry fits in i64")).collect()).collect()
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> Snf {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&e| e as i128).collect()).collect();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let swap_rows = |m: &mut Vec<Vec<i128>>, i: usize, j: usize| m.swap(i, j);
    let swap_cols = |m: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for r in m.iter_mut() {
            r.swap(i, j);
        }
    };
    // row_i += q * row_j
    let add_row = |m: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for c in 0..m[i].len() {
            let t = m[j][c];
            m[i][c] += q * t;
        }
    };
    let add_col = |m: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for r in m.iter_mut() {
            let t = r[j];
            r[i] += q * t;
        }
    };

    // Nearest quotient, so remainders stay within half the pivot and the
    // transforms stay small.
    let quot = |a: i128, b: i128| Integer::div_floor(&(2 * a + b.abs()), &(2 * b.abs())) * b.signum();

    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| d[i][j] != 0)
                .min_by_key(|&(i, j)| (d[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            swap_rows(&mut d, t, pi);
            swap_rows(&mut u, t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = quot(d[i][t], d[t][t]);
                if q != 0 {
                    add_row(&mut d, i, t, -q);
                    add_row(&mut u, i, t, -q);
                }
                clean &= d[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = quot(d[t][j], d[t][t]);
                if q != 0 {
                    add_col(&mut d, j, t, -q);
                    add_col(&mut v, j, t, -q);
                }
                clean &= d[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and start over.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| d[i][j] % d[t][t] != 0));
            match bad {
                Some(i) => {
                    add_row(&mut d, t, i, 1);
                    add_row(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            for c in 0..cols {
                d[t][c] = -d[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
    }
    Snf { u: narrow(u), d: narrow(d), v: narrow(v) }
}

/// Reduces a rational into `[0, m)`.
pub fn reduce_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(m.into());
    let q = (x / &m).floor();
    x - q * m
}

/// `NS^* / NS` with its discriminant form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscGroup {
    /// `d_1 | d_2 | ...`, all greater than 1.
    pub invariant_factors: Vec<i64>,
    /// Generator `g_i` of order `d_i`, in lattice coordinates, reduced into `[0, 1)^n`.
    #[serde(serialize_with = "super::certificate::ser_rational_matrix")]
    pub generators: Vec<Vec<BigRational>>,
    /// `q(g_i) mod 2Z` in `[0, 2)`.
    #[serde(serialize_with = "super::certificate::ser_rational_vec")]
    pub quadratic_values: Vec<BigRational>,
    /// `b(g_i, g_j) mod Z` in `[0, 1)`.
    #[serde(serialize_with = "super::certificate::ser_rational_matrix")]
    pub bilinear_values: Vec<Vec<BigRational>>,
    #[serde(skip)]
    gram: GramMatrix,
    /// Rows of `U` for the kept factors: coordinates of `x` are `(U A x)_i mod d_i`.
    #[serde(skip)]
    coord_rows: Vec<Vec<i64>>,
}

impl DiscGroup {
    pub fn order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// Coordinates of a dual-lattice vector `x` in the generator basis, each modulo `d_i`.
    pub fn coordinates(&self, x: &[BigRational]) -> Result<Vec<i64>, LatticeError> {
        let ax: Vec<BigRational> = (0..self.gram.rank())
            .map(|i| {
                (0..self.gram.rank())
                    .map(|j| x[j].clone() * BigRational::from_integer(self.gram.get(i, j).into()))
                    .fold(BigRational::zero(), |s, t| s + t)
            })
            .collect();
        if ax.iter().any(|c| !c.is_integer()) {
            return Err(LatticeError::NotInDual);
        }
        Ok(self
            .coord_rows
            .iter()
            .zip(&self.invariant_factors)
            .map(|(row, &d)| {
                let w: BigInt = row.iter().zip(&ax).map(|(&r, c)| BigInt::from(r) * c.to_integer()).sum();
                i64::try_from(w.mod_floor(&BigInt::from(d))).expect("coordinate below d")
            })
            .collect())
    }

    /// `sum_i c_i g_i`, reduced modulo the lattice.
    pub fn element(&self, coords: &[i64]) -> Vec<BigRational> {
        let n = self.gram.rank();
        let v = (0..n).map(|j| {
            coords
                .iter()
                .zip(&self.generators)
                .map(|(&c, g)| &g[j] * BigRational::from_integer(c.into()))
                .fold(BigRational::zero(), |s, t| s + t)
        });
        v.map(|c| reduce_mod(&c, 1)).collect()
    }
}

pub fn discriminant_group(a: &GramMatrix) -> Result<DiscGroup, LatticeError> {
    if !a.is_nondegenerate() {
        return Err(LatticeError::Degenerate);
    }
    let n = a.rank();
    let snf = smith_normal_form(a.entries());
    let diag = snf.diagonal();
    let mut invariant_factors = Vec::new();
    let mut generators = Vec::new();
    let mut coord_rows = Vec::new();
    for (i, &d) in diag.iter().enumerate() {
        if d == 1 {
            continue;
        }
        let g: Vec<BigRational> =
            (0..n).map(|r| reduce_mod(&BigRational::new(snf.v[r][i].into(), d.into()), 1)).collect();
        invariant_factors.push(d);
        generators.push(g);
        coord_rows.push(snf.u[i].clone());
    }
    let quadratic_values = generators.iter().map(|g| reduce_mod(&a.pair_rational(g, g), 2)).collect();
    let bilinear_values = generators
        .iter()
        .map(|g| generators.iter().map(|h| reduce_mod(&a.pair_rational(g, h), 1)).collect())
        .collect();
    Ok(DiscGroup { invariant_factors, generators, quadratic_values, bilinear_values, gram: a.clone(), coord_rows })
}

/// Action of an isometry on the discriminant group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscAction {
    /// Image of each generator, reduced modulo the lattice.
    #[serde(serialize_with = "super::certificate::ser_rational_matrix")]
    pub images: Vec<Vec<BigRational>>,
    /// Column `i` holds the coordinates of the image of `g_i`; row `j` is taken mod `d_j`.
    pub matrix: Vec<Vec<i64>>,
    pub is_plus_minus_id: bool,
    #[serde(skip)]
    factors: Vec<i64>,
}

impl DiscAction {
    fn from_matrix(factors: Vec<i64>, matrix: Vec<Vec<i64>>, group: &DiscGroup) -> Self {
        let k = factors.len();
        let is_sign = |s: i64| (0..k).all(|i| (0..k).all(|j| matrix[j][i] == (s * (i == j) as i64).rem_euclid(factors[j])));
        let is_plus_minus_id = is_sign(1) || is_sign(-1);
        let images = (0..k).map(|i| group.element(&(0..k).map(|j| matrix[j][i]).collect::<Vec<_>>())).collect();
        DiscAction { images, matrix, is_plus_minus_id, factors }
    }

    /// The action of `self ∘ other`.
    pub fn compose(&self, other: &DiscAction, group: &DiscGroup) -> DiscAction {
        let k = self.factors.len();
        let m = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| {
                        let s: i128 = (0..k).map(|l| self.matrix[j][l] as i128 * other.matrix[l][i] as i128).sum();
                        s.rem_euclid(self.factors[j] as i128) as i64
                    })
                    .collect()
            })
            .collect();
        DiscAction::from_matrix(self.factors.clone(), m, group)
    }
}

pub fn disc_action(group: &DiscGroup, g: &super::IsometryMatrix) -> Result<DiscAction, LatticeError> {
    if !g.preserves(&group.gram) {
        return Err(LatticeError::NotIsometry);
    }
    let n = group.gram.rank();
    let k = group.invariant_factors.len();
    let mut matrix = vec![vec![0i64; k]; k];
    for (i, gen) in group.generators.iter().enumerate() {
        let image: Vec<BigRational> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| &gen[c] * BigRational::from_integer(g.get(r, c).into()))
                    .fold(BigRational::zero(), |s, t| s + t)
            })
            .collect();
        for (j, c) in group.coordinates(&image)?.into_iter().enumerate() {
            matrix[j][i] = c;
        }
    }
    Ok(DiscAction::from_matrix(group.invariant_factors.clone(), matrix, group))
}
