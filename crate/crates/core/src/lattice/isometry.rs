//! Isometries of integral lattices sending one vector to another.

use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::{GramMatrix, LatticeError};

/// Integer matrix `G` with `G^t A G = A`, acting on column coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsometryMatrix {
    g: Vec<Vec<i64>>,
}

impl Serialize for IsometryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.g.serialize(s)
    }
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn is_isometry(a: &GramMatrix, g: &[Vec<i64>]) -> bool {
    mul(&mul(&transpose(g), a.entries()), g) == a.entries()
}

impl IsometryMatrix {
    pub fn new(a: &GramMatrix, g: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = a.rank();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape(format!("isometry must be {n}x{n}")));
        }
        let m = IsometryMatrix { g };
        if !is_isometry(a, &m.g) || m.det().abs() != 1 {
            return Err(LatticeError::NotIsometry);
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        IsometryMatrix { g: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    pub fn rank(&self) -> usize {
        self.g.len()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.g[r][c]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.g
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        self.g.iter().map(|r| r[c]).collect()
    }

    pub fn preserves(&self, a: &GramMatrix) -> bool {
        self.rank() == a.rank() && is_isometry(a, &self.g)
    }

    pub fn det(&self) -> i64 {
        let m: Vec<Vec<i128>> = self.g.iter().map(|r| r.iter().map(|&e| e as i128).collect()).collect();
        super::gram::det_i128(&m) as i64
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.g.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IsometryMatrix) -> IsometryMatrix {
        IsometryMatrix { g: mul(&self.g, &other.g) }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }

    pub fn is_minus_identity(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (0..n).all(|j| self.g[i][j] == -((i == j) as i64)))
    }

    /// Order of `G` when finite. Finite-order elements of `GL_n(Z)` for
    /// `n <= 4` have order at most 12.
    pub fn finite_order(&self) -> Option<u32> {
        let mut p = self.clone();
        for k in 1..=12 {
            if p.is_identity() {
                return Some(k);
            }
            p = p.compose(self);
        }
        None
    }
}

/// `(g, x, y)` with `a x + b y = g >= 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Exact solution of `G u = v`, `G^t A G = A` for rank 2.
///
/// With `u` primitive, `P = [u | p]` is unimodular and `G P = [v | w]` must be an
/// isometry from `P^t A P` to `A`. The inner product with `v` and the determinant
/// condition are linear in `w`; the norm of `w` then cuts out the solutions.
/// Returns `None` when the method does not apply (`u = 0` or `A` degenerate).
pub fn rank2_exact(a: &GramMatrix, u: &[i64], v: &[i64]) -> Option<Vec<IsometryMatrix>> {
    if a.rank() != 2 || !a.is_nondegenerate() {
        return None;
    }
    let g = u[0].gcd(&u[1]);
    if g == 0 {
        return None;
    }
    if v[0] % g != 0 || v[1] % g != 0 {
        return Some(Vec::new());
    }
    let (u0, u1, v0, v1) = (u[0] / g, u[1] / g, v[0] / g, v[1] / g);
    if a.norm(&[u0, u1]) != a.norm(&[v0, v1]) {
        return Some(Vec::new());
    }
    let (_, x, y) = ext_gcd(u0, u1);
    // P = [[u0, -y], [u1, x]], det P = 1, P^-1 = [[x, y], [-u1, u0]].
    let p = vec![vec![u0, -y], vec![u1, x]];
    let p_inv = vec![vec![x, y], vec![-u1, u0]];
    let ap = mul(&mul(&transpose(&p), a.entries()), &p);
    let (a11, a12, a22) = (ap[0][0], ap[0][1], ap[1][1]);
    let av = a.apply(&[v0, v1]);

    let mut found = Vec::new();
    for delta in [1i64, -1] {
        let mut ws: Vec<[i64; 2]> = Vec::new();
        if a11 != 0 {
            // [[av0, av1], [-v1, v0]] w = [a12, delta], determinant a11.
            let n0 = a12 * v0 - av[1] * delta;
            let n1 = av[0] * delta + v1 * a12;
            if n0 % a11 == 0 && n1 % a11 == 0 {
                ws.push([n0 / a11, n1 / a11]);
            }
        } else {
            // v isotropic: A v = lambda (-v1, v0) and the two linear equations coincide.
            let lambda = if v0 != 0 { av[1] / v0 } else { -av[0] / v1 };
            if lambda * delta == a12 {
                let (_, xp, yp) = ext_gcd(v0, v1);
                let wp = [-yp * delta, xp * delta];
                let rest = a22 - a.norm(&wp);
                if rest % (2 * a12) == 0 {
                    let k = rest / (2 * a12);
                    ws.push([wp[0] + k * v0, wp[1] + k * v1]);
                }
            }
        }
        for w in ws {
            if a.norm(&w) != a22 {
                continue;
            }
            let gp = vec![vec![v0, w[0]], vec![v1, w[1]]];
            if let Ok(m) = IsometryMatrix::new(a, mul(&gp, &p_inv)) {
                found.push(m);
            }
        }
    }
    found.sort();
    found.dedup();
    Some(found)
}

/// Every isometry with entries in `[-bound, bound]` sending `u` to `v`, found by
/// backtracking over columns under the inner-product constraints.
pub fn bounded_isometry_search(a: &GramMatrix, u: &[i64], v: &[i64], bound: i64) -> Vec<IsometryMatrix> {
    let n = a.rank();
    let candidates: Vec<Vec<i64>> = {
        let mut all = vec![Vec::new()];
        for _ in 0..n {
            all = all
                .into_iter()
                .flat_map(|p: Vec<i64>| (-bound..=bound).map(move |e| [p.clone(), vec![e]].concat()))
                .collect();
        }
        all
    };
    let mut out = Vec::new();
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
    fn rec(
        a: &GramMatrix,
        u: &[i64],
        v: &[i64],
        candidates: &[Vec<i64>],
        cols: &mut Vec<Vec<i64>>,
        out: &mut Vec<IsometryMatrix>,
    ) {
        let n = a.rank();
        let i = cols.len();
        if i == n {
            let g: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect();
            let m = IsometryMatrix { g };
            if m.apply(u) == v && m.det().abs() == 1 {
                out.push(m);
            }
            return;
        }
        for c in candidates {
            if a.norm(c) != a.get(i, i) {
                continue;
            }
            if (0..i).all(|j| a.pair(&cols[j], c) == a.get(j, i)) {
                cols.push(c.clone());
                rec(a, u, v, candidates, cols, out);
                cols.pop();
            }
        }
    }
    rec(a, u, v, &candidates, &mut cols, &mut out);
    out.sort();
    out
}

/// All isometries of `A` with `G u = v`.
///
/// For rank 2 the exact solver makes the list complete independently of
/// `entry_bound`; the bounded search runs alongside as a cross-check and any
/// disagreement is a bug. Higher ranks rely on the bounded search alone.
pub fn isometries_mapping(a: &GramMatrix, u: &[i64], v: &[i64], entry_bound: i64) -> Vec<IsometryMatrix> {
    let searched = bounded_isometry_search(a, u, v, entry_bound);
    match rank2_exact(a, u, v) {
        Some(exact) => {
            debug_assert!(searched.iter().all(|g| exact.contains(g)), "bounded search found an isometry the exact solver missed");
            exact
        }
        None => searched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn second_columns(list: &[IsometryMatrix]) -> Vec<(i64, i64)> {
        let mut v: Vec<_> = list.iter().map(|g| (g.get(0, 1), g.get(1, 1))).collect();
        v.sort();
        v
    }

    #[test]
    fn ell_family_candidates() {
        for l in 2..=12 {
            let a = GramMatrix::ell_family(l);
            let list = isometries_mapping(&a, &[1, 0], &[0, 1], 4 * l);
            assert_eq!(second_columns(&list), vec![(-1, 2 * l), (1, 0)]);
        }
    }

    #[test]
    fn exact_and_bounded_agree() {
        let a = GramMatrix::binary(4, 6, 4);
        let exact = rank2_exact(&a, &[1, 0], &[0, 1]).unwrap();
        let searched = bounded_isometry_search(&a, &[1, 0], &[0, 1], 10);
        assert_eq!(exact, searched);
        assert_eq!(second_columns(&exact), vec![(-1, 3), (1, 0)]);
    }

    #[test]
    fn identity_maps_h_to_h() {
        for a in [GramMatrix::binary(4, 6, 4), GramMatrix::ell_family(7), GramMatrix::binary(2, 1, -4)] {
            assert!(isometries_mapping(&a, &[1, 0], &[1, 0], a.max_abs_entry()).contains(&IsometryMatrix::identity(2)));
        }
    }

    #[test]
    fn isotropic_vectors() {
        let a = GramMatrix::binary(0, 2, 0);
        let exact = rank2_exact(&a, &[1, 0], &[1, 0]).unwrap();
        assert_eq!(exact, bounded_isometry_search(&a, &[1, 0], &[1, 0], 3));
        assert!(exact.contains(&IsometryMatrix::identity(2)));
        let exact = rank2_exact(&a, &[1, 0], &[0, 1]).unwrap();
        assert_eq!(exact, bounded_isometry_search(&a, &[1, 0], &[0, 1], 3));
        assert_eq!(exact.len(), 1);
    }

    #[test]
    fn non_primitive_and_mismatched_norms() {
        let a = GramMatrix::ell_family(5);
        assert_eq!(second_columns(&rank2_exact(&a, &[2, 0], &[0, 2]).unwrap()), vec![(-1, 10), (1, 0)]);
        assert!(rank2_exact(&a, &[2, 0], &[0, 1]).unwrap().is_empty());
        assert!(rank2_exact(&a, &[1, 0], &[1, 1]).unwrap().is_empty());
    }

    #[test]
    fn rank_three_search() {
        let a = GramMatrix::new(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        // Signed permutations fixing e1: 8 of them.
        assert_eq!(isometries_mapping(&a, &[1, 0, 0], &[1, 0, 0], 1).len(), 8);
    }

    #[test]
    fn finite_orders() {
        let a = GramMatrix::binary(4, 6, 4);
        let swap = IsometryMatrix::new(&a, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.finite_order(), Some(2));
        let b = GramMatrix::ell_family(5);
        let hyper = IsometryMatrix::new(&b, vec![vec![0, -1], vec![1, 10]]).unwrap();
        assert_eq!(hyper.finite_order(), None);
    }
}
