use super::mpoly::MPoly;
use super::ops::exact_div;
use super::scalar::Domain;
use super::{AlgebraError, Block};

/// Dense matrix of polynomials over a single domain, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    domain: Domain,
    entries: Vec<MPoly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<MPoly>) -> Result<Self, AlgebraError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(AlgebraError::Shape(format!(
                "{rows}x{cols} matrix with {} entries",
                entries.len()
            )));
        }
        let domain = entries[0].domain();
        if entries.iter().any(|e| e.domain() != domain) {
            return Err(AlgebraError::DomainMismatch);
        }
        Ok(PolyMatrix { rows, cols, domain, entries })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> MPoly,
    ) -> Result<Self, AlgebraError> {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, i: usize, j: usize) -> &MPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[MPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[MPoly] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when every entry is zero or a linear form in `block`.
    pub fn is_linear_in(&self, block: Block) -> bool {
        self.entries
            .iter()
            .all(|e| e.is_zero() || (e.in_block(block) && e.homogeneous_degree() == Some(1)))
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        PolyMatrix { rows: rows.len(), cols: cols.len(), domain: self.domain, entries }
    }

    /// Deletes one row and one column.
    pub fn minor(&self, row: usize, col: usize) -> PolyMatrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != col).collect();
        self.select(&rows, &cols)
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).expect("same shape")
    }

    /// Matrix times a column vector of polynomials.
    pub fn mul_vec(&self, v: &[MPoly]) -> Result<Vec<MPoly>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(MPoly::zero(self.domain), |acc, (a, b)| acc.checked_add(&a.checked_mul(b)?))
            })
            .collect()
    }

    fn require_square(&self) -> Result<usize, AlgebraError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(AlgebraError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Determinant: Bareiss over `Q`, Leibniz over `F_p` for `n <= 4`.
    pub fn det(&self) -> Result<MPoly, AlgebraError> {
        let n = self.require_square()?;
        match self.domain {
            Domain::PrimeField(_) if n <= 4 => self.det_leibniz(),
            _ => self.det_bareiss(),
        }
    }

    /// Fraction-free Gaussian elimination; every division is exact.
    pub fn det_bareiss(&self) -> Result<MPoly, AlgebraError> {
        let n = self.require_square()?;
        let d = self.domain;
        let mut a: Vec<Vec<MPoly>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut negate = false;
        let mut prev = MPoly::one(d);
        for k in 0..n.saturating_sub(1) {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        negate = !negate;
                    }
                    None => return Ok(MPoly::zero(d)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = exact_div(&num, &prev);
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -&det } else { det })
    }

    /// Sum over all permutations. Intended for `n <= 6`.
    pub fn det_leibniz(&self) -> Result<MPoly, AlgebraError> {
        let n = self.require_square()?;
        if n > 6 {
            return Err(AlgebraError::Shape(format!("Leibniz expansion limited to n <= 6, got {n}")));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc = MPoly::zero(self.domain);
        permutations(&mut perm, 0, false, &mut |p, odd| {
            let mut t = MPoly::one(self.domain);
            for (i, &j) in p.iter().enumerate() {
                t = &t * self.get(i, j);
                if t.is_zero() {
                    return;
                }
            }
            acc = if odd { &acc - &t } else { &acc + &t };
        });
        Ok(acc)
    }
}

fn permutations(p: &mut [usize], k: usize, odd: bool, visit: &mut impl FnMut(&[usize], bool)) {
    if k == p.len() {
        visit(p, odd);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, odd ^ (i != k), visit);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MPoly {
        MPoly::parse(Domain::Rational, s).unwrap()
    }

    fn mat(rows: usize, cols: usize, s: &[&str]) -> PolyMatrix {
        PolyMatrix::new(rows, cols, s.iter().map(|t| p(t)).collect()).unwrap()
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let m = mat(4, 4, &[
            "x1", "0", "0", "0", //
            "0", "x2", "0", "0", //
            "0", "0", "x3", "0", //
            "0", "0", "0", "x4",
        ]);
        assert_eq!(m.det_bareiss().unwrap(), p("x1*x2*x3*x4"));
        assert_eq!(m.det_leibniz().unwrap(), p("x1*x2*x3*x4"));
        let two = mat(2, 2, &["x1", "x2", "x3", "x4"]);
        assert_eq!(two.det().unwrap(), p("x1*x4 - x2*x3"));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let m = mat(3, 3, &["0", "x1", "0", "x2", "0", "0", "0", "0", "x3"]);
        assert_eq!(m.det_bareiss().unwrap(), p("-x1*x2*x3"));
        assert_eq!(m.det_leibniz().unwrap(), p("-x1*x2*x3"));
        let singular = mat(2, 2, &["0", "x1", "0", "x2"]);
        assert!(singular.det_bareiss().unwrap().is_zero());
    }

    #[test]
    fn non_square_is_rejected() {
        let m = mat(1, 2, &["x1", "x2"]);
        assert!(matches!(m.det(), Err(AlgebraError::NotSquare { rows: 1, cols: 2 })));
    }

    #[test]
    fn linear_forms_and_minors() {
        let m = mat(2, 3, &["x1", "x2 + x3", "0", "x4", "2*x1", "x3"]);
        assert!(m.is_linear_in(Block::X));
        assert!(!m.is_linear_in(Block::Y));
        assert_eq!(m.minor(0, 1), mat(1, 2, &["x4", "x3"]));
        assert_eq!(m.transpose().get(2, 1), &p("x3"));
        let v = m.mul_vec(&[p("y1"), p("y2"), p("y3")]).unwrap();
        assert_eq!(v[0], p("x1*y1 + x2*y2 + x3*y2"));
    }
}
