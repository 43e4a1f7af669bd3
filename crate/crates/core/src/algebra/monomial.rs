use std::cmp::Ordering;
use std::fmt;

/// Number of variables: `x1..x4` followed by `y1..y4`.
pub const NVARS: usize = 8;

/// One of the eight ring variables, stored as its index `0..8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

impl Var {
    /// `x_i` with `i` in `1..=4`.
    pub fn x(i: usize) -> Var {
        assert!((1..=4).contains(&i), "x index out of range: {i}");
        Var((i - 1) as u8)
    }

    /// `y_i` with `i` in `1..=4`.
    pub fn y(i: usize) -> Var {
        assert!((1..=4).contains(&i), "y index out of range: {i}");
        Var((i + 3) as u8)
    }

    pub fn from_index(idx: usize) -> Var {
        assert!(idx < NVARS);
        Var(idx as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn block(self) -> Block {
        if self.0 < 4 {
            Block::X
        } else {
            Block::Y
        }
    }

    /// Position inside its block, `0..4`.
    pub fn offset(self) -> usize {
        (self.0 % 4) as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.block() {
            Block::X => write!(f, "x{}", self.offset() + 1),
            Block::Y => write!(f, "y{}", self.offset() + 1),
        }
    }
}

/// The two coordinate blocks of `P^3 x P^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    X,
    Y,
}

impl Block {
    pub fn var(self, offset: usize) -> Var {
        match self {
            Block::X => Var::x(offset + 1),
            Block::Y => Var::y(offset + 1),
        }
    }

    pub fn vars(self) -> [Var; 4] {
        [self.var(0), self.var(1), self.var(2), self.var(3)]
    }

    pub fn other(self) -> Block {
        match self {
            Block::X => Block::Y,
            Block::Y => Block::X,
        }
    }

    fn range(self) -> std::ops::Range<usize> {
        match self {
            Block::X => 0..4,
            Block::Y => 4..8,
        }
    }
}

/// Exponent vector over `x1..x4, y1..y4`.
///
/// `Ord` is graded reverse lexicographic with `x1 > x2 > ... > y4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var) -> Monomial {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn block_degree(&self, b: Block) -> u32 {
        self.0[b.range()].iter().map(|&e| e as u32).sum()
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.block_degree(Block::X), self.block_degree(Block::Y))
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; NVARS]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Monomial(e)
    }

    pub fn with_exponent(&self, v: Var, e: u16) -> Monomial {
        let mut m = self.0;
        m[v.index()] = e;
        Monomial(m)
    }

    /// True when only variables of `b` occur.
    pub fn in_block(&self, b: Block) -> bool {
        self.block_degree(b.other()) == 0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for i in (0..NVARS).rev() {
                if self.0[i] != other.0[i] {
                    return other.0[i].cmp(&self.0[i]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for i in 0..NVARS {
            let e = self.0[i];
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", Var::from_index(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: [u16; 8]) -> Monomial {
        Monomial(e)
    }

    #[test]
    fn grevlex_orders_by_degree_then_last_variable() {
        let x1 = Monomial::var(Var::x(1));
        let x2 = Monomial::var(Var::x(2));
        let y4 = Monomial::var(Var::y(4));
        assert!(x1 > x2);
        assert!(x2 > y4);
        assert!(Monomial::ONE < y4);
        // x1*x3 vs x2^2: last differing variable is x3, where x2^2 has the smaller exponent.
        let x1x3 = mono([1, 0, 1, 0, 0, 0, 0, 0]);
        let x2sq = mono([0, 2, 0, 0, 0, 0, 0, 0]);
        assert!(x2sq > x1x3);
        // x1^2*y3 vs x4*y1*y2
        let a = mono([2, 0, 0, 0, 0, 0, 1, 0]);
        let b = mono([0, 0, 0, 1, 1, 1, 0, 0]);
        assert!(b > a);
    }

    #[test]
    fn display_and_division() {
        let m = mono([2, 0, 0, 0, 0, 0, 1, 0]);
        assert_eq!(m.to_string(), "x1^2*y3");
        let x1 = Monomial::var(Var::x(1));
        assert!(x1.divides(&m));
        assert_eq!(x1.quotient_of(&m).to_string(), "x1*y3");
        assert_eq!(m.bidegree(), (2, 1));
    }
}
