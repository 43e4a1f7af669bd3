//! Exact division, substitution and gradients.

use super::monomial::{Block, Monomial};
use super::mpoly::MPoly;
use super::AlgebraError;

/// Exact division: returns `q` with `g = f * q`, or `None` when `f` does not divide `g`.
///
/// Every coefficient domain here is a field, so the leading coefficient of `f`
/// is always invertible and plain leading-term reduction decides divisibility:
/// if `f | g` then the leading monomial of `f` divides the leading monomial of
/// every intermediate remainder.
pub fn divides(f: &MPoly, g: &MPoly) -> Result<Option<MPoly>, AlgebraError> {
    if f.domain() != g.domain() {
        return Err(AlgebraError::DomainMismatch);
    }
    let d = f.domain();
    let (lm, lc) = match f.leading_term() {
        Some((m, c)) => (*m, c.clone()),
        None => return Err(AlgebraError::ZeroDivisor),
    };
    let lc_inv = d.inv(&lc)?;
    let mut rem = g.clone();
    let mut quotient = Vec::new();
    while let Some((m, c)) = rem.leading_term() {
        if !lm.divides(m) {
            return Ok(None);
        }
        let tm = lm.quotient_of(m);
        let tc = d.mul(c, &lc_inv);
        rem.sub_scaled_shift(f, &tm, &tc);
        quotient.push((tm, tc));
    }
    MPoly::from_terms(d, quotient).map(Some)
}

/// Like [`divides`] but treats non-divisibility as an error.
pub(crate) fn exact_div(g: &MPoly, f: &MPoly) -> MPoly {
    divides(f, g)
        .expect("nonzero divisor over a common domain")
        .expect("division expected to be exact")
}

/// Substitutes `maps[i]` for the `i`-th variable of `block` in `f`.
///
/// `f` may only involve variables of `block`; the nonzero maps must be
/// homogeneous of one common degree.
pub fn compose(f: &MPoly, block: Block, maps: &[MPoly; 4]) -> Result<MPoly, AlgebraError> {
    if !f.in_block(block) {
        return Err(AlgebraError::WrongBlock);
    }
    if maps.iter().any(|m| m.domain() != f.domain()) {
        return Err(AlgebraError::DomainMismatch);
    }
    let mut common = None;
    for m in maps.iter().filter(|m| !m.is_zero()) {
        let deg = m.homogeneous_degree().ok_or(AlgebraError::UnequalMapDegrees)?;
        if *common.get_or_insert(deg) != deg {
            return Err(AlgebraError::UnequalMapDegrees);
        }
    }
    let d = f.domain();
    let vars = block.vars();
    let max_exp: Vec<u16> = vars.iter().map(|&v| f.degree_in(v) as u16).collect();
    // powers[i][e] = maps[i]^e
    let powers: Vec<Vec<MPoly>> = maps
        .iter()
        .zip(&max_exp)
        .map(|(m, &top)| {
            let mut p = vec![MPoly::one(d)];
            for e in 1..=top as usize {
                let next = &p[e - 1] * m;
                p.push(next);
            }
            p
        })
        .collect();
    let mut acc = MPoly::zero(d);
    for (mono, c) in f.terms() {
        let mut t = MPoly::constant(d, c.clone())?;
        for (i, &v) in vars.iter().enumerate() {
            let e = mono.exponent(v) as usize;
            if e > 0 {
                t = &t * &powers[i][e];
            }
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Partial derivatives with respect to the four variables of `block`.
pub fn gradient(f: &MPoly, block: Block) -> [MPoly; 4] {
    block.vars().map(|v| f.derivative(v))
}

/// The monomial `v^e` for a block variable, as a convenience for callers building terms.
pub fn block_monomial(block: Block, exps: [u16; 4]) -> Monomial {
    let mut m = Monomial::ONE;
    for (i, e) in exps.into_iter().enumerate() {
        m = m.with_exponent(block.var(i), e);
    }
    m
}
