//! Property tests over random polynomials, matrices, lattices and Chow classes.

use proptest::prelude::*;

use quartic_cremona::algebra::{compose, divides, gcd, Monomial, NVARS};
use quartic_cremona::cremona::{chow_intersect, chow_intersect_sum, kernel_map, ChowBase, ChowExpr};
use quartic_cremona::lattice::{disc_action, discriminant_group, smith_normal_form, GramMatrix, IsometryMatrix};
use quartic_cremona::{Block, Domain, MPoly, PolyMatrix, Var};

const P: u64 = 101;

fn fp() -> Domain {
    Domain::prime_field(P).unwrap()
}

/// Up to `terms` monomials in the x-block of degree at most `deg`.
fn poly(domain: Domain, terms: usize, deg: u16) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((prop::array::uniform4(0..=deg), -20i64..=20), 0..=terms).prop_map(move |ts| {
        MPoly::from_terms(
            domain,
            ts.into_iter().map(|(e, c)| {
                let mut m = [0u16; NVARS];
                m[..4].copy_from_slice(&e);
                (Monomial(m), domain.from_i64(c))
            }),
        )
        .unwrap()
    })
}

fn linear(domain: Domain, block: Block) -> impl Strategy<Value = MPoly> {
    prop::array::uniform4(-9i64..=9).prop_map(move |c| MPoly::linear_form(domain, block, &c.map(|x| domain.from_i64(x))))
}

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Rational), Just(fp())]
}

fn poly_triple() -> impl Strategy<Value = (MPoly, MPoly, MPoly)> {
    domain().prop_flat_map(|d| (poly(d, 5, 3), poly(d, 5, 3), poly(d, 5, 3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms((a, b, c) in poly_triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MPoly::one(a.domain()), a.clone());
    }

    #[test]
    fn leibniz_matches_bareiss(entries in prop::collection::vec(linear(fp(), Block::X), 16)) {
        let m = PolyMatrix::new(4, 4, entries).unwrap();
        prop_assert_eq!(m.det_leibniz().unwrap(), m.det_bareiss().unwrap());
    }

    #[test]
    fn leibniz_matches_bareiss_over_q(entries in prop::collection::vec(linear(Domain::Rational, Block::X), 9)) {
        let m = PolyMatrix::new(3, 3, entries).unwrap();
        prop_assert_eq!(m.det_leibniz().unwrap(), m.det_bareiss().unwrap());
    }

    #[test]
    fn exact_division_recovers_quotient((f, q, _) in poly_triple()) {
        prop_assume!(!f.is_zero());
        prop_assert_eq!(divides(&f, &(&f * &q)).unwrap(), Some(q));
    }

    #[test]
    fn chain_rule(
        f in poly(fp(), 4, 2).prop_map(|f| compose(&f, Block::X, &[1, 2, 3, 4].map(|i| MPoly::var(fp(), Var::y(i)))).unwrap()),
        g in prop::array::uniform4((linear(fp(), Block::X), linear(fp(), Block::X)).prop_map(|(u, v)| &u * &v)),
        i in 1usize..=4,
    ) {
        let d = fp();
        let xi = Var::x(i);
        let lhs = compose(&f, Block::Y, &g).unwrap().derivative(xi);
        let mut rhs = MPoly::zero(d);
        for j in 0..4 {
            let df = compose(&f.derivative(Var::y(j + 1)), Block::Y, &g).unwrap();
            rhs = &rhs + &(&df * &g[j].derivative(xi));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_and_absorbs_common_factor((a, b, c) in poly_triple()) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (&a * &c, &b * &c);
        let g = gcd(&ac, &bc).unwrap();
        prop_assert!(divides(&g, &ac).unwrap().is_some());
        prop_assert!(divides(&g, &bc).unwrap().is_some());
        prop_assert!(divides(&c, &g).unwrap().is_some());
    }

    #[test]
    fn laplace_identity(entries in prop::collection::vec(linear(fp(), Block::X), 12)) {
        let rows = PolyMatrix::new(3, 4, entries).unwrap();
        if let Ok(map) = kernel_map(&rows) {
            for r in 0..3 {
                let dot = rows.row(r).iter().zip(map.components()).fold(MPoly::zero(fp()), |s, (a, b)| &s + &(a * b));
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn chow_symmetry_and_linearity(a in 0u32..=6, b in 0u32..=6) {
        prop_assume!(a + b <= 6);
        let c = 6 - a - b;
        let e = ChowExpr::new(vec![(ChowBase::H1, a), (ChowBase::H2, b), (ChowBase::Sum, c)]);
        let v = chow_intersect(&e).unwrap();
        prop_assert_eq!(v, chow_intersect(&e.swapped()).unwrap());
        if c > 0 {
            // (H1 + H2) distributes.
            let split = [
                (1, ChowExpr::new(vec![(ChowBase::H1, a + 1), (ChowBase::H2, b), (ChowBase::Sum, c - 1)])),
                (1, ChowExpr::new(vec![(ChowBase::H1, a), (ChowBase::H2, b + 1), (ChowBase::Sum, c - 1)])),
            ];
            prop_assert_eq!(v, chow_intersect_sum(&split).unwrap());
        }
    }

    #[test]
    fn disc_action_respects_composition(l in 2i64..=8, word in prop::collection::vec(0usize..3, 1..5)) {
        let a = GramMatrix::ell_family(l);
        let group = discriminant_group(&a).unwrap();
        let gens = [
            IsometryMatrix::new(&a, vec![vec![0, 1], vec![1, 0]]).unwrap(),
            IsometryMatrix::new(&a, vec![vec![-1, 0], vec![0, -1]]).unwrap(),
            IsometryMatrix::new(&a, vec![vec![0, -1], vec![1, 2 * l]]).unwrap(),
        ];
        let mut g = IsometryMatrix::identity(2);
        let mut act = disc_action(&group, &g).unwrap();
        for &w in &word {
            g = g.compose(&gens[w]);
            act = act.compose(&disc_action(&group, &gens[w]).unwrap(), &group);
        }
        prop_assert!(g.preserves(&a));
        prop_assert_eq!(disc_action(&group, &g).unwrap(), act);
    }

    #[test]
    fn smith_normal_form_3x3(rows in prop::array::uniform3(prop::array::uniform3(-30i64..=30))) {
        let a: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        let snf = smith_normal_form(&a);
        let wide = |m: &[Vec<i64>]| -> Vec<Vec<i128>> { m.iter().map(|r| r.iter().map(|&e| e as i128).collect()).collect() };
        let mul = |x: &[Vec<i128>], y: &[Vec<i128>]| -> Vec<Vec<i128>> {
            (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
        };
        prop_assert_eq!(mul(&mul(&wide(&snf.u), &wide(&a)), &wide(&snf.v)), wide(&snf.d));
        let det = |m: &[Vec<i128>]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        prop_assert_eq!(det(&wide(&snf.u)).abs(), 1);
        prop_assert_eq!(det(&wide(&snf.v)).abs(), 1);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    prop_assert_eq!(snf.d[i][j], 0);
                }
            }
        }
        let diag = snf.diagonal();
        prop_assert!(diag.iter().all(|&x| x >= 0));
        for w in diag.windows(2) {
            prop_assert!(w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0));
        }
        prop_assert_eq!(diag.iter().map(|&x| x as i128).product::<i128>(), det(&wide(&a)).abs());
    }
}
