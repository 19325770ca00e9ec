//! Algebraic laws of the polynomial layer on random small inputs.

use num_rational::BigRational;
use proptest::prelude::*;
use qrw_poly::resultant::{bareiss, interp_det, poly_det};
use qrw_poly::sturm::isolate_in;
use qrw_poly::{exchange, gcd, resultant, squarefree, sturm_count, vars, QPoly, ResultantLimits, SqfScope, ZPoly};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Dense bivariate polynomial in `x, y` from a coefficient table.
fn xy(coeffs: &[Vec<i64>]) -> QPoly {
    let v = vars(&["x", "y"]);
    QPoly::from_terms(
        v,
        coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, &c)| (vec![i as u32, j as u32], q(c)))
        }),
    )
}

fn univariate(coeffs: &[i64]) -> QPoly {
    QPoly::from_terms(vars(&["x"]), coeffs.iter().enumerate().map(|(i, &c)| (vec![i as u32], q(c))))
}

fn table(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, 1..=cols), 1..=rows)
}

fn nonconstant_xy(rows: usize, cols: usize) -> impl Strategy<Value = QPoly> {
    table(rows, cols).prop_map(|t| xy(&t)).prop_filter("needs x", |p| p.degree_in(0) > 0)
}

fn linear(a: i64, b: i64) -> (QPoly, QPoly) {
    let v = vars(&["x", "y"]);
    let x = QPoly::var(v.clone(), "x").unwrap();
    let y = QPoly::var(v.clone(), "y").unwrap();
    (x.sub(&QPoly::constant(v.clone(), q(a))), y.sub(&QPoly::constant(v, q(b))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn resultant_vanishes_at_common_roots(
        a in -3i64..=3, b in -3i64..=3,
        p1 in nonconstant_xy(3, 3), p2 in nonconstant_xy(3, 3),
        p3 in nonconstant_xy(3, 3), p4 in nonconstant_xy(3, 3),
    ) {
        let (lx, ly) = linear(a, b);
        let f = lx.mul(&p1).add(&ly.mul(&p2));
        let g = lx.mul(&p3).add(&ly.mul(&p4));
        prop_assume!(f.degree_in(0) > 0 && g.degree_in(0) > 0);
        let r = resultant(&f, &g, "x").unwrap();
        prop_assert!(r.eval_var(1, &q(b)).is_zero());
    }

    #[test]
    fn resultant_commutes_with_specialisation(f in nonconstant_xy(3, 3), g in nonconstant_xy(3, 3), y0 in -3i64..=3) {
        let lc = |p: &QPoly| p.to_univariate(0).last().unwrap().eval_var(1, &q(y0));
        prop_assume!(!lc(&f).is_zero() && !lc(&g).is_zero());
        let r = resultant(&f, &g, "x").unwrap().eval_var(1, &q(y0));
        let rs = resultant(&f.eval_var(1, &q(y0)), &g.eval_var(1, &q(y0)), "x").unwrap();
        prop_assert_eq!(r, rs);
    }

    #[test]
    fn resultant_is_antisymmetric(f in nonconstant_xy(3, 3), g in nonconstant_xy(3, 3)) {
        let rf = resultant(&f, &g, "x").unwrap();
        let rg = resultant(&g, &f, "x").unwrap();
        let sign = if f.degree_in(0) * g.degree_in(0) % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(rf, rg.scale(&q(sign)));
    }

    #[test]
    fn gcd_divides_and_keeps_common_factors(a in nonconstant_xy(3, 3), b in nonconstant_xy(3, 3), c in nonconstant_xy(2, 2)) {
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = gcd(&ac, &bc);
        prop_assert!(ac.div_exact(&g).is_ok());
        prop_assert!(bc.div_exact(&g).is_ok());
        prop_assert!(g.div_exact(&c).is_ok());
    }

    #[test]
    fn squarefree_is_idempotent(a in nonconstant_xy(3, 3), b in nonconstant_xy(2, 3)) {
        let p = a.mul(&a).mul(&b);
        let s = squarefree(&p, SqfScope::All);
        prop_assert!(squarefree(&s, SqfScope::All).is_scalar_multiple_of(&s));
        prop_assert!(squarefree(&a.mul(&b), SqfScope::All).is_scalar_multiple_of(&s));
    }

    #[test]
    fn sturm_counts_match_isolation(c in prop::collection::vec(-6i64..=6, 2..=8), roots in prop::collection::vec(-5i64..=5, 0..4)) {
        let mut p = univariate(&c);
        prop_assume!(p.degree_in(0) > 0);
        for r in roots {
            p = p.mul(&univariate(&[-r, 1]));
        }
        let (lo, hi) = (q(-64), q(64));
        let boxes = isolate_in(&p, &lo, &hi).unwrap();
        prop_assert_eq!(sturm_count(&p, &lo, &hi).unwrap(), boxes.len());
        for b in &boxes {
            prop_assert_eq!(sturm_count(&p, &b.lo, &b.hi).unwrap(), 1);
        }
    }

    #[test]
    fn interpolated_determinant_matches_bareiss(entries in prop::collection::vec(table(2, 3), 9)) {
        let m: Vec<Vec<ZPoly>> = entries
            .chunks(3)
            .map(|row| row.iter().map(|t| xy(t).clear_denominators().0).collect())
            .collect();
        let bounds: Vec<u32> = (0..2)
            .map(|w| m.iter().map(|row| row.iter().map(|e| e.degree_in(w)).max().unwrap()).sum())
            .collect();
        let direct = poly_det(&m);
        prop_assert_eq!(&interp_det(&m, &bounds), &direct);
        let limits = ResultantLimits { max_terms: usize::MAX, max_degree: u32::MAX };
        prop_assert_eq!(&bareiss(m, &limits).unwrap(), &direct);
    }

    #[test]
    fn exchange_round_trips(t in table(4, 4), den in 1i64..=9) {
        let p = xy(&t).scale(&BigRational::new(1.into(), den.into()));
        let back = exchange::from_json(&exchange::to_json(&p)).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(exchange::to_json(&back), exchange::to_json(&p));
    }
}
