//! Published polynomials reproduced term for term.

use num_rational::BigRational;
use qrw::fixtures;
use qrw::geometry::{curvature_poly_1d, curvature_poly_2d};
use qrw::kernel::{build_kernel, display_scale};
use qrw_poly::{vars, QPoly};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `Σ c·x^a·y^b` from `(c, a, b)` triples.
fn xy(v: &[&str], terms: &[(i64, u32, u32)]) -> QPoly {
    QPoly::from_terms(vars(v), terms.iter().map(|&(c, a, b)| (vec![a, b], q(c))))
}

/// The displayed `Q` of the four-chirality example.
const Q_DISPLAY: [(i64, u32, u32); 15] = [
    (-17, 2, 3),
    (9, 0, 2),
    (27, 1, 0),
    (-12, 0, 1),
    (12, 3, 2),
    (8, 2, 2),
    (-15, 3, 1),
    (-4, 3, 3),
    (-15, 1, 3),
    (12, 1, 2),
    (-4, 1, 1),
    (-17, 2, 1),
    (9, 4, 2),
    (-12, 4, 3),
    (27, 3, 4),
];

/// The displayed `P_11` without its trailing factor `x`.
const P11_DISPLAY: [(i64, u32, u32); 8] = [
    (27, 1, 0),
    (-15, 3, 1),
    (-4, 1, 1),
    (12, 3, 2),
    (-12, 0, 1),
    (4, 2, 2),
    (9, 0, 2),
    (-17, 2, 3),
];

#[test]
fn running_example_q_and_p11() {
    let t0 = std::time::Instant::now();
    let b = build_kernel(&fixtures::running_example()).unwrap();
    let scale = q(27);
    assert_eq!(display_scale(&b), 27.into());
    assert_eq!(b.q.scale(&scale), xy(&["x", "y"], &Q_DISPLAY));
    let x = QPoly::var(b.vars.clone(), "x").unwrap();
    let shown = xy(&["x", "y"], &P11_DISPLAY).mul(&x);
    assert_eq!(b.numerator(0, 0).mul(&x).scale(&scale), shown);
    assert!(t0.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn displayed_curvature_quantity_up_to_the_hessian_typo() {
    let b = build_kernel(&fixtures::running_example()).unwrap();
    let qq = &b.q;
    let d = |p: &QPoly, v: &str| p.derivative(v).unwrap();
    let (qx, qy) = (d(qq, "x"), d(qq, "y"));
    let (qxx, qxy, qyy) = (d(&qx, "x"), d(&qx, "y"), d(&qy, "y"));
    let x = QPoly::var(b.vars.clone(), "x").unwrap();
    let y = QPoly::var(b.vars.clone(), "y").unwrap();
    let xqx = x.mul(&qx);
    let yqy = y.mul(&qy);
    let x2y2 = x.mul(&x).mul(&y).mul(&y);
    let displayed = |second: &QPoly| {
        let lead = xqx.add(&yqy).neg().mul(&xqx).mul(&yqy);
        let bracket = qy.mul(&qy).mul(&qxx).add(&qx.mul(&qx).mul(second)).sub(&qx.mul(&qy).mul(&qxy).scale(&q(2)));
        lead.sub(&x2y2.mul(&bracket))
    };
    let k = curvature_poly_1d(&b).unwrap();
    let xyk = x.mul(&y).mul(&k);
    // With Q_yy in the second slot the display is exactly −x y K.
    assert_eq!(displayed(&qyy), xyk.neg());
    // As printed (Q_xy there) it is a different polynomial.
    assert!(!displayed(&qxy).is_scalar_multiple_of(&xyk));
}

/// The printed `L(x, y, z)`, term by term, from the partials of `Q`.
fn printed_l(qq: &QPoly) -> QPoly {
    let d = |p: &QPoly, v: &str| p.derivative(v).unwrap();
    let (qx, qy, qz) = (d(qq, "x"), d(qq, "y"), d(qq, "z"));
    let (qxx, qxy, qxz) = (d(&qx, "x"), d(&qx, "y"), d(&qx, "z"));
    let (qyy, qyz, qzz) = (d(&qy, "y"), d(&qy, "z"), d(&qz, "z"));
    let v = qq.vars().clone();
    let (x, y, z) = (
        QPoly::var(v.clone(), "x").unwrap(),
        QPoly::var(v.clone(), "y").unwrap(),
        QPoly::var(v.clone(), "z").unwrap(),
    );
    let xy = x.mul(&y);
    let xyz = xy.mul(&z);
    let m = |c: i64, fs: &[&QPoly]| fs.iter().fold(QPoly::constant(v.clone(), q(c)), |acc, f| acc.mul(f));
    let terms = [
        m(-1, &[&xyz, &qz, &qz, &qxy, &qxy]),
        m(1, &[&z, &qx, &qz, &qz, &qy]),
        m(-2, &[&y, &z, &qx, &qz, &qy, &qyz]),
        m(1, &[&y, &qx, &qz, &qy, &qy]),
        m(1, &[&y, &z, &qx, &qy, &qy, &qzz]),
        m(1, &[&y, &z, &qx, &qz, &qz, &qyy]),
        m(-2, &[&x, &z, &qx, &qz, &qxz, &qy]),
        m(2, &[&xyz, &qx, &qxz, &qy, &qyz]),
        m(-2, &[&xyz, &qx, &qz, &qxz, &qyy]),
        m(1, &[&x, &qx, &qx, &qz, &qy]),
        m(1, &[&xy, &qx, &qx, &qz, &qyy]),
        m(1, &[&x, &z, &qx, &qx, &qzz, &qy]),
        m(1, &[&xyz, &qx, &qx, &qzz, &qyy]),
        m(1, &[&x, &z, &qxx, &qz, &qz, &qy]),
        m(-2, &[&xyz, &qxx, &qz, &qy, &qyz]),
        m(1, &[&xy, &qxx, &qz, &qy, &qy]),
        m(1, &[&xyz, &qxx, &qy, &qy, &qzz]),
        m(1, &[&xyz, &qxx, &qz, &qz, &qyy]),
        m(-1, &[&xyz, &qy, &qy, &qxz, &qxz]),
        m(-1, &[&xyz, &qx, &qx, &qyz, &qyz]),
        m(2, &[&xyz, &qz, &qxy, &qx, &qyz]),
        m(2, &[&xyz, &qz, &qxy, &qy, &qxz]),
        m(-2, &[&xy, &qz, &qxy, &qx, &qy]),
        m(-2, &[&xyz, &qxy, &qx, &qy, &qzz]),
    ];
    terms.iter().fold(QPoly::zero(v.clone()), |acc, t| acc.add(t))
}

#[test]
fn two_dimensional_curvature_matches_the_printed_l() {
    for spec in [fixtures::toy2d(), fixtures::u1(), fixtures::u2()] {
        let b = build_kernel(&spec).unwrap();
        let ours = curvature_poly_2d(&b).unwrap().l;
        let printed = printed_l(&b.q).strip_monomial().1.embed(ours.vars().clone()).unwrap();
        assert!(ours.is_scalar_multiple_of(&printed), "L differs for {}", spec.id());
    }
}

#[test]
fn published_boundaries_have_the_square_symmetries() {
    for p in [fixtures::p1(), fixtures::p2()] {
        let v = p.vars().clone();
        let r = QPoly::var(v.clone(), "r").unwrap();
        let s = QPoly::var(v.clone(), "s").unwrap();
        for subs in [[s.clone(), r.clone()], [r.neg(), s.clone()], [r.clone(), s.neg()]] {
            assert_eq!(p.compose(&subs), p);
        }
    }
}
