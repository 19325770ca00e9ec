//! Numerically traced zero-curvature images of the two symmetric 2-D walks,
//! compared with the published boundary polynomials.
use qrw::pipelines::{cloud_on_curve_fraction, feasible_uniform, near_curve, numeric_boundary_trace, Frame};
use qrw::torus::NumericKernel;
use qrw::{fixtures, Tolerances};

fn main() -> qrw::Result<()> {
    let tol = Tolerances::default();
    let frame = Frame::square();
    for (name, spec, p) in [("u1", fixtures::u1(), fixtures::p1()), ("u2", fixtures::u2(), fixtures::p2())] {
        let k = NumericKernel::from_spec(&spec);
        let cloud: Vec<[f64; 2]> = numeric_boundary_trace(&k, 256, &tol)?.into_iter().map(|q| frame.apply(q)).collect();
        let refs = feasible_uniform(&k, &frame, 20000, 128, 0, &tol);
        let (frac, thr) = cloud_on_curve_fraction(&p, &cloud, &refs, 1e-3);
        let near = cloud.iter().filter(|&&q| near_curve(&p, q, 1e-4)).count();
        let l1 = cloud.iter().map(|q| q[0].abs() + q[1].abs()).fold(0.0, f64::max);
        let linf = cloud.iter().map(|q| q[0].abs().max(q[1].abs())).fold(0.0, f64::max);
        println!("{name}: {} points, fraction below |P| quantile {thr:.2e}: {frac:.4}", cloud.len());
        println!("    {near} within 1e-4 of the curve; max |r|+|s| {l1:.4}, max(|r|,|s|) {linf:.4}");
    }
    Ok(())
}
