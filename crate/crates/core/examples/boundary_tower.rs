//! Runs the iterated-resultant tower for a 2-D walk, checks the first
//! stages against numeric common zeros of their inputs and compares the
//! candidate curve with the numerically traced zero-curvature image.
use qrw::fixtures;
use qrw::kernel::build_kernel;
use qrw::pipelines::{boundary_2d, near_curve, numeric_boundary_trace, stage_soundness, Frame, TowerConfig};
use qrw::torus::NumericKernel;
use qrw::Tolerances;

fn main() -> qrw::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "toy2d".into());
    let spec = fixtures::by_name(&name).ok_or_else(|| qrw::QrwError::Config(format!("unknown walk {name}")))?;
    let bundle = build_kernel(&spec)?;
    let symmetric = name != "toy2d";
    let frame = if symmetric { Frame::square() } else { Frame::identity() };
    let cfg = TowerConfig {
        symmetric,
        limits: qrw_poly::ResultantLimits {
            max_degree: std::env::args().nth(2).map_or(200, |d| d.parse().expect("degree cap")),
            ..Default::default()
        },
        ..TowerConfig::default()
    };
    let curve = boundary_2d(&bundle, &frame, &cfg)?;
    for s in &curve.stages {
        println!("{:6} {:>7} terms  {:?}  {:.1}s", s.name, s.terms, s.degrees, s.seconds);
    }
    if let Some(e) = &curve.exhausted {
        println!("stopped: {e}");
    }
    let c2 = qrw::geometry::curvature_poly_2d(&bundle)?;
    for (stage, f, g) in [("R12", &c2.q, &c2.l), ("R13", &c2.q, &c2.h1), ("R14", &c2.q, &c2.h2)] {
        if let Some(out) = curve.polys.get(stage) {
            println!("{stage} worst witness residual {:.1e}", stage_soundness(f, g, "x", out, 20, 7)?);
        }
    }
    if let Some(c) = &curve.candidate {
        println!("candidate: {} terms, deg r {}, deg s {}", c.len(), c.degree_in(0), c.degree_in(1));
        let kernel = NumericKernel::from_bundle(&bundle);
        let cloud = numeric_boundary_trace(&kernel, 128, &Tolerances::default())?;
        let near = cloud.iter().filter(|&&q| near_curve(c, frame.apply(q), 1e-4)).count();
        println!("{near} of {} traced points lie within 1e-4 of the candidate", cloud.len());
    }
    Ok(())
}
