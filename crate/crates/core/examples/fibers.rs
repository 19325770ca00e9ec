//! Components of the unit-torus fiber of the running example's variety.
use qrw::kernel::build_kernel;
use qrw::torus::{torus_fibers, NumericKernel};
use qrw::{fixtures, Tolerances};

fn main() -> qrw::Result<()> {
    let b = build_kernel(&fixtures::running_example())?;
    let rep = torus_fibers(&NumericKernel::from_bundle(&b), 512, &Tolerances::default())?;
    for c in &rep.components {
        println!(
            "component {}: (x, y) winding ({}, {}), mu over [{:.6}, {:.6}]",
            c.id, c.degree, c.y_winding, c.mu_range.0, c.mu_range.1
        );
    }
    Ok(())
}
