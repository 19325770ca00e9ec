//! Peak directions of the running example by exact elimination.
use qrw::fixtures;
use qrw::kernel::build_kernel;
use qrw::pipelines::peaks_1d;
use qrw::Tolerances;

fn main() -> qrw::Result<()> {
    let bundle = build_kernel(&fixtures::running_example())?;
    let t0 = std::time::Instant::now();
    let rep = peaks_1d(&bundle, 512, &Tolerances::default())?;
    println!("q has {} real roots in [-2, 2]", rep.circle_roots);
    for p in &rep.peaks {
        println!("r/n = {:.9}  (z = {:.12}, |K| rel {:.1e})", p.mu, p.z, p.k_residual);
    }
    println!("elapsed {:.2?}", t0.elapsed());
    Ok(())
}
