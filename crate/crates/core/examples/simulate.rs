//! Exact and floating evolution of the running example, with the
//! probability profile summarised by its ballistic statistics.
use qrw::fixtures;
use qrw::simulator::{ballistic_stats, evolve, profile, Backend};

fn main() -> qrw::Result<()> {
    let spec = fixtures::running_example();
    let exact = evolve(&spec, 0, 60, Backend::Exact)?;
    println!("exact n = 60: total probability {}", exact.norm_sqr_exact().expect("exact field"));
    let a = exact.amplitude_exact(&[60], 0).expect("exact field");
    println!("a(1, 1, 60, r = 60) = {a}");
    let float = evolve(&spec, 0, 2000, Backend::Float)?;
    let stats = ballistic_stats(&profile(&float, 0))?;
    println!("float n = 2000: {stats:?}");
    Ok(())
}
