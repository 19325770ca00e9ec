//! Stationary-phase amplitude at one direction and the window law of
//! `n|a|²` against the random-phase envelope.
use qrw::geometry::{alphas, asymptotic_amplitude, chi_envelope_real, ks_distance, pair_alphas, solve_z_1d};
use qrw::kernel::build_kernel;
use qrw::simulator::{evolve, window_distribution, Backend};
use qrw::torus::{torus_fibers, NumericKernel};
use qrw::{fixtures, Tolerances};

fn main() -> qrw::Result<()> {
    let tol = Tolerances::default();
    let spec = fixtures::running_example();
    let k = NumericKernel::from_bundle(&build_kernel(&spec)?);
    let fibers = torus_fibers(&k, 512, &tol)?;
    let r = 0.3;
    let set = solve_z_1d(&k, &fibers, r, &tol)?;
    let n = 1000;
    let est = asymptotic_amplitude(&k, 0, 0, &set, n, &[300], &tol)?;
    let sim = evolve(&spec, 0, n, Backend::Float)?.amplitude(&[300], 0);
    println!("{} critical points; estimate {:.6e}, simulated {:.6e}", set.points.len(), est.re, sim.re);
    let vals = window_distribution(&spec, 0, 0, &[r], 4000, 64, Backend::Float)?;
    let chi = chi_envelope_real(&pair_alphas(&set, &alphas(&k, 0, 0, &set)), 20000, 0);
    println!("KS distance of the window law to the envelope law: {:.4}", ks_distance(&vals, &chi));
    Ok(())
}
