//! Peak heights at a flat direction and at a zero-curvature direction
//! between n = 1000 and n = 10000.
use qrw::fixtures;
use qrw::simulator::{peak_heights, Backend};

fn main() -> qrw::Result<()> {
    let thetas = [0.7, 1.362766];
    let hs = peak_heights(&fixtures::running_example(), 0, 0, &thetas, &[1000, 10000], 0.01, Backend::Float)?;
    for (t, h) in thetas.iter().zip(&hs) {
        println!("theta {t}: {:.4e} -> {:.4e}, exponent {:.3}", h[0], h[1], (h[1] / h[0]).log10());
    }
    Ok(())
}
