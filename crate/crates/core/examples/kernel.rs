//! Builds the generating-function kernel of the four-chirality walk and
//! prints `Q` and `P_11` at the integer scale.

use num_rational::BigRational;
use qrw::fixtures;
use qrw::kernel::{build_kernel, display_scale};

fn main() {
    let bundle = build_kernel(&fixtures::running_example()).expect("real rational coin");
    let scale = BigRational::from_integer(display_scale(&bundle));
    println!("{}", bundle.normalization_note());
    println!("{scale} Q = {}", bundle.q.scale(&scale));
    println!("{scale} P_11 = {}", bundle.numerator(0, 0).scale(&scale));
    println!("Q squarefree: {}", bundle.q_is_squarefree());
}
