//! Random rational orthogonal coins from the Cayley transform, checked for
//! exact unitarity, and a broken coin reported by the validator.
use qrw::walkmodel::{cayley_orthogonal, int_matrix, validate_spec, CoinMatrix, WalkSpec};
use qrw::walkmodel::random_skew;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qrw::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for k in 2..=5 {
        let coin = cayley_orthogonal(&random_skew(k, 3, &mut rng))?;
        let steps = (0..k as i64).map(|s| vec![s - 1]).collect();
        let spec = WalkSpec::new(1, steps, coin)?;
        let rep = validate_spec(&spec, 1e-12);
        println!("k = {k}: unitary {}, id {}", rep.unitary, spec.id());
    }
    let bad = WalkSpec::new(1, vec![vec![0], vec![1]], CoinMatrix::Exact(int_matrix(&[&[1, 1], &[0, 1]])))?;
    println!("{:?}", validate_spec(&bad, 1e-12).messages);
    Ok(())
}
