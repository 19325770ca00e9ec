//! Reference walks used by tests, examples and the CLI.

use num_complex::Complex64;
use qrw_poly::{exchange, ExactScalar, QPoly};

use crate::walkmodel::{cayley_orthogonal, int_matrix, CoinMatrix, ExactMatrix, WalkSpec};

/// Skew matrix whose Cayley transform (negated) is the four-chirality coin
/// with entries over 27.
pub fn running_skew() -> ExactMatrix {
    int_matrix(&[&[0, -3, -1, 3], &[3, 0, 1, -2], &[1, -1, 0, 2], &[-3, 2, -2, 0]])
}

/// The four-chirality 1-D walk: coin `−(I+S)(I−S)⁻¹` (entries over 27) with
/// steps `1, −1, 0, 2`.
pub fn running_example() -> WalkSpec {
    let c = cayley_orthogonal(&running_skew()).expect("invertible");
    WalkSpec::new(1, vec![vec![1], vec![-1], vec![0], vec![2]], c.scale(-1)).expect("shape")
}

/// The directions at which the running example's curvature vanishes.
pub const RUNNING_PEAKS: [f64; 6] = [
    -0.346306, -0.143835, 0.229537, 0.929248, 1.126013, 1.362766,
];

/// Hadamard walk (float coin), steps `0, 1`.
pub fn hadamard() -> WalkSpec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |v: f64| Complex64::new(v, 0.0);
    WalkSpec::new(
        1,
        vec![vec![0], vec![1]],
        CoinMatrix::Float(vec![vec![c(h), c(h)], vec![c(h), c(-h)]]),
    )
    .expect("shape")
}

/// Rational two-chirality analogue of Hadamard: `[[3/5, 4/5], [−4/5, 3/5]]`,
/// the Cayley transform of `[[0, 1/2], [−1/2, 0]]`, steps `0, 1`.
pub fn cayley2() -> WalkSpec {
    let half = ExactScalar::from_ratio(1, 2);
    let s = vec![
        vec![ExactScalar::zero(), half.clone()],
        vec![-&half, ExactScalar::zero()],
    ];
    WalkSpec::new(1, vec![vec![0], vec![1]], cayley_orthogonal(&s).expect("invertible"))
        .expect("shape")
}

/// Identity coin, steps `0, 1`: a walk with no interference.
pub fn deterministic() -> WalkSpec {
    WalkSpec::new(
        1,
        vec![vec![0], vec![1]],
        CoinMatrix::Exact(int_matrix(&[&[1, 0], &[0, 1]])),
    )
    .expect("shape")
}

fn half_matrix(rows: &[&[i64]]) -> CoinMatrix {
    let half = ExactScalar::from_ratio(1, 2);
    CoinMatrix::Exact(
        int_matrix(rows)
            .into_iter()
            .map(|r| r.iter().map(|e| e * &half).collect())
            .collect(),
    )
}

fn square_steps() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
}

/// 2-D walk with the first symmetric coin of order four.
pub fn u1() -> WalkSpec {
    let c = half_matrix(&[&[1, 1, 1, 1], &[-1, 1, -1, 1], &[1, -1, -1, 1], &[-1, -1, 1, 1]]);
    WalkSpec::new(2, square_steps(), c).expect("shape")
}

/// 2-D walk with the second symmetric coin of order four.
pub fn u2() -> WalkSpec {
    let c = half_matrix(&[&[1, 1, 1, 1], &[-1, 1, -1, 1], &[-1, 1, 1, -1], &[-1, -1, 1, 1]]);
    WalkSpec::new(2, square_steps(), c).expect("shape")
}

/// Smallest 2-D walk: three chiralities, steps `(0,0), (1,0), (0,1)`, coin
/// from the Cayley transform of a small skew matrix.
pub fn toy2d() -> WalkSpec {
    let s = int_matrix(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
    WalkSpec::new(
        2,
        vec![vec![0, 0], vec![1, 0], vec![0, 1]],
        cayley_orthogonal(&s).expect("invertible"),
    )
    .expect("shape")
}

/// Published boundary polynomial for the `u1` walk, in `(r, s)`.
pub fn p1() -> QPoly {
    exchange::from_json(include_str!("../data/p1.json")).expect("valid fixture")
}

/// Published boundary polynomial for the `u2` walk, in `(r, s)`.
pub fn p2() -> QPoly {
    exchange::from_json(include_str!("../data/p2.json")).expect("valid fixture")
}

/// Fixture lookup by name, for the CLI.
pub fn by_name(name: &str) -> Option<WalkSpec> {
    Some(match name {
        "running" => running_example(),
        "hadamard" => hadamard(),
        "cayley2" => cayley2(),
        "deterministic" => deterministic(),
        "u1" => u1(),
        "u2" => u2(),
        "toy2d" => toy2d(),
        _ => return None,
    })
}

pub const NAMES: [&str; 7] = ["running", "hadamard", "cayley2", "deterministic", "u1", "u2", "toy2d"];
