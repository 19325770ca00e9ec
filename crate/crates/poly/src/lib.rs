//! Exact multivariate polynomial arithmetic for walk analysis.
//!
//! Sparse polynomials over ℤ, ℚ, ℚ(i) and floating complex numbers, with the
//! elimination toolkit built on them: gcds and squarefree parts, Sylvester
//! resultants, Sturm sequences with exact root isolation, and a simultaneous
//! complex root finder.

pub mod coeff;
pub mod division;
pub mod error;
pub mod exchange;
pub mod gcd;
pub mod mono;
pub mod poly;
pub mod resultant;
pub mod roots;
pub mod scalar;
pub mod sturm;

pub use coeff::{ratio_to_f64, Coeff, ExactDiv, FieldCoeff};
pub use error::PolyError;
pub use gcd::{gcd, squarefree, SqfScope};
pub use mono::Mono;
pub use poly::{vars, MultiPoly, QPoly, Vars, ZPoly};
pub use resultant::{resultant, ResultantLimits};
pub use scalar::ExactScalar;
pub use sturm::{isolate_real_roots, sturm_count, unit_circle_transform, RootBox, SturmChain};
