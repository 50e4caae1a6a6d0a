//! Exact, small-scale computation on finite multiclass hypothesis classes.
//!
//! A class is an explicit table of functions `{0..m} -> {0..=k}`. On top of
//! it the crate computes the multiclass Littlestone dimension, the
//! Littlestone dimensions of the binary bit restrictions and the
//! Ψ-Littlestone dimensions for families of collapsing maps; builds and
//! minimizes 0-covers of input-labeled trees; runs online learners against
//! exhaustive adversaries; and analyzes the bit-wise private learning
//! reduction with exact exponential-mechanism distributions.
//!
//! ```
//! use mcld::{construct, dims, Caps};
//!
//! let h = construct::threshold_pair(7).unwrap();
//! assert_eq!(dims::mld(&h, &Caps::default()).unwrap(), 1);
//! ```

pub mod caps;
pub mod class;
pub mod construct;
pub mod covers;
pub mod dims;
pub mod error;
pub mod online;
pub mod privacy;
pub mod repdim;
pub mod rng;
pub mod rowset;
pub mod scalar;
pub mod trees;

pub use caps::Caps;
pub use class::{HypothesisClass, Label, LabeledSample};
pub use error::{Error, Result};
pub use rng::SeededRng;
pub use scalar::{Distribution, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Finite distribution with exact rational probabilities.
pub type RationalDistribution<O> = Distribution<O, Rational>;
/// Finite distribution with `f64` probabilities.
pub type FloatDistribution<O> = Distribution<O, f64>;
/// Game-solver bracket in `f64`.
pub type GameValueF64 = repdim::game::GameValue<f64>;
