//! Numeric traits the chain formulas are generic over.

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: enough for the transition-rate formulas, which only
/// need ring operations, division and comparisons. Implemented by `f32`,
/// `f64` and exact rationals (`num_rational::BigRational`), the latter
/// serving as the arbitrary-precision oracle in tests.
pub trait Scalar: Num + FromPrimitive + ToPrimitive + Clone + PartialOrd {
    /// Lossless embedding of a population/item count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T: Num + FromPrimitive + ToPrimitive + Clone + PartialOrd> Scalar for T {}

/// Floating-point scalar: adds `ln`/`exp` and infinities on top of
/// [`Scalar`], required by the log-space stationary-distribution solver.
pub trait Float: Scalar + num_traits::Float {}

impl<T: Scalar + num_traits::Float> Float for T {}
