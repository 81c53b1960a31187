//! Scalar abstraction for the floating-point side of the library.
//!
//! All spectral quantities are generic over [`Real`], so the same code runs
//! at `f32` or `f64`. The exact combinatorial constants never go through
//! this trait; they live in integer and rational arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lift a usize count into this scalar type.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("count fits in scalar")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}
