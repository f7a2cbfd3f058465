//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], which is implemented for `f32` and `f64`.
//!
//! Random draws are always made in `f64` and then converted, so a given seed
//! produces the same sample sequence (up to rounding) in both precisions.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the simulation and learning code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum<Self>
    + LinalgScalar
    + ScalarOperand
    + Display
    + Debug
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the value does not fit, which cannot happen for the finite
/// constants this crate feeds it.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite constant converts to scalar type")
}

/// Converts a count into the working scalar type.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count converts to scalar type")
}

/// Converts the working scalar into `f64` (exact for both supported types).
#[inline]
pub fn dbl<T: Real>(v: T) -> f64 {
    v.to_f64().expect("scalar converts to f64")
}
