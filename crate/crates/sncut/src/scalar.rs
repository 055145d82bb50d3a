use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. The bounds cover arithmetic assignment,
/// conversion from literal constants, summation, and ndarray broadcasting.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + ScalarOperand
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant (tolerance, default parameter) into `S`.
///
/// Panics only if the constant is not representable, which cannot happen for
/// the finite literals this crate feeds it.
pub(crate) fn sc<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("finite constant representable in target scalar")
}
