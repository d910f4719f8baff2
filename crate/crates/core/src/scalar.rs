// SPDX-License-Identifier: Apache-2.0

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real coefficient type carried by Pauli sums and dense operators.
///
/// Implemented for `f32` and `f64`. Everything in the crate that touches
/// coefficients is generic over this trait; the `*64` aliases at the crate
/// root pin it to `f64`, which is what the CLI and the reference checks use.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Default
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + 'static
{
    /// Magnitude below which an accumulated coefficient counts as an exact
    /// cancellation and is removed from a sum.
    fn cancellation_tolerance() -> Self;

    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn cancellation_tolerance() -> Self {
        1e-15
    }
}

impl Scalar for f32 {
    fn cancellation_tolerance() -> Self {
        1e-6
    }
}
