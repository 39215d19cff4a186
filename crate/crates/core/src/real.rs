//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the geometry and prediction code is generic over.
///
/// Implemented for `f32` and `f64`. Simulation and file I/O default to `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`, rounding if needed.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Lossy conversion to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used for boundary membership at this precision.
    fn boundary_eps() -> Self;
}

impl Real for f32 {
    fn boundary_eps() -> Self {
        1e-3
    }
}

impl Real for f64 {
    fn boundary_eps() -> Self {
        1e-9
    }
}
