//! Generic scalar abstraction for the model's real arithmetic.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the model is generic over (f32 or f64).
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum<Self> + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    /// Lossy conversion from an f64 literal, for constants and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
