//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the simulator is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Tolerances used for structural checks throughout the crate.
pub mod tol {
    /// Trace, Hermiticity and positivity checks on density matrices.
    pub const STRUCTURAL: f64 = 1e-9;
    /// Unitarity of matrix exponentials.
    pub const UNITARITY: f64 = 1e-12;
    /// Trace annihilation of Lindblad generators.
    pub const GENERATOR: f64 = 1e-12;
}
