//! Floating scalar abstraction shared by the numeric kernels.
//!
//! Everything that works in floating point (characters, Gauss sums, Chebyshev
//! evaluation, quadrature, Gamma and Meijer-G, densities) is written against
//! [`Real`], so the same code runs in `f32` and `f64`. Exact work (Catalan
//! products, moment accumulators, curve coefficients) uses big integers and
//! rationals instead.

use core::fmt::{Debug, Display};
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; infallible for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
