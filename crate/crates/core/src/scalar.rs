//! Scalar abstractions.
//!
//! Structural operations (validation, assembly, DAE construction, massless-node
//! elimination) only need field arithmetic and run over [`Scalar`], which covers
//! `f32`, `f64` and exact rationals. Everything that needs transcendental
//! functions (eigenvalues, matrix exponentials, time integration) runs over
//! [`Real`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Float, NumAssign, NumCast};

/// Field element usable as a conductance, capacity or temperature.
pub trait Scalar:
    NumAssign + Neg<Output = Self> + Copy + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Absolute value.
    fn magnitude(self) -> Self;

    /// Pivot magnitude at or below which a factorization of an `n`-row matrix
    /// whose largest entry is `scale` is treated as singular. Zero for exact types.
    fn pivot_tolerance(scale: Self, n: usize) -> Self;

    /// Nearest `f64`, for diagnostics and error messages.
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn magnitude(self) -> Self {
                self.abs()
            }

            fn pivot_tolerance(scale: Self, n: usize) -> Self {
                scale * <$t>::EPSILON * (n.max(1) as $t)
            }

            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

macro_rules! impl_ratio_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn magnitude(self) -> Self {
                if self < Self::from_integer(0) { -self } else { self }
            }

            fn pivot_tolerance(_scale: Self, _n: usize) -> Self {
                Self::from_integer(0)
            }

            fn to_f64_lossy(self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*};
}

impl_ratio_scalar!(i64, i128);

/// Floating-point scalar.
pub trait Real: Scalar + Float {
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable")
    }
}

impl<T: Scalar + Float> Real for T {}
