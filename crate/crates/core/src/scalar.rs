use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::float::TotalOrder;
use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar the whole crate is generic over.
///
/// The associated tolerances are the defaults each operation falls back to;
/// they are tuned per precision so that `f32` instances remain usable.
pub trait Scalar:
    Float + FloatConst + TotalOrder + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Stopping tolerance of the simultaneous root iteration.
    fn root_tol() -> Self;
    /// Relative band used by region membership tests.
    fn membership_tol() -> Self;
    /// Relative threshold below which trailing coefficients are dropped.
    fn trim_tol() -> Self;

    /// Converts a literal. Every `f64` literal used in this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from(x).expect("literal fits the scalar type")
    }

    #[inline]
    fn from_usize(n: usize) -> Self {
        Self::from(n).expect("usize fits the scalar type")
    }
}

impl Scalar for f64 {
    fn root_tol() -> Self {
        1e-12
    }
    fn membership_tol() -> Self {
        1e-9
    }
    fn trim_tol() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    fn root_tol() -> Self {
        1e-5
    }
    fn membership_tol() -> Self {
        1e-4
    }
    fn trim_tol() -> Self {
        1e-6
    }
}

pub(crate) fn is_finite<T: Scalar>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Converts to a double-precision complex, used for diagnostics.
pub(crate) fn to_c64<T: Scalar>(z: Complex<T>) -> Complex<f64> {
    Complex::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
