//! Scalar abstraction shared by the closed-form layers.
//!
//! Coefficient and witness evaluation is generic over the floating-point
//! type so that single precision can be used for quick scans and double
//! precision for validation. The Fock-space oracle works in `f64` only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar usable by coefficients and witnesses.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a small non-negative integer into this type.
    #[inline]
    fn int(k: u32) -> Self {
        Self::from_u32(k).expect("integer representable in scalar type")
    }

    /// Widens to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Builds a complex number from real and imaginary parts.
#[inline]
pub fn c<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

/// Embeds a real number as a complex number.
#[inline]
pub fn re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// `e^{i x}` for real `x`.
#[inline]
pub fn cis<T: Real>(x: T) -> Cplx<T> {
    let (s, co) = x.sin_cos();
    Complex::new(co, s)
}

/// Squared modulus `|z|^2` returned as a real number.
#[inline]
pub fn abs2<T: Real>(z: Cplx<T>) -> T {
    z.re * z.re + z.im * z.im
}
