//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    /// Tolerance `x`, raised to a small multiple of machine epsilon for
    /// low-precision scalars.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

/// Point or tangent vector in reference coordinates. Planar surfaces use `z = 0`.
pub type Point<T> = [T; 3];

/// Complex column vector.
pub type CVec<T> = Vec<Complex<T>>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Value of a differential form: real or complex.
pub trait FieldValue<T: Real>:
    Copy + Debug + num_traits::Zero + std::ops::AddAssign + std::ops::Mul<T, Output = Self> + std::ops::Add<Output = Self>
{
    fn is_finite_value(&self) -> bool;
    fn magnitude(&self) -> T;
}

impl<T: Real> FieldValue<T> for T {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> FieldValue<T> for Complex<T> {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
}

pub(crate) fn dot3<T: Real>(a: &Point<T>, b: &Point<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3<T: Real>(a: &Point<T>) -> T {
    dot3(a, a).sqrt()
}
