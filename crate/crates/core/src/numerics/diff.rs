//! Central finite differences on anything that forms a real vector space.

use num_complex::Complex;
use num_traits::Zero;

use super::linalg::CMatrix;
use crate::error::{MaslovError, Result};
use crate::scalar::Real;
#[cfg(test)]
use crate::scalar::CVec;

/// Smallest step accepted by any stencil.
pub const MIN_STEP: f64 = 1e-9;

/// Real linear combinations.
pub trait Lin<T>: Sized {
    fn combo(parts: &[(T, &Self)]) -> Self;
}

impl<T: Real> Lin<T> for T {
    fn combo(parts: &[(T, &Self)]) -> Self {
        parts.iter().fold(T::zero(), |acc, (w, x)| acc + *w * **x)
    }
}

impl<T: Real> Lin<T> for Complex<T> {
    fn combo(parts: &[(T, &Self)]) -> Self {
        parts.iter().fold(Complex::zero(), |acc, (w, x)| acc + **x * *w)
    }
}

impl<T: Real> Lin<T> for CMatrix<T> {
    fn combo(parts: &[(T, &Self)]) -> Self {
        let m = parts[0].1;
        CMatrix::from_fn(m.rows(), m.cols(), |i, j| parts.iter().fold(Complex::zero(), |acc, (w, x)| acc + x[(i, j)] * *w))
    }
}

impl<T: Real, V: Lin<T>> Lin<T> for Vec<V> {
    fn combo(parts: &[(T, &Self)]) -> Self {
        let n = parts[0].1.len();
        (0..n)
            .map(|i| {
                let inner: Vec<(T, &V)> = parts.iter().map(|(w, x)| (*w, &x[i])).collect();
                V::combo(&inner)
            })
            .collect()
    }
}

pub(crate) fn check_step<T: Real>(h: T) -> Result<()> {
    if !(h >= T::lit(MIN_STEP)) {
        return Err(MaslovError::StepUnderflow { step: h.as_f64() });
    }
    Ok(())
}

/// Fourth-order central first derivative of `f` at `x` with step `h`.
pub fn derivative<T: Real, V: Lin<T>>(f: impl Fn(T) -> V, x: T, h: T) -> Result<V> {
    check_step(h)?;
    Ok(derivative_unchecked(f, x, h))
}

pub(crate) fn derivative_unchecked<T: Real, V: Lin<T>>(f: impl Fn(T) -> V, x: T, h: T) -> V {
    let two = T::lit(2.0);
    let (p1, m1, p2, m2) = (f(x + h), f(x - h), f(x + two * h), f(x - two * h));
    let w = T::one() / (T::lit(12.0) * h);
    V::combo(&[(T::lit(8.0) * w, &p1), (-T::lit(8.0) * w, &m1), (-w, &p2), (w, &m2)])
}

/// Fourth-order central second derivative.
pub fn second_derivative<T: Real>(f: impl Fn(T) -> T, x: T, h: T) -> Result<T> {
    check_step(h)?;
    let two = T::lit(2.0);
    let v = -f(x + two * h) + T::lit(16.0) * f(x + h) - T::lit(30.0) * f(x) + T::lit(16.0) * f(x - h) - f(x - two * h);
    Ok(v / (T::lit(12.0) * h * h))
}
