use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numeric kernels are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar.
#[inline]
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant converts into the scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

/// Euclidean norm of a complex vector.
pub(crate) fn vec_norm<T: Real>(z: &[Complex<T>]) -> T {
    z.iter()
        .map(|c| c.norm_sqr())
        .fold(T::zero(), |acc, s| acc + s)
        .sqrt()
}

/// Euclidean distance between complex vectors of equal length.
pub(crate) fn vec_dist<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).norm_sqr())
        .fold(T::zero(), |acc, s| acc + s)
        .sqrt()
}

/// Downcasts a complex point to `[re, im]` pairs for error reporting.
pub(crate) fn point_f64<T: Real>(z: &[Complex<T>]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [to_f64(c.re), to_f64(c.im)]).collect()
}
