//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the toolkit computes in (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Relative singular-value threshold below which columns are treated as
    /// linearly dependent.
    fn rank_rtol() -> Self;
}

impl Real for f64 {
    fn rank_rtol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn rank_rtol() -> Self {
        1e-4
    }
}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Convert a count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `e^{2πi·num/den}` evaluated with the numerator reduced first, which keeps
/// large integer phases exact.
#[inline]
pub fn root_of_unity<T: Real>(num: i64, den: usize) -> Complex<T> {
    let d = den as i64;
    let r = num.rem_euclid(d);
    let angle = T::two_pi() * from_usize::<T>(r as usize) / from_usize::<T>(den);
    Complex::new(angle.cos(), angle.sin())
}

/// `e^{2πi·x}` for a real number of cycles.
#[inline]
pub fn cis_cycles<T: Real>(x: T) -> Complex<T> {
    let angle = T::two_pi() * x;
    Complex::new(angle.cos(), angle.sin())
}
