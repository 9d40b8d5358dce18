//! Real scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar (`f32` or `f64`) underlying all complex matrices.
///
/// Numerical thresholds scale with the precision of the type, so the same
/// algorithms run in single precision with correspondingly looser checks.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Entrywise tolerance for Hermiticity, unitarity and trace checks.
    const CHECK_TOL: f64;
    /// Relative eigenvalue cutoff below which an eigenvalue is treated as zero.
    const SUPPORT_REL_CUTOFF: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn check_tol() -> Self {
        Self::lit(Self::CHECK_TOL)
    }

    /// Support cutoff for a spectrum whose largest eigenvalue is `lambda_max`.
    fn support_cutoff(lambda_max: Self) -> Self {
        Self::lit(Self::SUPPORT_REL_CUTOFF) * lambda_max.max(Self::one())
    }
}

impl Real for f64 {
    const CHECK_TOL: f64 = 1e-10;
    const SUPPORT_REL_CUTOFF: f64 = 1e-10;
}

impl Real for f32 {
    const CHECK_TOL: f64 = 1e-4;
    const SUPPORT_REL_CUTOFF: f64 = 1e-5;
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
