use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar the solvers are generic over. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative slack for internal tie decisions, a few thousand ulps above machine epsilon.
    fn solver_tol() -> Self {
        Self::epsilon() * Self::lit(4096.0)
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the scalar")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `|a - b| <= tol * (1 + max(|a|, |b|))`.
pub fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs()))
}

pub(crate) fn fmax<T: Scalar>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

pub(crate) fn fmin<T: Scalar>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}
