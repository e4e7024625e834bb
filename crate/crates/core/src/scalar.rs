//! Scalar abstraction for the analysis routines.
//!
//! All closed-form and root-finding math is generic over [`Real`], so it runs
//! on `f32` as well as `f64`. Residual tolerances are specified as `f64`
//! constants and widened to a few machine epsilons when the working type is
//! coarser than the default targets.

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable by the analysis code.
pub trait Real: Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + 'static {}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + 'static {}

/// Lift an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal representable in scalar type")
}

/// `1/e`, the channel capacity of slotted Aloha.
#[inline]
pub(crate) fn e_inv<F: Real>() -> F {
    F::E().recip()
}

/// `tol` widened to a few machine epsilons of `F`, so that tolerances written
/// for `f64` remain reachable on coarser scalar types.
#[inline]
pub(crate) fn tol_for<F: Real>(tol: f64) -> F {
    lit::<F>(tol).max(F::epsilon() * lit(8.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_widens_for_f32() {
        assert_eq!(tol_for::<f64>(1e-12), 1e-12);
        assert!(tol_for::<f32>(1e-12) > 1e-7);
    }
}
