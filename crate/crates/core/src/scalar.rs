//! Scalar abstraction shared by every numerical kernel in the crate.
//!
//! Kernels are written against [`Real`] so the same code runs in `f32` or
//! `f64`. The purely combinatorial parts of the expansion only need
//! [`num_traits::Num`] and also accept exact rationals.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + serde::Serialize
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Widens a scalar to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// An absolute threshold stated for `f64`, widened so that it stays
/// meaningful in lower precision: `max(base, 256 ε)`.
#[inline]
pub fn tolerance<T: Real>(base: f64) -> T {
    let floor = T::epsilon() * cast::<T>(256.0);
    let base = cast::<T>(base);
    if base > floor {
        base
    } else {
        floor
    }
}

/// Hartree to kcal/mol.
pub const HARTREE_TO_KCAL_PER_MOL: f64 = 627.509474;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_widens_for_f32() {
        assert_eq!(tolerance::<f64>(1e-10), 1e-10);
        assert!(tolerance::<f32>(1e-10) > 1e-6);
    }
}
