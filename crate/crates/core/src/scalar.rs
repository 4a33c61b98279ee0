//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type the solvers are generic over.
///
/// Implemented for `f32` and `f64`. The tolerances below are expressed in
/// the precision of the type so that `f32` runs do not chase digits they
/// cannot represent.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Short name recorded in reports.
    const NAME: &'static str;

    /// Converts an `f64` literal. Never fails for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Snapping tolerance used for probabilities and event times (`1e-12`
    /// in double precision).
    #[inline]
    fn snap() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Tolerance for continuity of piecewise curves (`1e-9` in double
    /// precision).
    #[inline]
    fn continuity() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(4096.0))
    }

    /// `e / (e - 1)`, the classical randomized ratio.
    #[inline]
    fn classical_ratio() -> Self {
        Self::E() / (Self::E() - Self::one())
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_follow_precision() {
        assert_eq!(<f64 as Scalar>::snap(), 1e-12);
        assert!(<f32 as Scalar>::snap() > 1e-7);
        assert!((f64::classical_ratio() - 1.581_976_706_869_326_5).abs() < 1e-15);
    }
}
