//! Scalar abstraction shared by the propagation, utility and allocation code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the simulator can run on (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    /// `10^(x/10)`.
    fn from_db(db: Self) -> Self {
        Self::of(10.0).powf(db / Self::of(10.0))
    }

    fn to_db(self) -> Self {
        Self::of(10.0) * self.log10()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// dBm to watts.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    T::from_db(dbm - T::of(30.0))
}

/// Watts to dBm.
pub fn watts_to_dbm<T: Real>(w: T) -> T {
    w.to_db() + T::of(30.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minus_ninety_dbm_is_a_picowatt() {
        assert_relative_eq!(dbm_to_watts(-90.0_f64), 1e-12, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(-90.0_f32), 1e-12, max_relative = 1e-5);
        assert_relative_eq!(watts_to_dbm(1.0_f64), 30.0);
    }

    #[test]
    fn db_round_trip() {
        for db in [-137.5, -3.0, 0.0, 12.25] {
            assert_relative_eq!(f64::from_db(db).to_db(), db, epsilon = 1e-12);
        }
    }
}
