use crate::num::Real;
use crate::propagation::brb_rate;

use super::Brb;

/// Value of `brb` to a D-BS: link rate minus `zeta` times the BRB price.
/// `zeta` is in bit/s per price unit.
pub fn dbs_utility<T: Real>(brb: &Brb<T>, gamma: T, zeta: T) -> T {
    brb_rate(brb.bandwidth_hz, gamma) - zeta * brb.price.to_real::<T>()
}

/// Value of an applicant to a BRB: the rate the link would carry.
pub fn brb_utility<T: Real>(gamma: T, omega: T) -> T {
    brb_rate(omega, gamma)
}
