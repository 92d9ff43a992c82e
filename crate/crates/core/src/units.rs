//! Physical constants and unit conversions.
//!
//! Internally lengths are in um, times in us and frequencies are angular
//! (rad/us). Configuration files and reports use f/2pi in MHz. Note that
//! 1 m/s == 1 um/us, so SI speeds carry over unchanged.

use std::f64::consts::TAU;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of one 87Rb atom (87 u), kg.
pub const RB87_MASS: f64 = 87.0 * ATOMIC_MASS_UNIT;

/// f/2pi in MHz -> angular frequency in rad/us.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

/// Angular frequency in rad/us -> f/2pi in MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// Time for `cycles` interaction cycles at median strength `jm_mhz` (J_m/2pi).
#[inline]
pub fn cycles_to_time(cycles: f64, jm_mhz: f64) -> f64 {
    cycles / jm_mhz
}

#[inline]
pub fn time_to_cycles(t: f64, jm_mhz: f64) -> f64 {
    jm_mhz * t
}
