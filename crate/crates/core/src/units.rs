//! Unit conventions.
//!
//! Inputs are wavenumbers (cm^-1) and times (fs). Internally every frequency
//! is an angular frequency in rad/fs, `omega = 2 pi c nu`, with
//! `c = 2.99792458e-5 cm/fs`, and hbar = 1 so energies and angular
//! frequencies coincide.

use std::f64::consts::PI;

/// Speed of light in cm/fs.
pub const C_CM_PER_FS: f64 = 2.99792458e-5;

/// rad/fs per cm^-1.
pub const RADFS_PER_WAVENUMBER: f64 = 2.0 * PI * C_CM_PER_FS;

/// Convert a wavenumber in cm^-1 to an angular frequency in rad/fs.
#[inline]
pub fn wavenumber_to_radfs(nu: f64) -> f64 {
    nu * RADFS_PER_WAVENUMBER
}

/// Convert an angular frequency in rad/fs back to cm^-1.
#[inline]
pub fn radfs_to_wavenumber(omega: f64) -> f64 {
    omega / RADFS_PER_WAVENUMBER
}

/// Convert an ordinary frequency in MHz to rad/fs. Used by the slow
/// (single-molecule) spectral-diffusion scenarios quoted in MHz.
#[inline]
pub fn mhz_to_radfs(f: f64) -> f64 {
    2.0 * PI * f * 1e-9
}
