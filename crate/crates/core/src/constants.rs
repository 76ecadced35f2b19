//! Physical constants (CODATA 2018 exact/recommended values, SI units).

/// Fixed set of physical constants used by every model in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum (m/s).
    pub c: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Standard gravitational acceleration (m/s²).
    pub g_acc: f64,
    /// Stefan-Boltzmann constant (W/m²/K⁴).
    pub sigma_sb: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    c: 299_792_458.0,
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    g_acc: 9.806_65,
    sigma_sb: 5.670_374_419e-8,
};

pub const C: f64 = CONSTANTS.c;
pub const HBAR: f64 = CONSTANTS.hbar;
pub const K_B: f64 = CONSTANTS.k_b;
pub const G_ACC: f64 = CONSTANTS.g_acc;
pub const SIGMA_SB: f64 = CONSTANTS.sigma_sb;
