//! Physical constants (CODATA 2018) and species data.

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Vacuum permeability (T m / A).
pub const MU0: f64 = 1.256_637_062_12e-6;
/// `MU0 / 4 pi`, the Biot–Savart prefactor (T m / A).
pub const MU0_OVER_4PI: f64 = MU0 / (4.0 * std::f64::consts::PI);
/// Bohr radius (m).
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Mass of a ⁸⁷Rb atom (kg).
pub const RB87_MASS: f64 = 1.4432e-25;
/// Landé factor of the ⁸⁷Rb F = 1 ground-state manifold.
pub const RB87_F1_LANDE: f64 = -0.5;
/// s-wave scattering length used for ⁸⁷Rb F = 1 unless configured otherwise (m).
pub const RB87_SCATTERING_LENGTH: f64 = 5.31e-9;
