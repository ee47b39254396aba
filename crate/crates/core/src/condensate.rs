//! Thomas–Fermi description of the trapped F = 1, m_F = -1 condensate.
//!
//! Positions are measured from the trap centre; `x`, `y` are radial and `z` is the
//! weak (long) trap axis. The kinetic energy is neglected for the condensate and for
//! the untrapped m_F = 0 band alike, so the m_F = 0 atoms only see the mean-field
//! potential `g |Φ|²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_MAGNETON, HBAR, RB87_F1_LANDE, RB87_MASS, RB87_SCATTERING_LENGTH};
use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    /// Atomic mass (kg).
    pub mass: f64,
    /// Landé factor g_F of the hyperfine manifold.
    pub lande_g: f64,
    /// s-wave scattering length (m).
    pub scattering_length: f64,
}

impl AtomSpecies {
    pub fn new(mass: f64, lande_g: f64, scattering_length: f64) -> Result<Self> {
        require_positive("mass", mass)?;
        require_positive("scattering_length", scattering_length)?;
        if !lande_g.is_finite() || lande_g == 0.0 {
            return Err(Error::domain("lande_g", "must be finite and non-zero"));
        }
        Ok(AtomSpecies {
            mass,
            lande_g,
            scattering_length,
        })
    }

    /// ⁸⁷Rb in F = 1 with the default scattering length.
    pub fn rubidium87() -> Self {
        AtomSpecies {
            mass: RB87_MASS,
            lande_g: RB87_F1_LANDE,
            scattering_length: RB87_SCATTERING_LENGTH,
        }
    }

    /// Contact interaction strength g = 4πħ²a_s/M (J m³).
    pub fn interaction(&self) -> f64 {
        4.0 * PI * HBAR * HBAR * self.scattering_length / self.mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Radial trap frequency (s⁻¹, angular).
    pub omega_r: f64,
    /// Axial trap frequency (s⁻¹, angular).
    pub omega_z: f64,
    /// Number of condensed atoms.
    pub atom_number: f64,
    /// Homogeneous offset field along z (T).
    pub b_offset: f64,
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("omega_r", self.omega_r)?;
        require_positive("omega_z", self.omega_z)?;
        require_positive("b_offset", self.b_offset)?;
        if !(self.atom_number.is_finite() && self.atom_number >= 1.0) {
            return Err(Error::domain(
                "atom_number",
                format!("must be >= 1, got {}", self.atom_number),
            ));
        }
        Ok(())
    }
}

/// μ = (15 N g ω_r² ω_z / 8π)^{2/5} (M/2)^{3/5}.
pub fn chemical_potential(species: &AtomSpecies, trap: &TrapConfig) -> Result<f64> {
    trap.validate()?;
    AtomSpecies::new(species.mass, species.lande_g, species.scattering_length)?;
    let g = species.interaction();
    let base = 15.0 * trap.atom_number * g * trap.omega_r.powi(2) * trap.omega_z / (8.0 * PI);
    Ok(base.powf(0.4) * (0.5 * species.mass).powf(0.6))
}

/// A condensate in the Thomas–Fermi regime. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensateModel {
    species: AtomSpecies,
    trap: TrapConfig,
    mu: f64,
    radii: [f64; 3],
}

impl CondensateModel {
    pub fn new(species: AtomSpecies, trap: TrapConfig) -> Result<Self> {
        let mu = chemical_potential(&species, &trap)?;
        let radius = |omega: f64| (2.0 * mu / (species.mass * omega * omega)).sqrt();
        let radii = [
            radius(trap.omega_r),
            radius(trap.omega_r),
            radius(trap.omega_z),
        ];
        Ok(CondensateModel {
            species,
            trap,
            mu,
            radii,
        })
    }

    pub fn species(&self) -> &AtomSpecies {
        &self.species
    }

    pub fn trap(&self) -> &TrapConfig {
        &self.trap
    }

    pub fn atom_number(&self) -> f64 {
        self.trap.atom_number
    }

    /// Chemical potential μ (J).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Width of the m_F = 0 band, μ/ħ (s⁻¹).
    pub fn bandwidth(&self) -> f64 {
        self.mu / HBAR
    }

    pub fn interaction(&self) -> f64 {
        self.species.interaction()
    }

    /// Thomas–Fermi radii (R_x, R_y, R_z) with R_i = sqrt(2μ / M ω_i²).
    pub fn tf_radii(&self) -> [f64; 3] {
        self.radii
    }

    /// Full extents 2R_i of the cloud.
    pub fn tf_diameters(&self) -> [f64; 3] {
        self.radii.map(|r| 2.0 * r)
    }

    /// R_x R_y R_z, the Jacobian of the map from scaled to physical coordinates.
    pub fn radii_product(&self) -> f64 {
        self.radii.iter().product()
    }

    /// Larmor frequency ω_L = |g_F| μ_B B_offs / ħ (s⁻¹).
    pub fn larmor_frequency(&self) -> f64 {
        self.species.lande_g.abs() * BOHR_MAGNETON * self.trap.b_offset / HBAR
    }

    /// Condensate phase-oscillation frequency ω_bec = (μ + ½ μ_B B_offs)/ħ (s⁻¹).
    pub fn bec_frequency(&self) -> f64 {
        (self.mu + 0.5 * BOHR_MAGNETON * self.trap.b_offset) / HBAR
    }

    /// Harmonic trap potential V_T(r) (J).
    pub fn trap_potential(&self, r: [f64; 3]) -> f64 {
        let m = self.species.mass;
        0.5 * m
            * (self.trap.omega_r.powi(2) * (r[0] * r[0] + r[1] * r[1])
                + self.trap.omega_z.powi(2) * r[2] * r[2])
    }

    /// Squared scaled radius Σ (r_i/R_i)²; equals V_T/μ and is 1 on the TF boundary.
    pub fn scaled_radius_sq(&self, r: [f64; 3]) -> f64 {
        (0..3).map(|i| (r[i] / self.radii[i]).powi(2)).sum()
    }

    /// Mean-field potential μ₀(r) = g Φ²(r) = max(μ − V_T(r), 0) felt by m_F = 0 atoms (J).
    pub fn scattering_potential(&self, r: [f64; 3]) -> f64 {
        (self.mu - self.trap_potential(r)).max(0.0)
    }

    /// Number density Φ²(r) = (μ − V_T)/g inside the cloud, zero outside (m⁻³).
    pub fn tf_density(&self, r: [f64; 3]) -> f64 {
        self.scattering_potential(r) / self.interaction()
    }

    /// Physical position of the scaled-coordinate point with radius `s`, polar cosine
    /// `cos_theta` (measured from the z axis) and azimuth `phi`.
    pub fn scaled_point(&self, s: f64, cos_theta: f64, phi: f64) -> [f64; 3] {
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        [
            self.radii[0] * s * sin_theta * phi.cos(),
            self.radii[1] * s * sin_theta * phi.sin(),
            self.radii[2] * s * cos_theta,
        ]
    }
}
