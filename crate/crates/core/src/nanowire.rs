//! Magnetic field of the current-carrying nanowire and its transverse gradients.
//!
//! Coordinates are centred on the condensate. The wire runs parallel to z through
//! `(0, -d, 0)`, so the distance `d` lies along the vibration direction y. The current
//! flows along +z for `current > 0`.
//!
//! Three geometries are supported: a point dipole (`L ≪ d`), an infinitely long wire
//! (`L ≫ d`), and a finite filament of length `L` whose centre line is displaced in y by
//! `q cos(πz/L)` (the fundamental-mode shape, zero at the clamps).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, MU0_OVER_4PI};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::{adaptive_gauss_legendre, QuadValue};

/// Relative tolerance of the Biot–Savart line integrals.
pub const BIOT_SAVART_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Dipole,
    Infinite,
    Bent,
}

/// Which field derivative couples the vibration to the atoms for the finite filament.
///
/// `Spatial` uses the transverse gradient ∂_y B of the filament field, i.e. the wire is
/// translated as a whole by the vibration. `Modal` differentiates the field with respect
/// to the amplitude of the cos(πz/L) mode, which also tilts the current elements.
/// Both coincide for the dipole and infinite-wire geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingGradient {
    #[default]
    Spatial,
    Modal,
}

/// Mechanical damping of the vibration mode, given either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    QualityFactor(f64),
    Rate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NanowireModel {
    pub geometry: Geometry,
    /// Wire length L (m).
    pub length: f64,
    /// Distance d from the condensate centre to the wire (m).
    pub distance: f64,
    /// Current I (A).
    pub current: f64,
    /// Mechanical frequency ω_nw (s⁻¹, angular).
    pub omega: f64,
    /// Modal (effective) mass (kg).
    pub effective_mass: f64,
    /// Energy-amplitude decay rate κ (s⁻¹).
    pub kappa: f64,
    /// Static amplitude of the sinusoidal bend of the filament (m), `Bent` only.
    pub bend_amplitude: f64,
    pub coupling_gradient: CouplingGradient,
}

/// Transverse derivatives of the wire field at one point (T/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGradient {
    /// ∂_y B_x
    pub dbx_dy: f64,
    /// ∂_y B_y
    pub dby_dy: f64,
    /// (∂B_x/∂q, ∂B_y/∂q) with respect to the mode amplitude, finite filament only.
    pub modal: Option<(f64, f64)>,
}

impl NanowireModel {
    pub fn new(
        geometry: Geometry,
        length: f64,
        distance: f64,
        current: f64,
        omega: f64,
        effective_mass: f64,
        damping: Damping,
    ) -> Result<Self> {
        require_positive("distance", distance)?;
        require_positive("omega_nw", omega)?;
        require_positive("effective_mass", effective_mass)?;
        if geometry != Geometry::Infinite {
            require_positive("length", length)?;
        }
        if !current.is_finite() || current == 0.0 {
            return Err(Error::domain("current", "must be finite and non-zero"));
        }
        let kappa = match damping {
            Damping::QualityFactor(q) => {
                require_positive("quality_factor", q)?;
                omega / q
            }
            Damping::Rate(k) => {
                if !(k.is_finite() && k >= 0.0) {
                    return Err(Error::domain("kappa", "must be finite and >= 0"));
                }
                k
            }
        };
        Ok(NanowireModel {
            geometry,
            length,
            distance,
            current,
            omega,
            effective_mass,
            kappa,
            bend_amplitude: 0.0,
            coupling_gradient: CouplingGradient::Spatial,
        })
    }

    pub fn with_bend_amplitude(mut self, q: f64) -> Self {
        self.bend_amplitude = q;
        self
    }

    pub fn with_coupling_gradient(mut self, g: CouplingGradient) -> Self {
        self.coupling_gradient = g;
        self
    }

    pub fn with_current(mut self, current: f64) -> Self {
        self.current = current;
        self
    }

    /// Zero-point amplitude sqrt(ħ / 2 m_eff ω_nw) of the vibration mode (m).
    pub fn zero_point_amplitude(&self) -> f64 {
        (HBAR / (2.0 * self.effective_mass * self.omega)).sqrt()
    }

    /// Field of the configured geometry at `r`.
    pub fn field(&self, r: [f64; 3]) -> Result<[f64; 3]> {
        match self.geometry {
            Geometry::Dipole => self.field_dipole(r),
            Geometry::Infinite => self.field_infinite(r),
            Geometry::Bent => self.field_bent(r, self.bend_amplitude),
        }
    }

    /// Short-wire limit B = μ₀IL ẑ×(r+d) / 4π|r+d|³.
    pub fn field_dipole(&self, r: [f64; 3]) -> Result<[f64; 3]> {
        let rel = self.offset(r);
        let rho2 = rel.norm_sq();
        if rho2 == 0.0 {
            return Err(Error::Singularity { point: r });
        }
        let c = MU0_OVER_4PI * self.current * self.length / (rho2 * rho2.sqrt());
        Ok([-c * rel.y, c * rel.x, 0.0])
    }

    /// Infinite wire B = μ₀I ẑ×(r+d) / 2π|r+d|², distance taken in the xy-plane.
    pub fn field_infinite(&self, r: [f64; 3]) -> Result<[f64; 3]> {
        let rel = self.offset(r);
        let rho2 = rel.x * rel.x + rel.y * rel.y;
        if rho2 == 0.0 {
            return Err(Error::Singularity { point: r });
        }
        let c = 2.0 * MU0_OVER_4PI * self.current / rho2;
        Ok([-c * rel.y, c * rel.x, 0.0])
    }

    /// Biot–Savart field of the finite filament with centre line
    /// `(0, -d + q cos(πz'/L), z')`, `z' ∈ [-L/2, L/2]`.
    pub fn field_bent(&self, r: [f64; 3], q: f64) -> Result<[f64; 3]> {
        self.check_filament(r, q)?;
        let v = self.filament_integral(r, |z| {
            let el = self.element(r, q, z);
            el.dl.cross(el.rel) * el.inv_rho3
        });
        Ok((v * (MU0_OVER_4PI * self.current)).into())
    }

    /// Transverse gradient (∂_y B_x, ∂_y B_y), analytic for every geometry; the finite
    /// filament also reports the mode-amplitude derivative at its configured bend.
    pub fn grad_y(&self, r: [f64; 3]) -> Result<FieldGradient> {
        match self.geometry {
            Geometry::Dipole => {
                let rel = self.offset(r);
                let rho2 = rel.norm_sq();
                if rho2 == 0.0 {
                    return Err(Error::Singularity { point: r });
                }
                let rho = rho2.sqrt();
                let c = MU0_OVER_4PI * self.current * self.length;
                let inv3 = 1.0 / (rho2 * rho);
                let inv5 = inv3 / rho2;
                Ok(FieldGradient {
                    dbx_dy: c * (-inv3 + 3.0 * rel.y * rel.y * inv5),
                    dby_dy: -3.0 * c * rel.x * rel.y * inv5,
                    modal: None,
                })
            }
            Geometry::Infinite => {
                let rel = self.offset(r);
                let rho2 = rel.x * rel.x + rel.y * rel.y;
                if rho2 == 0.0 {
                    return Err(Error::Singularity { point: r });
                }
                let c = 2.0 * MU0_OVER_4PI * self.current;
                Ok(FieldGradient {
                    dbx_dy: -c * (1.0 / rho2 - 2.0 * rel.y * rel.y / (rho2 * rho2)),
                    dby_dy: -2.0 * c * rel.x * rel.y / (rho2 * rho2),
                    modal: None,
                })
            }
            Geometry::Bent => {
                let q = self.bend_amplitude;
                self.check_filament(r, q)?;
                let spatial = self.spatial_gradient_bent(r, q);
                let modal = self.modal_derivative(r, q);
                Ok(FieldGradient {
                    dbx_dy: spatial.x,
                    dby_dy: spatial.y,
                    modal: Some((modal.x, modal.y)),
                })
            }
        }
    }

    /// The gradient pair (G_x, G_y) entering the atom–vibration coupling. For the finite
    /// filament in `Modal` mode this is -∂B/∂q, which equals ∂_y B for a rigid shift.
    pub fn coupling_gradient(&self, r: [f64; 3]) -> Result<(f64, f64)> {
        if self.geometry != Geometry::Bent {
            let g = self.grad_y(r)?;
            return Ok((g.dbx_dy, g.dby_dy));
        }
        let q = self.bend_amplitude;
        self.check_filament(r, q)?;
        Ok(match self.coupling_gradient {
            CouplingGradient::Spatial => {
                let g = self.spatial_gradient_bent(r, q);
                (g.x, g.y)
            }
            CouplingGradient::Modal => {
                let g = self.modal_derivative(r, q);
                (-g.x, -g.y)
            }
        })
    }

    fn spatial_gradient_bent(&self, r: [f64; 3], q: f64) -> Vec3 {
        self.filament_integral(r, |z| {
            let el = self.element(r, q, z);
            let inv5 = el.inv_rho3 / el.rel.norm_sq();
            Vec3::new(-1.0, 0.0, 0.0) * el.inv_rho3 - el.dl.cross(el.rel) * (3.0 * el.rel.y * inv5)
        }) * (MU0_OVER_4PI * self.current)
    }

    /// ∂B/∂q under the integral sign: the displaced elements both move and tilt.
    fn modal_derivative(&self, r: [f64; 3], q: f64) -> Vec3 {
        let k = PI / self.length;
        self.filament_integral(r, |z| {
            let el = self.element(r, q, z);
            let u = (k * z).cos();
            let du = -k * (k * z).sin();
            let inv5 = el.inv_rho3 / el.rel.norm_sq();
            Vec3::new(du * el.rel.z + u, 0.0, -du * el.rel.x) * el.inv_rho3
                + el.dl.cross(el.rel) * (3.0 * u * el.rel.y * inv5)
        }) * (MU0_OVER_4PI * self.current)
    }

    fn offset(&self, r: [f64; 3]) -> Vec3 {
        Vec3::new(r[0], r[1] + self.distance, r[2])
    }

    fn element(&self, r: [f64; 3], q: f64, z: f64) -> Element {
        let k = PI / self.length;
        let u = (k * z).cos();
        let du = -k * (k * z).sin();
        let rel = Vec3::new(r[0], r[1] + self.distance - q * u, r[2] - z);
        let rho2 = rel.norm_sq();
        Element {
            dl: Vec3::new(0.0, q * du, 1.0),
            rel,
            inv_rho3: 1.0 / (rho2 * rho2.sqrt()),
        }
    }

    fn check_filament(&self, r: [f64; 3], q: f64) -> Result<()> {
        let half = 0.5 * self.length;
        if r[2].abs() <= half {
            let u = (PI * r[2] / self.length).cos();
            let dx = r[0];
            let dy = r[1] + self.distance - q * u;
            if (dx * dx + dy * dy).sqrt() <= 1e-12 * self.distance {
                return Err(Error::Singularity { point: r });
            }
        }
        Ok(())
    }

    fn filament_integral(&self, r: [f64; 3], f: impl Fn(f64) -> Vec3) -> Vec3 {
        let half = 0.5 * self.length;
        let inner = r[2].clamp(-half, half);
        let mut total = Vec3::zero();
        for (a, b) in [(-half, inner), (inner, half)] {
            if b > a {
                total = total + adaptive_gauss_legendre(&f, a, b, 16, BIOT_SAVART_REL_TOL, 40);
            }
        }
        total
    }
}

struct Element {
    dl: Vec3,
    rel: Vec3,
    inv_rho3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Vec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl Vec3 {
    fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }
    fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
    fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}
impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}
impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}
impl QuadValue for Vec3 {
    fn zero() -> Self {
        Vec3::new(0.0, 0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm_sq().sqrt()
    }
}
impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}
