//! Position-dependent atom–vibration coupling η(r), the collective coupling Ω and the
//! coupling density ρ(ω) of the inhomogeneously broadened spin band.
//!
//! Integrals over the cloud use scaled coordinates r = (R_x s sinθ cosφ, R_y s sinθ sinφ,
//! R_z s cosθ), in which the trap potential is μs² and the local band energy is μ(1−s²).
//! The delta function selecting ħω = μ(1−s²) then picks a single shell
//! s = √(1 − ħω/μ), so ρ(ω) reduces to an angular integral without any binning.

pub mod density;

pub use density::{CouplingDensity, DensityFn, DensityKind, DimensionlessDensity, LorentzianFit};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::condensate::CondensateModel;
use crate::constants::{BOHR_MAGNETON, HBAR};
use crate::error::{Error, Result};
use crate::nanowire::NanowireModel;
use crate::quadrature::{gauss_legendre, gauss_legendre_rule, pairwise_sum};

/// Source of η(r).
#[derive(Debug, Clone)]
pub enum EtaSource {
    Nanowire(NanowireModel),
    /// The same η at every point of the cloud.
    Uniform(Complex64),
}

#[derive(Debug, Clone)]
pub struct CouplingField {
    condensate: CondensateModel,
    source: EtaSource,
}

/// Quadrature settings for cloud integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellQuadrature {
    /// Uniform ρ nodes on `[0, μ/ħ]`, ends included.
    pub nodes: usize,
    /// Starting Gauss–Legendre order for each of cosθ and φ.
    pub angular_order: usize,
    /// Starting Gauss–Legendre order in the scaled radius (Ω only).
    pub radial_order: usize,
    /// Relative agreement required between an order and its doubling.
    pub rel_tol: f64,
    /// Upper limit for the doubled orders.
    pub max_order: usize,
}

impl Default for ShellQuadrature {
    fn default() -> Self {
        ShellQuadrature {
            nodes: 513,
            angular_order: 32,
            radial_order: 24,
            rel_tol: 1e-5,
            max_order: 256,
        }
    }
}

/// Ω together with the orders that met the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveCoupling {
    pub omega: f64,
    pub radial_order: usize,
    pub angular_order: usize,
}

impl CouplingField {
    pub fn new(condensate: CondensateModel, nanowire: NanowireModel) -> Self {
        CouplingField {
            condensate,
            source: EtaSource::Nanowire(nanowire),
        }
    }

    pub fn uniform(condensate: CondensateModel, eta: Complex64) -> Self {
        CouplingField {
            condensate,
            source: EtaSource::Uniform(eta),
        }
    }

    pub fn condensate(&self) -> &CondensateModel {
        &self.condensate
    }

    pub fn source(&self) -> &EtaSource {
        &self.source
    }

    /// η(r) = g_F μ_B (∂_yB_x − i ∂_yB_y) / (2√(ħ m_eff ω_nw)), in s⁻¹.
    pub fn eta(&self, r: [f64; 3]) -> Result<Complex64> {
        match &self.source {
            EtaSource::Uniform(e) => Ok(*e),
            EtaSource::Nanowire(w) => {
                let (gx, gy) = w.coupling_gradient(r)?;
                Ok(Complex64::new(gx, -gy) * eta_prefactor(&self.condensate, w))
            }
        }
    }

    /// Ω = [∫|η|²Φ² d³r]^{1/2}, doubling the radial and angular orders until two
    /// successive results agree to `opts.rel_tol`.
    pub fn collective_coupling(&self, opts: &ShellQuadrature) -> Result<CollectiveCoupling> {
        let c = &self.condensate;
        let pref = c.radii_product() * c.mu() / c.interaction();
        let mut angular = opts.angular_order;
        let mut radial = opts.radial_order;
        let mut prev = self.radial_integral(radial, angular)?;
        loop {
            let (nr, na) = (2 * radial, 2 * angular);
            if nr > opts.max_order || na > opts.max_order {
                return Err(Error::NonConvergence {
                    context: "collective coupling".into(),
                    estimate: (pref * prev).sqrt(),
                    error: 0.5 * (pref * prev).sqrt() * opts.rel_tol,
                    intervals: radial,
                    evaluations: radial * angular * angular,
                });
            }
            let next = self.radial_integral(nr, na)?;
            let converged = (next - prev).abs() <= opts.rel_tol * next.abs();
            radial = nr;
            angular = na;
            prev = next;
            if converged {
                return Ok(CollectiveCoupling {
                    omega: (pref * prev).sqrt(),
                    radial_order: radial,
                    angular_order: angular,
                });
            }
        }
    }

    /// ∫₀¹ s²(1 − s²) A(s) ds with A the angular integral of |η|².
    fn radial_integral(&self, radial: usize, angular: usize) -> Result<f64> {
        let (x, w) = gauss_legendre(radial);
        let rule = AngularRule::new(angular);
        let terms: Vec<f64> = x
            .par_iter()
            .zip(&w)
            .map(|(&t, &wt)| {
                let s = 0.5 * (t + 1.0);
                Ok(0.5 * wt * s * s * (1.0 - s * s) * rule.integrate(self, s)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&terms))
    }

    /// A(s) = ∫ |η(R s n̂)|² dΩ_n̂ with the order doubled until converged.
    fn shell_integral(&self, s: f64, opts: &ShellQuadrature) -> Result<f64> {
        if let EtaSource::Uniform(e) = self.source {
            return Ok(4.0 * PI * e.norm_sqr());
        }
        let mut order = opts.angular_order;
        let mut prev = AngularRule::new(order).integrate(self, s)?;
        while 2 * order <= opts.max_order {
            order *= 2;
            let next = AngularRule::new(order).integrate(self, s)?;
            if (next - prev).abs() <= opts.rel_tol * next.abs() {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::NonConvergence {
            context: format!("angular integral on shell s = {s}"),
            estimate: prev,
            error: f64::NAN,
            intervals: order,
            evaluations: order * order,
        })
    }

    /// ρ(ω) = R_xR_yR_z ħ² ω s A(s) / (2μg) with s = √(1 − ħω/μ), tabulated on
    /// `opts.nodes` points and interpolated monotonically.
    pub fn density_numerical(&self, opts: &ShellQuadrature) -> Result<CouplingDensity> {
        if opts.nodes < 3 {
            return Err(Error::domain("coupling.nodes", "need at least 3 nodes"));
        }
        let c = &self.condensate;
        let band = c.bandwidth();
        let pref = c.radii_product() * HBAR * HBAR / (2.0 * c.mu() * c.interaction());
        let last = opts.nodes - 1;
        let values = (0..opts.nodes)
            .into_par_iter()
            .map(|i| {
                if i == 0 || i == last {
                    return Ok(0.0);
                }
                let omega = band * i as f64 / last as f64;
                let s = (1.0 - omega / band).sqrt();
                Ok(pref * omega * s * self.shell_integral(s, opts)?)
            })
            .collect::<Result<Vec<_>>>()?;
        CouplingDensity::tabulated(band, values)
    }
}

/// Closed-form density for η ≡ η₀ over the cloud; Ω² = N|η₀|².
pub fn density_closed_form(condensate: &CondensateModel, eta0: f64) -> Result<CouplingDensity> {
    CouplingDensity::thomas_fermi(
        condensate.bandwidth(),
        condensate.atom_number() * eta0 * eta0,
    )
}

/// g_F μ_B / (2√(ħ m_eff ω_nw)), in s⁻¹ per (T/m).
pub fn eta_prefactor(condensate: &CondensateModel, wire: &NanowireModel) -> f64 {
    condensate.species().lande_g * BOHR_MAGNETON
        / (2.0 * (HBAR * wire.effective_mass * wire.omega).sqrt())
}

/// Tensor Gauss–Legendre rule over (cosθ, φ).
struct AngularRule {
    cos_theta: Vec<f64>,
    phi: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularRule {
    fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre_rule(n);
        let mut cos_theta = Vec::with_capacity(n * n);
        let mut phi = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&xc, &wc) in x.iter().zip(w) {
            for (&xp, &wp) in x.iter().zip(w) {
                cos_theta.push(xc);
                phi.push(PI * (xp + 1.0));
                weights.push(wc * wp * PI);
            }
        }
        AngularRule {
            cos_theta,
            phi,
            weights,
        }
    }

    fn integrate(&self, field: &CouplingField, s: f64) -> Result<f64> {
        if let EtaSource::Uniform(e) = field.source {
            return Ok(4.0 * PI * e.norm_sqr());
        }
        let terms = (0..self.weights.len())
            .map(|k| {
                let r = field
                    .condensate
                    .scaled_point(s, self.cos_theta[k], self.phi[k]);
                Ok(self.weights[k] * field.eta(r)?.norm_sqr())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }
}
