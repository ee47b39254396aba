//! Amplification thresholds.
//!
//! A root z = x + iy of z − Δ + iκ + K(z) = 0 satisfies −Im K(z) = y + κ and
//! Δ = x + Re K(z). The detuning only enters the real part, so for a given Ω the largest
//! growth rate over Δ is the root y* of Ω²H(y) = y + κ, where
//! H(y) = max_x [−Im K̂(x + iy)] is built from the unit-weight level shift K̂.
//! H is the maximum of a Poisson-smoothed positive density and decreases with y, so the
//! threshold is Ω_th*² = κ/H(0) and the optimal detuning follows from the maximiser.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use crate::coupling::{CouplingDensity, DimensionlessDensity};
use crate::error::{require_positive, Error, Result};
use crate::resolvent::{LevelShift, Propagator};
use crate::solve::{bisect, maximize};

use super::poles::{find_poles, Pole, SearchRect};

const SCAN: usize = 512;

/// Analytic threshold of a density in the γ → 0 limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Ω_th in s⁻¹.
    pub omega_th: f64,
    /// Δ_th in s⁻¹.
    pub delta_th: f64,
    pub kappa: f64,
    /// μ/ħ in s⁻¹.
    pub bandwidth: f64,
    pub x_max: f64,
    pub rho_bar_max: f64,
    /// P∫ρ̄(y)/(x_max − y) dy.
    pub principal_value: f64,
    /// Ω_th²/(κμ/ħ) = 1/(π ρ̄_max).
    pub omega_coefficient: f64,
    /// (Δ_th − μx_max/ħ)/κ = PV/(π ρ̄_max).
    pub detuning_coefficient: f64,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain("kappa", "must be finite and >= 0"))
    }
}

/// Ω_th = √(κμ/(πħρ̄_max)).
pub fn threshold_omega(density: &DimensionlessDensity, kappa: f64, bandwidth: f64) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive("bandwidth", bandwidth)?;
    require_positive("rho_bar_max", density.max_value)?;
    Ok((kappa * bandwidth / (std::f64::consts::PI * density.max_value)).sqrt())
}

/// P∫ρ̄(y)/(x − y) dy.
pub fn principal_value(density: &DimensionlessDensity, x: f64) -> Result<f64> {
    let d = density.density();
    let unit = LevelShift::new(d.with_total_weight(1.0)?, 0.0)?;
    Ok(unit.level_shift_on_axis(x * d.scale())?.re * d.scale())
}

/// Δ_th = μx_max/ħ + (ħΩ_th²/μ)·P∫ρ̄(y)/(x_max − y) dy.
pub fn threshold_detuning(
    density: &DimensionlessDensity,
    omega_th: f64,
    kappa: f64,
    bandwidth: f64,
) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive("bandwidth", bandwidth)?;
    let pv = principal_value(density, density.x_max)?;
    Ok(bandwidth * density.x_max + omega_th * omega_th / bandwidth * pv)
}

/// Both analytic thresholds with their dimensionless coefficients.
pub fn threshold_report(density: &CouplingDensity, kappa: f64) -> Result<ThresholdReport> {
    let bar = density.dimensionless()?;
    let w = density.scale();
    let omega_th = threshold_omega(&bar, kappa, w)?;
    let pv = principal_value(&bar, bar.x_max)?;
    let pi_rho = std::f64::consts::PI * bar.max_value;
    Ok(ThresholdReport {
        omega_th,
        delta_th: w * bar.x_max + omega_th * omega_th / w * pv,
        kappa,
        bandwidth: w,
        x_max: bar.x_max,
        rho_bar_max: bar.max_value,
        principal_value: pv,
        omega_coefficient: 1.0 / pi_rho,
        detuning_coefficient: pv / pi_rho,
    })
}

/// Largest growth rate over all detunings for one coupling strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthOptimum {
    /// max_Δ Im z* in s⁻¹; negative values are Ω²H(0) − κ, a stability margin.
    pub growth: f64,
    /// Detuning that attains it (s⁻¹).
    pub detuning: f64,
    /// Re z* at the optimum (s⁻¹).
    pub frequency: f64,
}

/// Threshold without the γ → 0 and peak-density approximations.
#[derive(Debug, Clone, Serialize)]
pub struct ExactThreshold {
    pub omega_th: f64,
    pub delta_th: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// Re z* of the marginal root (s⁻¹).
    pub frequency: f64,
    /// H(0) = max_x [−Im K̂(x + i0)] in s.
    pub h0: f64,
    /// Root found by the pole search at (Ω_th*, Δ_th*), if any.
    pub pole: Option<Pole>,
}

/// Scans of H(y) for a fixed density shape and cut offset γ.
pub struct ThresholdScan {
    unit: LevelShift,
    interval: (f64, f64),
    x_tol: f64,
}

impl ThresholdScan {
    pub fn new(density: &CouplingDensity, gamma: f64) -> Result<Self> {
        let unit = LevelShift::new(density.with_total_weight(1.0)?, gamma)?;
        let x_tol = 1e-12 * density.scale();
        Ok(ThresholdScan {
            unit,
            interval: density.search_interval(),
            x_tol,
        })
    }

    /// (argmax, max) of −Im K̂(x + iy) over x.
    pub fn h(&self, y: f64) -> Result<(f64, f64)> {
        let failure = RefCell::new(None);
        let (lo, hi) = self.interval;
        let best = maximize(
            |x| match self.unit.level_shift(Complex64::new(x, y)) {
                Ok(k) => -k.im,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            SCAN,
            self.x_tol,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(best),
        }
    }

    /// max over Δ of Im z* at coupling Ω.
    pub fn optimum(&self, omega: f64, kappa: f64) -> Result<GrowthOptimum> {
        let omega_sq = omega * omega;
        let (x0, h0) = self.h(0.0)?;
        let margin = omega_sq * h0 - kappa;
        let (y, x) = if margin <= 0.0 {
            (margin, x0)
        } else {
            let failure = RefCell::new(None);
            let f = |y: f64| match self.h(y) {
                Ok((_, h)) => omega_sq * h - y - kappa,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let y = bisect(f, 0.0, margin, 1e-13 * self.unit.scale()).ok_or(Error::Bracket {
                lo: 0.0,
                hi: margin,
                detail: "growth-rate equation has no sign change".into(),
            })?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            (y, self.h(y)?.0)
        };
        let z = Complex64::new(x, y.max(0.0));
        let k = omega_sq * self.unit.level_shift(z)?;
        Ok(GrowthOptimum {
            growth: y,
            detuning: x + k.re,
            frequency: x,
        })
    }
}

/// Exact threshold Ω_th* = √(κ/H(0)) and the detuning that reaches it, checked against
/// the pole search.
pub fn threshold_exact(
    density: &CouplingDensity,
    gamma: f64,
    kappa: f64,
) -> Result<ExactThreshold> {
    require_positive("kappa", kappa)?;
    let scan = ThresholdScan::new(density, gamma)?;
    let (x, h0) = scan.h(0.0)?;
    if !(h0 > 0.0) {
        let (lo, hi) = density.search_interval();
        return Err(Error::Bracket {
            lo,
            hi,
            detail: "the density vanishes on the scan range".into(),
        });
    }
    let omega_th = (kappa / h0).sqrt();
    let k = omega_th * omega_th * scan.unit.level_shift(Complex64::new(x, 0.0))?;
    let delta_th = x + k.re;

    let level_shift = LevelShift::new(density.with_total_weight(omega_th * omega_th)?, gamma)?;
    let propagator = Propagator::new(level_shift, delta_th, kappa)?;
    let rect = SearchRect::around(&propagator);
    let pole = find_poles(&propagator, &rect)?.dominant(delta_th).copied();
    Ok(ExactThreshold {
        omega_th,
        delta_th,
        gamma,
        kappa,
        frequency: x,
        h0,
        pole,
    })
}
