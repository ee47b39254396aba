//! Coupling spectral density ρ(ω) and its dimensionless form ρ̄(x).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{integrate, Tolerance};
use crate::solve::maximize;

/// Value or derivative of a user-supplied density shape.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// Constant-η Thomas–Fermi form.
    ClosedForm,
    /// Tabulated from the spatially resolved coupling.
    Numerical,
    Lorentzian,
    Custom,
}

#[derive(Clone)]
pub(crate) enum Shape {
    /// Unit-weight `(15/4) x √(1−x) / W` with `x = ω/W`.
    ThomasFermi,
    Tabulated(Arc<MonotoneCubic>),
    /// Unit-weight Lorentzian, `(Γ/π) / ((ω−ω₀)² + Γ²)`.
    Lorentzian {
        center: f64,
        half_width: f64,
    },
    Custom {
        value: DensityFn,
        derivative: DensityFn,
    },
}

/// ρ(ω) in s⁻¹ (rate² per unit angular frequency) together with its total weight Ω².
#[derive(Clone)]
pub struct CouplingDensity {
    pub(crate) shape: Shape,
    kind: DensityKind,
    support: (f64, f64),
    /// Band width μ/ħ that sets the natural rate scale.
    scale: f64,
    /// Multiplies the raw shape.
    norm: f64,
    total_weight: f64,
}

impl fmt::Debug for CouplingDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingDensity")
            .field("kind", &self.kind)
            .field("support", &self.support)
            .field("scale", &self.scale)
            .field("total_weight", &self.total_weight)
            .finish()
    }
}

impl CouplingDensity {
    /// Closed form ρ(ω) = (15/4) Ω² ω √(W−ω) / W^{5/2} on `[0, W]`.
    pub fn thomas_fermi(bandwidth: f64, total_weight: f64) -> Result<Self> {
        check_scale(bandwidth)?;
        check_weight(total_weight)?;
        Ok(CouplingDensity {
            shape: Shape::ThomasFermi,
            kind: DensityKind::ClosedForm,
            support: (0.0, bandwidth),
            scale: bandwidth,
            norm: total_weight,
            total_weight,
        })
    }

    /// Monotone-cubic interpolant through uniformly spaced samples on `[0, bandwidth]`.
    /// The end values are pinned to zero.
    pub fn tabulated(bandwidth: f64, mut values: Vec<f64>) -> Result<Self> {
        check_scale(bandwidth)?;
        if values.len() < 3 {
            return Err(Error::domain("density_nodes", "need at least 3 nodes"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("density_values", "must be finite and >= 0"));
        }
        let n = values.len();
        values[0] = 0.0;
        values[n - 1] = 0.0;
        let interp = MonotoneCubic::uniform(0.0, bandwidth / (n - 1) as f64, values);
        let total_weight = interp.integral();
        Ok(CouplingDensity {
            shape: Shape::Tabulated(Arc::new(interp)),
            kind: DensityKind::Numerical,
            support: (0.0, bandwidth),
            scale: bandwidth,
            norm: 1.0,
            total_weight,
        })
    }

    /// Lorentzian of weight Ω² centred at `center` with half-width `half_width`.
    /// `scale` is only used as the rate unit for tolerances.
    pub fn lorentzian(center: f64, half_width: f64, total_weight: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        check_weight(total_weight)?;
        if !(half_width.is_finite() && half_width > 0.0) || !center.is_finite() {
            return Err(Error::domain(
                "lorentzian",
                "need finite centre and positive half-width",
            ));
        }
        Ok(CouplingDensity {
            shape: Shape::Lorentzian { center, half_width },
            kind: DensityKind::Lorentzian,
            support: (f64::NEG_INFINITY, f64::INFINITY),
            scale,
            norm: total_weight,
            total_weight,
        })
    }

    /// Arbitrary density on `[lo, hi]` given by its value and derivative. The shape must
    /// vanish at both ends; it is rescaled so that its integral equals `total_weight`.
    pub fn custom(
        support: (f64, f64),
        value: DensityFn,
        derivative: DensityFn,
        total_weight: f64,
        scale: f64,
    ) -> Result<Self> {
        check_scale(scale)?;
        check_weight(total_weight)?;
        let (lo, hi) = support;
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::domain("support", "need finite lo < hi"));
        }
        let raw = integrate(
            |w| value(w),
            &[(lo, hi)],
            Tolerance::relative(1e-12),
            "custom density",
        )?;
        if !(raw.value > 0.0) {
            return Err(Error::domain("density", "integral must be positive"));
        }
        Ok(CouplingDensity {
            shape: Shape::Custom { value, derivative },
            kind: DensityKind::Custom,
            support,
            scale,
            norm: total_weight / raw.value,
            total_weight,
        })
    }

    /// Same shape with the weight set to `total_weight` (Ω² of a coupling override).
    pub fn with_total_weight(&self, total_weight: f64) -> Result<Self> {
        check_weight(total_weight)?;
        let mut out = self.clone();
        if self.total_weight > 0.0 {
            out.norm = self.norm * total_weight / self.total_weight;
        } else {
            match self.shape {
                Shape::ThomasFermi | Shape::Lorentzian { .. } => out.norm = total_weight,
                _ if total_weight == 0.0 => {}
                _ => {
                    return Err(Error::domain(
                        "total_weight",
                        "cannot rescale a zero density",
                    ))
                }
            }
        }
        out.total_weight = total_weight;
        Ok(out)
    }

    /// Same shape and weight on a rate axis stretched by `c` (all rates times `c`).
    pub fn rescaled_rates(&self, c: f64) -> Result<Self> {
        check_scale(c)?;
        let mut out = self.clone();
        out.scale *= c;
        out.support = (self.support.0 * c, self.support.1 * c);
        out.total_weight *= c * c;
        match &self.shape {
            Shape::ThomasFermi => out.norm *= c * c,
            Shape::Lorentzian { center, half_width } => {
                out.norm *= c * c;
                out.shape = Shape::Lorentzian {
                    center: center * c,
                    half_width: half_width * c,
                };
            }
            Shape::Tabulated(t) => {
                let values = t.values().iter().map(|v| v * c).collect();
                out.shape = Shape::Tabulated(Arc::new(MonotoneCubic::uniform(
                    t.x_min() * c,
                    (t.node(1) - t.node(0)) * c,
                    values,
                )));
            }
            Shape::Custom { value, derivative } => {
                let (v, d) = (value.clone(), derivative.clone());
                out.shape = Shape::Custom {
                    value: Arc::new(move |w| v(w / c)),
                    derivative: Arc::new(move |w| d(w / c) / c),
                };
                out.norm *= c;
            }
        }
        Ok(out)
    }

    /// Factor applied to the raw shape.
    pub(crate) fn norm(&self) -> f64 {
        self.norm
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    /// `(lo, hi)`; infinite for the Lorentzian.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Rate unit μ/ħ (s⁻¹).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Ω² = ∫ρ dω (s⁻²).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.shape, Shape::Lorentzian { .. })
    }

    /// Node positions and values of a tabulated density.
    pub fn nodes(&self) -> Option<Vec<(f64, f64)>> {
        match &self.shape {
            Shape::Tabulated(t) => Some(
                (0..t.len())
                    .map(|i| (t.node(i), self.norm * t.values()[i]))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Finite interval that contains the maximum of every Poisson-smoothed version of ρ:
    /// the support, or ±50 half-widths around a Lorentzian centre.
    pub fn search_interval(&self) -> (f64, f64) {
        match self.shape {
            Shape::Lorentzian { center, half_width } => {
                (center - 50.0 * half_width, center + 50.0 * half_width)
            }
            _ => self.support,
        }
    }

    /// Interior points where the density is only piecewise smooth.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Tabulated(t) => (0..t.len()).map(|i| t.node(i)).collect(),
            _ => vec![self.support.0, self.support.1],
        }
    }

    /// True when ρ has square-root endpoints best handled by a quadratic substitution.
    #[allow(dead_code)]
    pub(crate) fn has_root_endpoints(&self) -> bool {
        matches!(self.shape, Shape::ThomasFermi | Shape::Custom { .. })
    }

    pub fn value(&self, omega: f64) -> f64 {
        self.norm * self.raw_value(omega)
    }

    /// dρ/dω; integrably singular at a square-root endpoint.
    pub fn derivative(&self, omega: f64) -> f64 {
        let (lo, hi) = self.support;
        match &self.shape {
            Shape::ThomasFermi => {
                if omega <= lo || omega >= hi {
                    return 0.0;
                }
                let x = omega / self.scale;
                self.norm * 3.75 * (2.0 - 3.0 * x)
                    / (2.0 * (1.0 - x).sqrt())
                    / (self.scale * self.scale)
            }
            Shape::Tabulated(t) => self.norm * t.derivative(omega),
            Shape::Lorentzian { center, half_width } => {
                let u = omega - center;
                let den = u * u + half_width * half_width;
                -self.norm * half_width / PI * 2.0 * u / (den * den)
            }
            Shape::Custom { derivative, .. } => {
                if omega <= lo || omega >= hi {
                    0.0
                } else {
                    self.norm * derivative(omega)
                }
            }
        }
    }

    fn raw_value(&self, omega: f64) -> f64 {
        let (lo, hi) = self.support;
        match &self.shape {
            Shape::ThomasFermi => {
                if omega <= lo || omega >= hi {
                    return 0.0;
                }
                let x = omega / self.scale;
                3.75 * x * (1.0 - x).sqrt() / self.scale
            }
            Shape::Tabulated(t) => t.value(omega),
            Shape::Lorentzian { center, half_width } => {
                let u = omega - center;
                half_width / PI / (u * u + half_width * half_width)
            }
            Shape::Custom { value, .. } => {
                if omega <= lo || omega >= hi {
                    0.0
                } else {
                    value(omega)
                }
            }
        }
    }

    /// Samples `(ω, ρ(ω))` on `n` uniformly spaced points over `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
        let step = if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            0.0
        };
        (0..n)
            .map(|i| {
                let w = if i + 1 == n { hi } else { lo + step * i as f64 };
                (w, self.value(w))
            })
            .collect()
    }

    /// Location and value of the maximum of ρ.
    pub fn maximum(&self) -> (f64, f64) {
        match &self.shape {
            Shape::ThomasFermi => {
                let w = 2.0 * self.scale / 3.0;
                (w, self.value(w))
            }
            Shape::Lorentzian { center, .. } => (*center, self.value(*center)),
            Shape::Tabulated(t) => {
                // Bracket around the largest node, then refine on the interpolant.
                let vals = t.values();
                let i = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
                let lo = t.node(i.saturating_sub(1));
                let hi = t.node((i + 1).min(vals.len() - 1));
                let (x, _) = maximize(|w| t.value(w), lo, hi, 16, 1e-13 * self.scale);
                (x, self.value(x))
            }
            Shape::Custom { .. } => {
                let (lo, hi) = self.support;
                let (x, _) = maximize(|w| self.raw_value(w), lo, hi, 1024, 1e-13 * (hi - lo));
                (x, self.value(x))
            }
        }
    }

    /// ∫ ωᵏ ρ(ω) dω for compact densities.
    pub fn moment(&self, k: i32) -> Result<f64> {
        if !self.is_compact() {
            return Err(Error::Unsupported(format!(
                "moment {k} of a Lorentzian density diverges"
            )));
        }
        let segments = self.segments();
        let est = match self.shape {
            Shape::ThomasFermi => {
                // ω = W(1 − u²) removes the square root at the upper end.
                let w = self.scale;
                integrate(
                    |u| {
                        let om = w * (1.0 - u * u);
                        om.powi(k) * self.value(om) * 2.0 * w * u
                    },
                    &[(0.0, 1.0)],
                    Tolerance::relative(1e-13),
                    "density moment",
                )?
            }
            _ => integrate(
                |om| om.powi(k) * self.value(om),
                &segments,
                Tolerance::relative(1e-13).with_abs(1e-300),
                "density moment",
            )?,
        };
        Ok(est.value)
    }

    pub(crate) fn segments(&self) -> Vec<(f64, f64)> {
        let b = self.breakpoints();
        b.windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(a, b)| b > a)
            .collect()
    }

    /// ρ̄(x) = (W/Ω²) ρ(xW) together with the location and height of its maximum.
    pub fn dimensionless(&self) -> Result<DimensionlessDensity> {
        if !(self.total_weight > 0.0) {
            return Err(Error::domain(
                "total_weight",
                "dimensionless density needs Ω² > 0",
            ));
        }
        let (w_max, rho_max) = self.maximum();
        let factor = self.scale / self.total_weight;
        Ok(DimensionlessDensity {
            density: self.clone(),
            x_max: w_max / self.scale,
            max_value: rho_max * factor,
        })
    }

    /// Lorentzian matched to the first two moments of the normalised density.
    pub fn lorentzian_fit(&self) -> Result<LorentzianFit> {
        let m0 = self.moment(0)?;
        if !(m0 > 0.0) {
            return Err(Error::domain(
                "total_weight",
                "moment fit needs a non-zero density",
            ));
        }
        let mean = self.moment(1)? / m0;
        let second = self.moment(2)? / m0;
        let var = (second - mean * mean).max(0.0);
        Ok(LorentzianFit {
            center: mean,
            half_width: var.sqrt(),
        })
    }
}

fn check_scale(v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("bandwidth", "must be finite and > 0"))
    }
}

fn check_weight(v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain("total_weight", "must be finite and >= 0"))
    }
}

/// ρ̄ on the unit interval of x = ħω/μ.
#[derive(Debug, Clone)]
pub struct DimensionlessDensity {
    density: CouplingDensity,
    pub x_max: f64,
    pub max_value: f64,
}

impl DimensionlessDensity {
    pub fn value(&self, x: f64) -> f64 {
        let d = &self.density;
        d.value(x * d.scale) * d.scale / d.total_weight
    }

    pub fn density(&self) -> &CouplingDensity {
        &self.density
    }

    /// ∫ xᵏ ρ̄(x) dx.
    pub fn moment(&self, k: i32) -> Result<f64> {
        let d = &self.density;
        Ok(d.moment(k)? / (d.total_weight * d.scale.powi(k)))
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.moment(1)? / self.moment(0)?)
    }

    pub fn variance(&self) -> Result<f64> {
        let m0 = self.moment(0)?;
        let mean = self.moment(1)? / m0;
        Ok(self.moment(2)? / m0 - mean * mean)
    }
}

/// Centre ω₀ and half-width Γ (s⁻¹) matched to the mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianFit {
    pub center: f64,
    pub half_width: f64,
}
