//! Level-shift function K(z) = ∫ρ(ω)/(z − ω + iγ) dω and the forward propagator
//! G⁺(z) = [z − Δ + iκ + K(z)]⁻¹ of the vibration mode.
//!
//! With `w = z + iγ` the level shift is the Cauchy integral of ρ evaluated at `w`. It is
//! analytic off the support on the real w-axis and jumps by −2πiρ across it. Points with
//! `0 ≤ Im w < ε_cut` are evaluated as the boundary value from above,
//! `K(ω + i0) = P∫ρ(ω')/(ω − ω')dω' − iπρ(ω)`.
//!
//! The closed-form Thomas–Fermi density and the Lorentzian have analytic Cauchy
//! integrals. A tabulated density is integrated exactly cell by cell near `w` and with
//! an 8-point Gauss rule elsewhere. Custom densities go through singularity subtraction,
//! `∫(ρ(ω) − ρ(a))/(w − ω)dω + ρ(a)[log(w − lo) − log(w − hi)]`, split at `a = Re w`
//! (mid-band when `Re w` is outside the support), with quadratic substitutions that
//! absorb square-root endpoints.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coupling::density::Shape;
use crate::coupling::CouplingDensity;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{gauss_legendre_rule, integrate, QuadValue, Tolerance};

/// Below this distance from the cut (relative to μ/ħ) the on-axis form is used.
pub const EPS_CUT: f64 = 1e-6;

/// Relative tolerance of the subtraction quadrature.
pub const CAUCHY_REL_TOL: f64 = 1e-10;

/// How the Cauchy integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Analytic or exact piecewise formulas where available.
    #[default]
    Auto,
    /// Singularity-subtraction quadrature for every compact density.
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct LevelShift {
    density: CouplingDensity,
    gamma: f64,
    method: Method,
    far_nodes: Option<Arc<FarField>>,
}

/// Gauss nodes of every cell of a tabulated density, premultiplied by weights.
#[derive(Debug)]
struct FarField {
    cells: usize,
    omega: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
}

const FAR_ORDER: usize = 8;
/// Cells whose centre lies within this many cell widths of `w` are integrated exactly.
const NEAR_CELLS: f64 = 4.0;

impl LevelShift {
    pub fn new(density: CouplingDensity, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::domain("gamma", "must be finite and >= 0"));
        }
        let far_nodes = match &density.shape {
            Shape::Tabulated(t) => Some(Arc::new(FarField::new(t))),
            _ => None,
        };
        Ok(LevelShift {
            density,
            gamma,
            method: Method::Auto,
            far_nodes,
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn density(&self) -> &CouplingDensity {
        &self.density
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Rate unit μ/ħ.
    pub fn scale(&self) -> f64 {
        self.density.scale()
    }

    pub fn eps_cut(&self) -> f64 {
        EPS_CUT * self.scale()
    }

    /// K(z) for `Im z ≥ −γ`.
    pub fn level_shift(&self, z: Complex64) -> Result<Complex64> {
        self.cauchy_integral(self.route(z)?)
    }

    /// dK/dz for `Im z ≥ −γ`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.cauchy_derivative(self.route(z)?)
    }

    /// Both K(z) and dK/dz.
    pub fn with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let w = self.route(z)?;
        Ok((self.cauchy_integral(w)?, self.cauchy_derivative(w)?))
    }

    fn route(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::domain("z", "must be finite"));
        }
        let w = z + Complex64::new(0.0, self.gamma);
        if w.im < 0.0 {
            return Err(Error::BelowCut {
                z,
                gamma: self.gamma,
            });
        }
        if w.im < self.eps_cut() {
            Ok(Complex64::new(w.re, 0.0))
        } else {
            Ok(w)
        }
    }

    /// Boundary value K(ω + i0⁺) of the γ = 0 level shift:
    /// principal value minus iπρ(ω).
    pub fn level_shift_on_axis(&self, omega: f64) -> Result<Complex64> {
        self.cauchy_integral(Complex64::new(omega, 0.0))
    }

    /// Im K(ω + i0) − Im K(ω − i0) of the γ = 0 Cauchy integral, from the boundary
    /// values on both sides of the cut. Equals −2πρ(ω).
    pub fn branch_cut_jump(&self, omega: f64) -> Result<f64> {
        let above = self.cauchy_integral(Complex64::new(omega, 0.0))?;
        let below = self.cauchy_integral(Complex64::new(omega, -0.0))?;
        Ok(above.im - below.im)
    }

    /// ∫ρ(ω)/(w − ω)dω on either side of the cut. A real `w` inside the support takes
    /// the side given by the sign of its zero imaginary part.
    pub fn cauchy_integral(&self, w: Complex64) -> Result<Complex64> {
        let d = &self.density;
        let weight = d.total_weight();
        if weight == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let scale = d.scale();
        match (&d.shape, self.method) {
            (Shape::Lorentzian { center, half_width }, _) => {
                let shift = if w.im.is_sign_negative() {
                    -half_width
                } else {
                    *half_width
                };
                Ok(weight / (w - *center + Complex64::new(0.0, shift)))
            }
            (Shape::ThomasFermi, Method::Auto) => Ok(tf_cauchy(w / scale) * (weight / scale)),
            (Shape::Tabulated(t), Method::Auto) => Ok(self.tabulated(t, w, false) * d.norm()),
            _ => self.subtracted(w, false),
        }
    }

    /// d/dw of [`Self::cauchy_integral`], computed as ∫ρ'(ω)/(w − ω)dω.
    pub fn cauchy_derivative(&self, w: Complex64) -> Result<Complex64> {
        let d = &self.density;
        let weight = d.total_weight();
        if weight == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (lo, hi) = d.support();
        if w.im == 0.0 && (w.re == lo || w.re == hi) {
            return Err(Error::domain("z", "dK/dz diverges at the band edge"));
        }
        let scale = d.scale();
        match (&d.shape, self.method) {
            (Shape::Lorentzian { center, half_width }, _) => {
                let shift = if w.im.is_sign_negative() {
                    -half_width
                } else {
                    *half_width
                };
                let den = w - *center + Complex64::new(0.0, shift);
                Ok(-weight / (den * den))
            }
            (Shape::ThomasFermi, Method::Auto) => {
                Ok(tf_cauchy_derivative(w / scale) * (weight / (scale * scale)))
            }
            (Shape::Tabulated(t), Method::Auto) => Ok(self.tabulated(t, w, true) * d.norm()),
            _ => self.subtracted(w, true),
        }
    }

    /// Exact cell integrals near `w`, Gauss–Legendre elsewhere.
    fn tabulated(&self, t: &MonotoneCubic, w: Complex64, derivative: bool) -> Complex64 {
        let far = self
            .far_nodes
            .as_ref()
            .expect("tabulated density has far-field nodes");
        let h = t.step();
        let x0 = t.x_min();
        let cells = far.cells;
        let near = if w.im.abs() < NEAR_CELLS * h {
            let first = ((w.re - x0) / h - 0.5 - NEAR_CELLS).ceil().max(0.0);
            let last = ((w.re - x0) / h - 0.5 + NEAR_CELLS)
                .floor()
                .min(cells as f64 - 1.0);
            if first <= last {
                Some((first as usize, last as usize + 1))
            } else {
                None
            }
        } else {
            None
        };
        let samples = if derivative { &far.slope } else { &far.value };
        let mut far_sum = Complex64::new(0.0, 0.0);
        for cell in 0..cells {
            if near.is_some_and(|(a, b)| cell >= a && cell < b) {
                continue;
            }
            let base = cell * FAR_ORDER;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in base..base + FAR_ORDER {
                acc += samples[k] / (w - far.omega[k]);
            }
            far_sum += acc;
        }
        let Some((a, b)) = near else {
            return far_sum;
        };
        let poly = |i: usize| -> [f64; 4] {
            let c = t.cell_polynomial(i);
            if derivative {
                [c[1], 2.0 * c[2], 3.0 * c[3], 0.0]
            } else {
                c
            }
        };
        let eval = |c: &[f64; 4], s: Complex64| c[0] + s * (c[1] + s * (c[2] + s * c[3]));
        let log_at = |j: usize| -> Option<Complex64> {
            let d = w - t.node(j);
            if d.re == 0.0 && d.im == 0.0 {
                None
            } else {
                Some(d.ln())
            }
        };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut prev: Option<Complex64> = None;
        for i in a..b {
            let c = poly(i);
            let s = w - t.node(i);
            let p = eval(&c, s);
            let jump = p - prev.unwrap_or(Complex64::new(0.0, 0.0));
            if let Some(l) = log_at(i) {
                sum += jump * l;
            }
            // ∫₀ʰ q(t) dt with q = (p(t) − p(s)) / (t − s).
            sum -= c[1] * h
                + c[2] * (s * h + 0.5 * h * h)
                + c[3] * (s * s * h + s * (0.5 * h * h) + h * h * h / 3.0);
            prev = Some(p);
        }
        if let (Some(p), Some(l)) = (prev, log_at(b)) {
            sum -= p * l;
        }
        far_sum + sum
    }

    fn subtracted(&self, w: Complex64, derivative: bool) -> Result<Complex64> {
        let d = &self.density;
        let (lo, hi) = d.support();
        let f = |om: f64| {
            if derivative {
                d.derivative(om)
            } else {
                d.value(om)
            }
        };
        let inside = w.re > lo && w.re < hi;
        // Split at Re w, or mid-band when Re w is outside so that each substitution
        // covers one endpoint.
        let a = if inside { w.re } else { 0.5 * (lo + hi) };
        let fa = if inside { f(a) } else { 0.0 };
        let kernel = |om: f64| -> Complex64 {
            let den = w - om;
            if den.re == 0.0 && den.im == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (f(om) - fa) / den
            }
        };
        let unit = if derivative {
            d.scale() * d.scale()
        } else {
            d.scale()
        };
        let tol = Tolerance::relative(CAUCHY_REL_TOL).with_abs(1e-13 * d.total_weight() / unit);
        let context = if derivative {
            "level-shift derivative"
        } else {
            "level shift"
        };
        let body = match &d.shape {
            Shape::Tabulated(t) => {
                let mut cuts: Vec<f64> = (0..t.len()).map(|i| t.node(i)).collect();
                if inside {
                    cuts.push(a);
                    cuts.sort_by(f64::total_cmp);
                    cuts.dedup();
                }
                let segments: Vec<(f64, f64)> = cuts
                    .windows(2)
                    .map(|p| (p[0], p[1]))
                    .filter(|(x, y)| y > x)
                    .collect();
                integrate(kernel, &segments, tol, context)?.value
            }
            _ => {
                let mut total = Complex64::zero();
                if a > lo {
                    let span = a - lo;
                    total += integrate(
                        |v: f64| kernel(lo + span * v * v) * (2.0 * span * v),
                        &[(0.0, 1.0)],
                        tol,
                        context,
                    )?
                    .value;
                }
                if a < hi {
                    let span = hi - a;
                    total += integrate(
                        |u: f64| kernel(hi - span * u * u) * (2.0 * span * u),
                        &[(0.0, 1.0)],
                        tol,
                        context,
                    )?
                    .value;
                }
                total
            }
        };
        let log_term = if fa == 0.0 {
            Complex64::zero()
        } else {
            fa * ((w - lo).ln() - (w - hi).ln())
        };
        Ok(body + log_term)
    }

    /// Cauchy integral on a rectangular grid of `w = z + iγ`, row-major in Im z.
    pub fn surface(
        &self,
        re: (f64, f64, usize),
        im: (f64, f64, usize),
    ) -> Result<Vec<SurfacePoint>> {
        let axis = |(lo, hi, n): (f64, f64, usize), k: usize| {
            if n <= 1 {
                lo
            } else if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        (0..re.2 * im.2)
            .into_par_iter()
            .map(|idx| {
                let (j, i) = (idx / re.2, idx % re.2);
                let z = Complex64::new(axis(re, i), axis(im, j));
                let k = self.cauchy_integral(z + Complex64::new(0.0, self.gamma))?;
                Ok(SurfacePoint { z, k })
            })
            .collect()
    }
}

impl FarField {
    fn new(t: &MonotoneCubic) -> Self {
        let (x, wts) = gauss_legendre_rule(FAR_ORDER);
        let cells = t.len() - 1;
        let h = t.step();
        let mut omega = Vec::with_capacity(cells * FAR_ORDER);
        let mut value = Vec::with_capacity(cells * FAR_ORDER);
        let mut slope = Vec::with_capacity(cells * FAR_ORDER);
        for i in 0..cells {
            let c = t.cell_polynomial(i);
            for (&xi, &wi) in x.iter().zip(wts) {
                let s = 0.5 * h * (xi + 1.0);
                omega.push(t.node(i) + s);
                value.push(0.5 * h * wi * (c[0] + s * (c[1] + s * (c[2] + s * c[3]))));
                slope.push(0.5 * h * wi * (c[1] + s * (2.0 * c[2] + s * 3.0 * c[3])));
            }
        }
        FarField {
            cells,
            omega,
            value,
            slope,
        }
    }
}

/// One point of the level-shift surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub z: Complex64,
    pub k: Complex64,
}

/// ∫₀¹ ρ̄(x)/(ζ − x) dx for ρ̄ = (15/4) x √(1−x).
pub fn tf_cauchy(zeta: Complex64) -> Complex64 {
    if zeta.norm() >= 4.0 {
        return tf_moment_series(zeta, false);
    }
    let c = 3.75;
    if zeta.im == 0.0 {
        let x = zeta.re;
        let re = if x == 0.0 {
            -2.5
        } else if x == 1.0 {
            5.0
        } else if x < 0.0 {
            let b = (1.0 - x).sqrt();
            c * (4.0 / 3.0 - 2.0 * (1.0 - x) - x * b * ((b + 1.0) / (b - 1.0)).ln())
        } else if x > 1.0 {
            let q = (x - 1.0).sqrt();
            c * (4.0 / 3.0 - 2.0 * (1.0 - x) - 2.0 * x * q * (1.0 / q).atan())
        } else {
            let b = (1.0 - x).sqrt();
            let re = c * (4.0 / 3.0 - 2.0 * (1.0 - x) - x * b * ((1.0 + b) / (1.0 - b)).ln());
            let im = -PI * c * x * b;
            return Complex64::new(re, if zeta.im.is_sign_negative() { -im } else { im });
        };
        return Complex64::new(re, 0.0);
    }
    let b = (Complex64::new(1.0, 0.0) - zeta).sqrt();
    c * (4.0 / 3.0 - 2.0 * (1.0 - zeta) - 2.0 * zeta * b * atanh(1.0 / b))
}

/// d/dζ of [`tf_cauchy`]; infinite at ζ = 0 and ζ = 1.
pub fn tf_cauchy_derivative(zeta: Complex64) -> Complex64 {
    if zeta.norm() >= 4.0 {
        return tf_moment_series(zeta, true);
    }
    let c = 3.75;
    if zeta.im == 0.0 {
        let x = zeta.re;
        if x == 0.0 || x == 1.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        if x < 0.0 {
            let b = (1.0 - x).sqrt();
            let at = 0.5 * ((b + 1.0) / (b - 1.0)).ln();
            return Complex64::new(c * (3.0 + (1.0 - 3.0 * b * b) * at / b), 0.0);
        }
        if x > 1.0 {
            let q = (x - 1.0).sqrt();
            return Complex64::new(c * (3.0 - (1.0 + 3.0 * q * q) * (1.0 / q).atan() / q), 0.0);
        }
        let b = (1.0 - x).sqrt();
        let side = if zeta.im.is_sign_negative() {
            -0.5 * PI
        } else {
            0.5 * PI
        };
        let at = Complex64::new(0.5 * ((1.0 + b) / (1.0 - b)).ln(), side);
        return c * (3.0 + (1.0 - 3.0 * b * b) * at / b);
    }
    let b = (Complex64::new(1.0, 0.0) - zeta).sqrt();
    c * (3.0 + (1.0 - 3.0 * b * b) * atanh(1.0 / b) / b)
}

/// Σ m_k ζ^{−k−1} with the moments m_k of ρ̄, or its derivative.
fn tf_moment_series(zeta: Complex64, derivative: bool) -> Complex64 {
    let inv = 1.0 / zeta;
    let mut m = 1.0;
    let mut power = if derivative { inv * inv } else { inv };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..40 {
        let term = if derivative {
            -(k as f64 + 1.0) * m * power
        } else {
            m * power
        };
        sum += term;
        m *= (k as f64 + 2.0) / (k as f64 + 3.5);
        power *= inv;
    }
    sum
}

fn atanh(u: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    0.5 * ((one + u).ln() - (one - u).ln())
}

/// G⁺(z) for fixed detuning Δ and mechanical decay κ.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub level_shift: LevelShift,
    pub detuning: f64,
    pub kappa: f64,
}

/// Value of G⁺ with the characteristic function it inverts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample {
    pub value: Complex64,
    pub characteristic: Complex64,
    /// |z − Δ + iκ + K(z)| below 10⁻¹² μ/ħ.
    pub near_pole: bool,
}

impl Propagator {
    pub fn new(level_shift: LevelShift, detuning: f64, kappa: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::domain("detuning", "must be finite"));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::domain("kappa", "must be finite and >= 0"));
        }
        Ok(Propagator {
            level_shift,
            detuning,
            kappa,
        })
    }

    pub fn scale(&self) -> f64 {
        self.level_shift.scale()
    }

    /// z − Δ + iκ + K(z).
    pub fn characteristic(&self, z: Complex64) -> Result<Complex64> {
        Ok(
            z - self.detuning
                + Complex64::new(0.0, self.kappa)
                + self.level_shift.level_shift(z)?,
        )
    }

    pub fn forward_propagator(&self, z: Complex64) -> Result<PropagatorSample> {
        let characteristic = self.characteristic(z)?;
        Ok(PropagatorSample {
            value: 1.0 / characteristic,
            characteristic,
            near_pole: characteristic.norm() < 1e-12 * self.scale(),
        })
    }
}
