//! JSON scenario configuration.
//!
//! All quantities are SI. Rates and angular frequencies are in s⁻¹; with
//! `"frequency_input": "cyclic"` every frequency-valued field is read in Hz and
//! multiplied by 2π on use. Unknown keys are rejected. Optional physical inputs that
//! are derived when absent (detuning, sweep ranges, figure rectangles) are `null`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::condensate::AtomSpecies;
use crate::constants::{RB87_F1_LANDE, RB87_MASS, RB87_SCATTERING_LENGTH};
use crate::nanowire::{CouplingGradient, Geometry};
use crate::resolvent::Method;

use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyInput {
    #[default]
    Angular,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Thomas–Fermi shape with the computed Ω².
    #[default]
    ClosedForm,
    /// Shell integration of |η(r)|² on the configured grid.
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauchyMethod {
    #[default]
    Auto,
    Quadrature,
}

impl From<CauchyMethod> for Method {
    fn from(m: CauchyMethod) -> Self {
        match m {
            CauchyMethod::Auto => Method::Auto,
            CauchyMethod::Quadrature => Method::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub frequency_input: FrequencyInput,
    pub condensate: CondensateSection,
    pub nanowire: NanowireSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub figures: FiguresSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_number: Option<f64>,
    /// Radial trap frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_r: Option<f64>,
    /// Axial trap frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_z: Option<f64>,
    /// s-wave scattering length (m).
    #[serde(default = "default_scattering_length")]
    pub scattering_length: f64,
    /// Offset field B_offs (T).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_offset: Option<f64>,
    /// Atomic mass (kg).
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_lande")]
    pub lande_g: f64,
}

fn default_scattering_length() -> f64 {
    RB87_SCATTERING_LENGTH
}
fn default_mass() -> f64 {
    RB87_MASS
}
fn default_lande() -> f64 {
    RB87_F1_LANDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NanowireSection {
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    /// L (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Distance d between wire and condensate centre (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// I (A).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current: Option<f64>,
    /// Vibration frequency ω_nw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_nw: Option<f64>,
    /// m_eff (kg).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality_factor: Option<f64>,
    /// Damping rate κ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Static amplitude of the cos(πz/L) bend (m).
    #[serde(default)]
    pub bend_amplitude: f64,
    #[serde(default)]
    pub coupling_gradient: CouplingGradient,
}

fn default_geometry() -> Geometry {
    Geometry::Bent
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default)]
    pub density: DensityMode,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_angular")]
    pub angular_order: usize,
    #[serde(default = "default_radial")]
    pub radial_order: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default)]
    pub method: CauchyMethod,
}

fn default_nodes() -> usize {
    513
}
fn default_angular() -> usize {
    32
}
fn default_radial() -> usize {
    24
}
fn default_rel_tol() -> f64 {
    1e-5
}
fn default_max_order() -> usize {
    256
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection {
            density: DensityMode::default(),
            nodes: default_nodes(),
            angular_order: default_angular(),
            radial_order: default_radial(),
            rel_tol: default_rel_tol(),
            max_order: default_max_order(),
            method: CauchyMethod::default(),
        }
    }
}

/// Closed interval with a sample count; `null` bounds are derived from the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSection {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    21
}

impl Default for RangeSection {
    fn default() -> Self {
        RangeSection {
            min: None,
            max: None,
            count: default_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub omega: RangeSection,
    #[serde(default)]
    pub detuning: RangeSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSection {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// Last sample (s); `null` means 200 ħ/μ.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Half-width of the frequency window in units of μ/ħ.
    #[serde(default = "default_half_window")]
    pub half_window: f64,
    #[serde(default = "default_quadrature_nodes")]
    pub quadrature_nodes: usize,
}

fn default_samples() -> usize {
    801
}
fn default_half_window() -> f64 {
    40.0
}
fn default_quadrature_nodes() -> usize {
    1 << 14
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            t_max: None,
            samples: default_samples(),
            half_window: default_half_window(),
            quadrature_nodes: default_quadrature_nodes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    /// Δ; `null` means the analytic threshold detuning Δ_th.
    #[serde(default)]
    pub detuning: Option<f64>,
    /// Offset γ of the integration contour below the real axis.
    #[serde(default)]
    pub gamma: f64,
    /// Replaces the computed Ω when present.
    #[serde(default)]
    pub omega_override: Option<f64>,
    /// Relative band |Ω/Ω_th − 1| reported as "at threshold".
    #[serde(default = "default_verdict_tolerance")]
    pub verdict_tolerance: f64,
    #[serde(default)]
    pub time: TimeSection,
    /// Pole search rectangle; `null` uses the default region.
    #[serde(default)]
    pub search_rect: Option<RectSection>,
    #[serde(default)]
    pub sweep: SweepSection,
}

fn default_verdict_tolerance() -> f64 {
    1e-3
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            detuning: None,
            gamma: 0.0,
            omega_override: None,
            verdict_tolerance: default_verdict_tolerance(),
            time: TimeSection::default(),
            search_rect: None,
            sweep: SweepSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresSection {
    /// Frequency samples of the density figure on [0, μ/ħ].
    #[serde(default = "default_fig2_samples")]
    pub fig2_samples: usize,
    /// Level-shift grid; `null` bounds default to Re z ∈ [−0.5, 1.5]μ/ħ and
    /// Im z ∈ [−0.5, 0.5]μ/ħ.
    #[serde(default = "default_fig3_re")]
    pub fig3_re: RangeSection,
    #[serde(default = "default_fig3_im")]
    pub fig3_im: RangeSection,
    /// Samples of the on-axis boundary values across the support.
    #[serde(default = "default_fig3_axis")]
    pub fig3_axis_samples: usize,
}

fn default_fig2_samples() -> usize {
    513
}
fn default_fig3_re() -> RangeSection {
    RangeSection {
        min: None,
        max: None,
        count: 81,
    }
}
fn default_fig3_im() -> RangeSection {
    RangeSection {
        min: None,
        max: None,
        count: 40,
    }
}
fn default_fig3_axis() -> usize {
    201
}

impl Default for FiguresSection {
    fn default() -> Self {
        FiguresSection {
            fig2_samples: default_fig2_samples(),
            fig3_re: default_fig3_re(),
            fig3_im: default_fig3_im(),
            fig3_axis_samples: default_fig3_axis(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_directory() -> String {
    "out".into()
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

/// Reads, overrides and validates a configuration file.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text, overrides)
}

pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| {
        ScenarioError::Config(format!(
            "parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            ScenarioError::Config(inner.to_string())
        } else {
            ScenarioError::Config(format!("{path}: {inner}"))
        }
    })?;
    config.validate()?;
    Ok(config)
}

/// Sets `key = value` on a JSON tree, with `key` a dotted path. The value is parsed as
/// JSON and falls back to a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ScenarioError> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        ScenarioError::Config(format!("override `{assignment}` is not key=value"))
    })?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ScenarioError::Config(format!(
            "override key `{key}` is not a dotted path"
        )));
    }
    let value =
        serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().into()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = node else {
            return Err(ScenarioError::Config(format!(
                "override `{key}`: `{}` is not a section",
                parts[..i].join(".")
            )));
        };
        if i + 1 == parts.len() {
            map.insert((*part).to_string(), value);
            return Ok(());
        }
        node = map
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Config(format!("{field}: {reason}"))
}

fn required(field: &str, v: Option<f64>) -> Result<f64, ScenarioError> {
    v.ok_or_else(|| invalid(field, "required"))
}

fn positive(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite, got {v}")))
    }
}

fn check_range(field: &str, r: &RangeSection, min_count: usize) -> Result<(), ScenarioError> {
    if let Some(v) = r.min {
        finite(&format!("{field}.min"), v)?;
    }
    if let Some(v) = r.max {
        finite(&format!("{field}.max"), v)?;
    }
    if let (Some(a), Some(b)) = (r.min, r.max) {
        if b < a {
            return Err(invalid(field, "max must be >= min"));
        }
    }
    if r.count < min_count {
        return Err(invalid(
            &format!("{field}.count"),
            format!("must be >= {min_count}"),
        ));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Factor that converts configured frequencies to angular s⁻¹.
    pub fn rate_factor(&self) -> f64 {
        match self.frequency_input {
            FrequencyInput::Angular => 1.0,
            FrequencyInput::Cyclic => 2.0 * PI,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let c = &self.condensate;
        let n = required("condensate.atom_number", c.atom_number)?;
        if !(n.is_finite() && n >= 1.0) {
            return Err(invalid(
                "condensate.atom_number",
                format!("must be >= 1, got {n}"),
            ));
        }
        positive(
            "condensate.omega_r",
            required("condensate.omega_r", c.omega_r)?,
        )?;
        positive(
            "condensate.omega_z",
            required("condensate.omega_z", c.omega_z)?,
        )?;
        positive(
            "condensate.b_offset",
            required("condensate.b_offset", c.b_offset)?,
        )?;
        positive("condensate.scattering_length", c.scattering_length)?;
        positive("condensate.mass", c.mass)?;
        if !c.lande_g.is_finite() || c.lande_g == 0.0 {
            return Err(invalid("condensate.lande_g", "must be finite and non-zero"));
        }

        let w = &self.nanowire;
        if w.geometry != Geometry::Infinite {
            positive("nanowire.length", required("nanowire.length", w.length)?)?;
        } else if let Some(l) = w.length {
            positive("nanowire.length", l)?;
        }
        positive(
            "nanowire.distance",
            required("nanowire.distance", w.distance)?,
        )?;
        let i = finite("nanowire.current", required("nanowire.current", w.current)?)?;
        if i == 0.0 {
            return Err(invalid("nanowire.current", "must be non-zero"));
        }
        positive(
            "nanowire.omega_nw",
            required("nanowire.omega_nw", w.omega_nw)?,
        )?;
        positive(
            "nanowire.effective_mass",
            required("nanowire.effective_mass", w.effective_mass)?,
        )?;
        match (w.quality_factor, w.kappa) {
            (Some(q), None) => {
                positive("nanowire.quality_factor", q)?;
            }
            (None, Some(k)) => {
                non_negative("nanowire.kappa", k)?;
            }
            _ => {
                return Err(invalid(
                    "nanowire",
                    "exactly one of `quality_factor` and `kappa` must be given",
                ))
            }
        }
        finite("nanowire.bend_amplitude", w.bend_amplitude)?;

        let k = &self.coupling;
        if k.nodes < 3 {
            return Err(invalid("coupling.nodes", "must be >= 3"));
        }
        if k.angular_order < 2 || k.radial_order < 2 {
            return Err(invalid(
                "coupling",
                "angular_order and radial_order must be >= 2",
            ));
        }
        if k.max_order < k.angular_order.max(k.radial_order) || k.max_order > 1024 {
            return Err(invalid(
                "coupling.max_order",
                "must lie between the start orders and 1024",
            ));
        }
        if !(k.rel_tol > 0.0 && k.rel_tol < 0.1) {
            return Err(invalid("coupling.rel_tol", "must lie in (0, 0.1)"));
        }

        let d = &self.dynamics;
        if let Some(v) = d.detuning {
            finite("dynamics.detuning", v)?;
        }
        non_negative("dynamics.gamma", d.gamma)?;
        if let Some(v) = d.omega_override {
            non_negative("dynamics.omega_override", v)?;
        }
        non_negative("dynamics.verdict_tolerance", d.verdict_tolerance)?;
        if let Some(t) = d.time.t_max {
            positive("dynamics.time.t_max", t)?;
        }
        if d.time.samples < 3 {
            return Err(invalid("dynamics.time.samples", "must be >= 3"));
        }
        if !(d.time.half_window > 1.0 && d.time.half_window.is_finite()) {
            return Err(invalid("dynamics.time.half_window", "must be > 1"));
        }
        if d.time.quadrature_nodes < 64 {
            return Err(invalid("dynamics.time.quadrature_nodes", "must be >= 64"));
        }
        if let Some(r) = d.search_rect {
            for (name, v) in [
                ("re_min", r.re_min),
                ("re_max", r.re_max),
                ("im_min", r.im_min),
                ("im_max", r.im_max),
            ] {
                finite(&format!("dynamics.search_rect.{name}"), v)?;
            }
            if r.re_max <= r.re_min || r.im_max <= r.im_min || r.im_min < 0.0 {
                return Err(invalid(
                    "dynamics.search_rect",
                    "needs re_max > re_min, im_max > im_min and im_min >= 0",
                ));
            }
        }
        check_range("dynamics.sweep.omega", &d.sweep.omega, 1)?;
        if d.sweep.omega.min.is_some_and(|v| v < 0.0) {
            return Err(invalid("dynamics.sweep.omega.min", "must be >= 0"));
        }
        check_range("dynamics.sweep.detuning", &d.sweep.detuning, 1)?;

        let f = &self.figures;
        if f.fig2_samples < 3 {
            return Err(invalid("figures.fig2_samples", "must be >= 3"));
        }
        check_range("figures.fig3_re", &f.fig3_re, 2)?;
        check_range("figures.fig3_im", &f.fig3_im, 2)?;
        if f.fig3_axis_samples < 3 {
            return Err(invalid("figures.fig3_axis_samples", "must be >= 3"));
        }
        if self.output.directory.is_empty() {
            return Err(invalid("output.directory", "must not be empty"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "must list at least one format"));
        }
        Ok(())
    }

    pub fn species(&self) -> AtomSpecies {
        AtomSpecies {
            mass: self.condensate.mass,
            lande_g: self.condensate.lande_g,
            scattering_length: self.condensate.scattering_length,
        }
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.output.formats.contains(&f)
    }

    /// Canonical JSON of the validated configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}
