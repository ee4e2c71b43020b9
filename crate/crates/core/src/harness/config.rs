//! Experiment configuration, read from TOML.
//!
//! ```toml
//! preset = "cantor(1/3)"
//! levels = [2, 3, 4, 5, 6, 7, 8]
//! reference_level = 11
//!
//! [kernel]
//! type = "helmholtz"
//! k = 5.0
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{Attractor, Similarity};

use super::presets::preset;

/// Smooth test integrands with closed forms in `x = (x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothFunction {
    /// `1`
    One,
    /// `1 + 2 x1 + 3 x2`
    Affine,
    /// `x1²`
    XSquared,
    /// `cos(c x1)`
    Cos,
    /// `cos(c (x1 − y1))`, a double-integral integrand.
    CosDiff,
}

impl SmoothFunction {
    pub fn is_double(self) -> bool {
        matches!(self, SmoothFunction::CosDiff)
    }

    pub fn eval1(self, c: f64, x: [f64; 2]) -> f64 {
        match self {
            SmoothFunction::One => 1.0,
            SmoothFunction::Affine => 1.0 + 2.0 * x[0] + 3.0 * x[1],
            SmoothFunction::XSquared => x[0] * x[0],
            SmoothFunction::Cos => (c * x[0]).cos(),
            SmoothFunction::CosDiff => 1.0,
        }
    }

    pub fn eval2(self, c: f64, x: [f64; 2], y: [f64; 2]) -> f64 {
        match self {
            SmoothFunction::CosDiff => (c * (x[0] - y[0])).cos(),
            other => other.eval1(c, x) * other.eval1(c, y),
        }
    }
}

/// Which integral a study computes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `∫_Γ∫_Γ Φ_t`.
    PhiT { t: f64 },
    /// `∫_Γ Φ_t(x, η_m)`.
    PhiTFixedPoint { t: f64, m: usize },
    /// `∫_Γ∫_Γ Φ` for the Helmholtz kernel; `n` defaults to the ambient dimension.
    Helmholtz {
        k: f64,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        c_osc: Option<f64>,
    },
    /// A smooth test integrand; single or double depending on the function.
    Smooth {
        function: SmoothFunction,
        #[serde(default)]
        c: Option<f64>,
    },
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::PhiT { t } => write!(f, "phi-t(t={t})"),
            KernelSpec::PhiTFixedPoint { t, m } => write!(f, "phi-t-fixed-point(t={t},m={m})"),
            KernelSpec::Helmholtz { k, n, c_osc } => {
                write!(f, "helmholtz(k={k}")?;
                if let Some(n) = n {
                    write!(f, ",n={n}")?;
                }
                if let Some(c) = c_osc {
                    write!(f, ",c_osc={c}")?;
                }
                write!(f, ")")
            }
            KernelSpec::Smooth { function, c } => {
                let name = function_name(*function);
                match c {
                    Some(c) => write!(f, "smooth({name},c={c})"),
                    None => write!(f, "smooth({name})"),
                }
            }
        }
    }
}

fn function_name(function: SmoothFunction) -> &'static str {
    match function {
        SmoothFunction::One => "one",
        SmoothFunction::Affine => "affine",
        SmoothFunction::XSquared => "x-squared",
        SmoothFunction::Cos => "cos",
        SmoothFunction::CosDiff => "cos-diff",
    }
}

/// One contraction of an inline IFS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub ratio: f64,
    /// Orthogonal part for planar maps (identity if absent).
    #[serde(default)]
    pub rotation: Option<[[f64; 2]; 2]>,
    /// `+1` or `−1` for maps of the line (`+1` if absent).
    #[serde(default)]
    pub orientation: Option<f64>,
    pub translation: Vec<f64>,
}

/// An IFS given inline instead of by preset name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    pub dim: usize,
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub measure: Option<f64>,
    #[serde(default)]
    pub diam: Option<f64>,
}

impl IfsSpec {
    /// Parses a standalone IFS description (`dim`, `[[maps]]`, optional
    /// `measure` and `diam`).
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Attractor> {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                if m.translation.len() != self.dim {
                    return Err(Error::invalid(format!(
                        "translation has {} entries, expected {}",
                        m.translation.len(),
                        self.dim
                    )));
                }
                match self.dim {
                    1 => {
                        if m.rotation.is_some() {
                            return Err(Error::invalid("maps of the line take 'orientation', not 'rotation'"));
                        }
                        Similarity::line(m.ratio, m.orientation.unwrap_or(1.0), m.translation[0])
                    }
                    2 => {
                        if m.orientation.is_some() {
                            return Err(Error::invalid("planar maps take 'rotation', not 'orientation'"));
                        }
                        let rot = m.rotation.unwrap_or([[1.0, 0.0], [0.0, 1.0]]);
                        Similarity::plane(m.ratio, rot, [m.translation[0], m.translation[1]])
                    }
                    d => Err(Error::invalid(format!("ambient dimension {d} unsupported"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Attractor::new(maps, self.dim, self.measure, self.diam)
    }
}

/// Output encoding of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    PlotData,
}

fn yes() -> bool {
    true
}

/// A convergence study.
///
/// The study resolutions are given either as levels (`h = ρ_max^ℓ diam Γ`)
/// or as explicit `h` values. Errors are measured against `exact` when
/// given, otherwise against the same rule at a finer reference resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub ifs: Option<IfsSpec>,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(default)]
    pub reference_level: Option<usize>,
    #[serde(default)]
    pub reference_h: Option<f64>,
    /// Exact value as `[re, im]`.
    #[serde(default)]
    pub exact: Option<[f64; 2]>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default = "yes")]
    pub symmetric: bool,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// A level-based study on a preset, with defaults for everything else.
    pub fn new(preset: &str, kernel: KernelSpec, levels: Vec<usize>) -> Self {
        ExperimentConfig {
            preset: Some(preset.to_string()),
            ifs: None,
            kernel,
            levels,
            h: Vec::new(),
            reference_level: None,
            reference_h: None,
            exact: None,
            output: None,
            format: ReportFormat::Csv,
            symmetric: true,
            strict: false,
            threads: None,
        }
    }

    pub fn with_reference_level(mut self, level: usize) -> Self {
        self.reference_level = Some(level);
        self
    }

    pub fn with_exact(mut self, re: f64, im: f64) -> Self {
        self.exact = Some([re, im]);
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Label used in report metadata.
    pub fn attractor_label(&self) -> String {
        match (&self.preset, &self.ifs) {
            (Some(p), _) => p.clone(),
            _ => "inline".to_string(),
        }
    }

    pub fn build_attractor(&self) -> Result<Attractor> {
        match (&self.preset, &self.ifs) {
            (Some(p), None) => preset(p),
            (None, Some(spec)) => spec.build(),
            (Some(_), Some(_)) => Err(Error::Config("give either 'preset' or '[ifs]', not both".into())),
            (None, None) => Err(Error::Config("one of 'preset' or '[ifs]' is required".into())),
        }
    }

    /// Checks the parts of the configuration that do not need the attractor.
    pub fn validate(&self) -> Result<()> {
        if self.preset.is_some() == self.ifs.is_some() {
            return Err(Error::Config("exactly one of 'preset' or '[ifs]' is required".into()));
        }
        match (self.levels.is_empty(), self.h.is_empty()) {
            (true, true) => return Err(Error::Config("the study has no levels or h values".into())),
            (false, false) => return Err(Error::Config("give either 'levels' or 'h', not both".into())),
            _ => {}
        }
        if self.h.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::Config("h values must be positive".into()));
        }
        if let Some(r) = self.reference_level {
            if !self.h.is_empty() {
                return Err(Error::Config("'reference_level' needs a level-based study".into()));
            }
            if let Some(&max) = self.levels.iter().max() {
                if r <= max {
                    return Err(Error::Config(format!(
                        "reference level {r} must be finer than every study level (max {max})"
                    )));
                }
            }
        }
        if let Some(r) = self.reference_h {
            if !self.levels.is_empty() {
                return Err(Error::Config("'reference_h' needs an h-based study".into()));
            }
            if r.is_nan() || r <= 0.0 || self.h.iter().any(|&h| h <= r) {
                return Err(Error::Config("reference h must be smaller than every study h".into()));
            }
        }
        if self.exact.is_some() && (self.reference_level.is_some() || self.reference_h.is_some()) {
            return Err(Error::Config("give either an exact value or a reference resolution".into()));
        }
        if !self.h.is_empty() && self.exact.is_none() && self.reference_h.is_none() {
            return Err(Error::Config("h-based studies need 'reference_h' or 'exact'".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        match &self.kernel {
            KernelSpec::PhiT { t } | KernelSpec::PhiTFixedPoint { t, .. } if !(*t >= 0.0 && t.is_finite()) => {
                Err(Error::Config(format!("kernel exponent t = {t} must be >= 0")))
            }
            KernelSpec::PhiTFixedPoint { m: 0, .. } => Err(Error::Config("map index m starts at 1".into())),
            KernelSpec::Helmholtz { k, n, c_osc } => {
                if !(*k > 0.0 && k.is_finite()) {
                    return Err(Error::Config(format!("wavenumber k = {k} must be positive")));
                }
                if matches!(n, Some(n) if *n != 1 && *n != 2) {
                    return Err(Error::Config("n must be 1 or 2".into()));
                }
                if matches!(c_osc, Some(c) if c.is_nan() || *c <= 0.0) {
                    return Err(Error::Config("c_osc must be positive".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
