//! The flat JSON run configuration shared by every subcommand.

use std::f64::consts::FRAC_PI_6;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Affine coefficient map `X(x) = base + sum_l x_l columns[l]`.
    Generic,
    /// Spin-1/2 in a static field, parameters `(B, theta, phi)`.
    Magnetometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    Pure([f64; 3]),
    Entangled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Control {
    None,
    /// Negate the coefficients at the given estimate; an empty list means
    /// the estimate equals the evaluation point.
    OptimalNegation(Vec<f64>),
    Custom([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Merged,
    SegmentProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub b: f64,
    pub theta: f64,
    pub phi: f64,
    pub base: [f64; 3],
    pub columns: Vec<[f64; 3]>,
    pub point: Vec<f64>,
    /// Segment duration.
    pub t: f64,
    /// Segment count for `report`.
    pub n: u64,
    /// Segment counts for `sweep-alpha`.
    pub n_values: Vec<u64>,
    /// Largest segment count for `curves`.
    pub n_max: u64,
    pub probe: Probe,
    pub control: Control,
    pub composition_mode: Mode,
    pub alpha_points: usize,
    pub x_norm: f64,
    pub dx_norm: f64,
    /// Output format; `report` defaults to JSON, the tables to CSV.
    pub format: Option<Format>,
    pub seed: u64,
    pub samples: usize,
    pub tolerance_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Magnetometry,
            b: 3.0,
            theta: FRAC_PI_6,
            phi: 0.0,
            base: [0.0, 0.0, 2.0],
            columns: vec![[1.0, 0.0, 0.0]],
            point: vec![0.0],
            t: 1.0,
            n: 5,
            n_values: vec![3, 5, 10],
            n_max: 30,
            probe: Probe::Entangled,
            control: Control::OptimalNegation(Vec::new()),
            composition_mode: Mode::Merged,
            alpha_points: 181,
            x_norm: 2.0,
            dx_norm: 1.0,
            format: None,
            seed: 0,
            samples: 1000,
            tolerance_scale: 1.0,
        }
    }
}

/// Distinct validation failure classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Parse,
    Dim,
    Bloch,
    Time,
    Segments,
    Grid,
    Field,
    Value,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Parse => "E_PARSE",
            ErrorCode::Dim => "E_DIM",
            ErrorCode::Bloch => "E_BLOCH",
            ErrorCode::Time => "E_TIME",
            ErrorCode::Segments => "E_SEGMENTS",
            ErrorCode::Grid => "E_GRID",
            ErrorCode::Field => "E_FIELD",
            ErrorCode::Value => "E_VALUE",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{code}: field `{field}`: {message}")]
pub struct ConfigError {
    pub code: ErrorCode,
    pub field: String,
    pub message: String,
}

fn fail(code: ErrorCode, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        code,
        field: field.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| fail(ErrorCode::Parse, "<document>", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Number of estimated parameters.
    pub fn dim(&self) -> usize {
        match self.scenario {
            Scenario::Magnetometry => 3,
            Scenario::Generic => self.columns.len(),
        }
    }

    /// Evaluation point in parameter space.
    pub fn evaluation_point(&self) -> Vec<f64> {
        match self.scenario {
            Scenario::Magnetometry => vec![self.b, self.theta, self.phi],
            Scenario::Generic => self.point.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        use ErrorCode::*;
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(fail(
                Time,
                "t",
                format!("segment time must be > 0, got {}", self.t),
            ));
        }
        if self.n < 1 {
            return Err(fail(Segments, "n", "segment count must be >= 1"));
        }
        if self.n_max < 1 {
            return Err(fail(
                Segments,
                "n_max",
                "largest segment count must be >= 1",
            ));
        }
        if self.n_values.is_empty() {
            return Err(fail(Grid, "n_values", "sweep grid is empty"));
        }
        if self.n_values.iter().any(|&n| n < 1) {
            return Err(fail(
                Segments,
                "n_values",
                "every segment count must be >= 1",
            ));
        }
        if self.alpha_points == 0 {
            return Err(fail(Grid, "alpha_points", "sweep grid is empty"));
        }
        match self.scenario {
            Scenario::Generic => {
                if self.columns.is_empty() || self.columns.len() > 3 {
                    return Err(fail(
                        Dim,
                        "columns",
                        format!(
                            "{} parameters requested; between 1 and 3 are supported",
                            self.columns.len()
                        ),
                    ));
                }
                if self.point.len() != self.columns.len() {
                    return Err(fail(
                        Dim,
                        "point",
                        format!(
                            "{} coordinates for {} parameters",
                            self.point.len(),
                            self.columns.len()
                        ),
                    ));
                }
                let finite = self.base.iter().all(|v| v.is_finite())
                    && self.columns.iter().flatten().all(|v| v.is_finite())
                    && self.point.iter().all(|v| v.is_finite());
                if !finite {
                    return Err(fail(Value, "columns", "coefficients must be finite"));
                }
            }
            Scenario::Magnetometry => {
                if !(self.b > 0.0 && self.b.is_finite()) {
                    return Err(fail(Field, "b", format!("B must be > 0, got {}", self.b)));
                }
                if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
                    return Err(fail(Field, "theta", "theta must lie in [0, pi]"));
                }
                if !self.phi.is_finite() {
                    return Err(fail(Field, "phi", "phi must be finite"));
                }
            }
        }
        if let Probe::Pure(r) = self.probe {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm.is_nan() || norm > 1.0 + 1e-12 {
                return Err(fail(Bloch, "probe.pure", format!("|r| = {norm} exceeds 1")));
            }
        }
        match &self.control {
            Control::OptimalNegation(est) if !est.is_empty() && est.len() != self.dim() => {
                return Err(fail(
                    Dim,
                    "control.optimal_negation",
                    format!(
                        "estimate has {} entries, expected {}",
                        est.len(),
                        self.dim()
                    ),
                ));
            }
            Control::OptimalNegation(est) if est.iter().any(|v| !v.is_finite()) => {
                return Err(fail(
                    Value,
                    "control.optimal_negation",
                    "estimate must be finite",
                ));
            }
            Control::Custom(v) if v.iter().any(|c| !c.is_finite()) => {
                return Err(fail(
                    Value,
                    "control.custom",
                    "control vector must be finite",
                ));
            }
            _ => {}
        }
        if !(self.x_norm >= 0.0 && self.x_norm.is_finite()) {
            return Err(fail(Value, "x_norm", "must be finite and >= 0"));
        }
        if !(self.dx_norm >= 0.0 && self.dx_norm.is_finite()) {
            return Err(fail(Value, "dx_norm", "must be finite and >= 0"));
        }
        if self.samples < 1 {
            return Err(fail(Segments, "samples", "sample count must be >= 1"));
        }
        if !(self.tolerance_scale >= 0.0 && self.tolerance_scale.is_finite()) {
            return Err(fail(Value, "tolerance_scale", "must be finite and >= 0"));
        }
        Ok(())
    }
}
