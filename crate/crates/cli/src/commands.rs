use serde_json::{json, Value};

use qfim_core::control::{alpha_grid, design_control, gap_profile};
use qfim_core::generator::{CoefficientMap, CompositionMode, DegenerateFlag, LinearMap};
use qfim_core::magnetometry::{precision_curves, CurveProbe, FieldMap, FieldPoint};
use qfim_core::verify::{run_verify, VerifyConfig};
use qfim_core::{build_report, ProbeKind, QfimError, SchemeConfig, Vec3};

use crate::config::{Control, ErrorCode, Format, Mode, Probe, RunConfig, Scenario};
use crate::output::{json_f64, json_vec, Cell, Table};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("E_MODEL: {0}")]
    Model(#[from] QfimError),
    #[error("E_IO: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID
    }
}

fn invalid(code: ErrorCode, field: &str, message: &str) -> CliError {
    CliError::Config(crate::config::ConfigError {
        code,
        field: field.into(),
        message: message.into(),
    })
}

/// Rendered command output and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            exit_code: EXIT_OK,
        }
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::from_array(a)
}

fn mode(m: Mode) -> CompositionMode {
    match m {
        Mode::Merged => CompositionMode::MergedExponential,
        Mode::SegmentProduct => CompositionMode::SegmentProduct,
    }
}

fn scheme_from(cfg: &RunConfig) -> Result<(SchemeConfig, Vec<f64>), CliError> {
    let point = cfg.evaluation_point();
    let map: std::sync::Arc<dyn CoefficientMap> = match cfg.scenario {
        Scenario::Magnetometry => std::sync::Arc::new(FieldMap),
        Scenario::Generic => std::sync::Arc::new(LinearMap::new(
            vec3(cfg.base),
            cfg.columns.iter().copied().map(vec3).collect(),
        )),
    };
    let control = match &cfg.control {
        Control::None => Vec3::ZERO,
        Control::OptimalNegation(est) if est.is_empty() => {
            design_control(map.as_ref(), &point).control_vector
        }
        Control::OptimalNegation(est) => design_control(map.as_ref(), est).control_vector,
        Control::Custom(v) => vec3(*v),
    };
    let scheme = SchemeConfig::from_shared(map, control, cfg.t, cfg.n, mode(cfg.composition_mode))?;
    Ok((scheme, point))
}

fn flag_name(f: DegenerateFlag) -> &'static str {
    match f {
        DegenerateFlag::Regular => "regular",
        DegenerateFlag::Colinear => "colinear",
        DegenerateFlag::ZeroField => "zero_field",
    }
}

fn provenance(cfg: &RunConfig) -> Value {
    json!({
        "tool": "qfim",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    })
}

pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let (scheme, point) = scheme_from(cfg)?;
    let probe = match cfg.probe {
        Probe::Entangled => ProbeKind::EntangledWithAncilla,
        Probe::Pure(r) => {
            let norm = vec3(r).norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(invalid(
                    ErrorCode::Bloch,
                    "probe.pure",
                    "the report needs a pure qubit probe, |r| = 1",
                ));
            }
            ProbeKind::PureQubit(vec3(r))
        }
    };
    let rep = build_report(&scheme, &point, probe)?;
    if cfg.format == Some(Format::Csv) {
        return Err(invalid(
            ErrorCode::Value,
            "format",
            "report is emitted as JSON only",
        ));
    }
    let generators: Vec<Value> = rep
        .generators
        .iter()
        .map(|g| {
            json!({
                "magnitude": json_f64(g.magnitude),
                "direction": json_vec(g.direction.to_array()),
                "flag": flag_name(g.flag),
            })
        })
        .collect();
    let doc = json!({
        "dim": rep.qfim.nrows(),
        "qfim": json_vec(rep.qfim.transpose().iter().copied()),
        "qfi_max": json_vec(rep.qfi_max.iter().copied()),
        "weak_comm_residuals": json_vec(rep.weak_comm_residuals.transpose().iter().copied()),
        "precision_bounds": json_vec(rep.precision_bounds.iter().copied()),
        "attainable": rep.attainable,
        "probe": match probe {
            ProbeKind::EntangledWithAncilla => "entangled",
            ProbeKind::PureQubit(_) => "pure",
        },
        "generators": generators,
        "provenance": provenance(cfg),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    Ok(Outcome::ok(text))
}

fn emit_table(cfg: &RunConfig, table: &Table) -> String {
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let doc = json!({ "rows": table.to_json(), "provenance": provenance(cfg) });
            let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

pub fn cmd_sweep_alpha(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let rows = gap_profile(
        &cfg.n_values,
        &alpha_grid(cfg.alpha_points),
        cfg.t,
        cfg.x_norm,
        cfg.dx_norm,
    )?;
    let mut table = Table::new(vec![
        "N",
        "alpha",
        "uncontrolled_max",
        "controlled_limit",
        "gap",
    ]);
    for r in rows {
        table.push(vec![
            Cell::Int(r.n),
            Cell::Real(r.alpha),
            Cell::Real(r.uncontrolled_max),
            Cell::Real(r.controlled_limit),
            Cell::Real(r.gap),
        ]);
    }
    Ok(Outcome::ok(emit_table(cfg, &table)))
}

pub fn cmd_curves(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    if cfg.scenario != Scenario::Magnetometry {
        return Err(invalid(
            ErrorCode::Value,
            "scenario",
            "precision curves are defined for the magnetometry scenario",
        ));
    }
    let p = FieldPoint::new(cfg.b, cfg.theta, cfg.phi)?;
    let controlled = match &cfg.control {
        Control::None => false,
        Control::OptimalNegation(est) if est.is_empty() || est == &cfg.evaluation_point() => true,
        Control::OptimalNegation(_) => {
            return Err(invalid(
                ErrorCode::Value,
                "control.optimal_negation",
                "curves assume the estimate equals the true field",
            ))
        }
        Control::Custom(_) => {
            return Err(invalid(
                ErrorCode::Value,
                "control.custom",
                "curves support no control or the optimal negation only",
            ))
        }
    };
    let probe = match cfg.probe {
        Probe::Entangled => CurveProbe::Entangled,
        Probe::Pure(r) => CurveProbe::PureQubit(vec3(r)),
    };
    let rows = precision_curves(&p, cfg.t, cfg.n_max, controlled, probe)?;
    let json = cfg.format == Some(Format::Json);
    let mut header = vec!["N", "T", "dB", "dtheta", "dphi"];
    if json {
        header.push("attainable");
    }
    let mut table = Table::new(header);
    for r in rows {
        let mut row = vec![
            Cell::Int(r.n),
            Cell::Real(r.total_time),
            Cell::Real(r.d_b),
            Cell::Real(r.d_theta),
            Cell::Real(r.d_phi),
        ];
        if json {
            row.push(Cell::Bool(r.attainable));
        }
        table.push(row);
    }
    Ok(Outcome::ok(emit_table(cfg, &table)))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let summary = run_verify(&VerifyConfig {
        seed: cfg.seed,
        samples: cfg.samples,
        tolerance_scale: cfg.tolerance_scale,
    })?;
    Ok(Outcome {
        text: summary.render(),
        exit_code: if summary.passed() {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        },
    })
}
