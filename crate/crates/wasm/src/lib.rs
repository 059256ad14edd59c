//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layout is documented on
//! each function. The `*_rows` functions hold the logic and are callable
//! from native tests.

use qfim_core::control::{alpha_grid, gap_profile};
use qfim_core::generator::closed_form_generator;
use qfim_core::magnetometry::{precision_curves, CurveProbe, FieldPoint};
use qfim_core::su2::angle_between;
use qfim_core::{qfi_max, Vec3};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn gap_rows(
    n: u64,
    t: f64,
    x_norm: f64,
    dx_norm: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let rows =
        gap_profile(&[n], &alpha_grid(points), t, x_norm, dx_norm).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.alpha, r.uncontrolled_max, r.controlled_limit, r.gap])
        .collect())
}

/// Control gain against the effectiveness angle for `n` segments.
/// Rows of `[alpha, uncontrolled_max, controlled_limit, gap]`.
#[wasm_bindgen]
pub fn gap_curve(
    n: u32,
    t: f64,
    x_norm: f64,
    dx_norm: f64,
    points: u32,
) -> Result<Vec<f64>, JsValue> {
    gap_rows(n.into(), t, x_norm, dx_norm, points as usize).map_err(js_err)
}

#[allow(clippy::too_many_arguments)]
pub fn precision_rows(
    b: f64,
    theta: f64,
    phi: f64,
    t: f64,
    n_max: u64,
    controlled: bool,
    entangled: bool,
) -> Result<Vec<f64>, String> {
    let p = FieldPoint::new(b, theta, phi).map_err(|e| e.to_string())?;
    let probe = if entangled {
        CurveProbe::Entangled
    } else {
        CurveProbe::PureQubit(Vec3::Z)
    };
    let rows = precision_curves(&p, t, n_max, controlled, probe).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.n as f64, r.total_time, r.d_b, r.d_theta, r.d_phi])
        .collect())
}

/// Magnetometry precision bounds for `N = 1 ..= n_max`.
/// Rows of `[N, T, dB, dtheta, dphi]`; the pure probe points along z.
#[wasm_bindgen]
pub fn precision_curve(
    b: f64,
    theta: f64,
    phi: f64,
    t: f64,
    n_max: u32,
    controlled: bool,
    entangled: bool,
) -> Result<Vec<f64>, JsValue> {
    precision_rows(b, theta, phi, t, n_max.into(), controlled, entangled).map_err(js_err)
}

pub fn generator_summary(x: [f64; 3], d: [f64; 3], total_time: f64) -> Result<Vec<f64>, String> {
    let (x, d) = (Vec3::from_array(x), Vec3::from_array(d));
    let g = closed_form_generator(x, d, total_time).map_err(|e| e.to_string())?;
    let q = qfi_max(x, d, total_time).map_err(|e| e.to_string())?;
    let alpha = if x.is_zero() {
        0.0
    } else {
        angle_between(x, d).map_err(|e| e.to_string())?
    };
    let dir = g.direction;
    Ok(vec![
        g.magnitude,
        dir.x,
        dir.y,
        dir.z,
        q,
        total_time * total_time * d.norm_squared(),
        alpha,
    ])
}

/// Local generator of one parameter for field coefficients `x` and their
/// derivative `d` over total time `total_time`.
/// Returns `[|Y|, e_x, e_y, e_z, qfi_max, T^2 |d|^2, alpha]`.
#[wasm_bindgen]
pub fn generator_explorer(
    x0: f64,
    x1: f64,
    x2: f64,
    d0: f64,
    d1: f64,
    d2: f64,
    total_time: f64,
) -> Result<Vec<f64>, JsValue> {
    generator_summary([x0, x1, x2], [d0, d1, d2], total_time).map_err(js_err)
}
