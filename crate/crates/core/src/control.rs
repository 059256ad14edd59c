//! Total unitaries of the sequential scheme, the optimal control
//! `X_c = -X(x~)`, effectiveness angles and the control-gain landscape.

use std::f64::consts::FRAC_PI_2;

use crate::error::{QfimError, Result};
use crate::generator::{CoefficientMap, CompositionMode, SchemeConfig};
use crate::qfi::{qfi_max, qfi_max_controlled, qfi_max_from_cos};
use crate::su2::{angle_between, su2_exp, CMat, Vec3};
use crate::tolerance::Tolerances;

/// `U_tot(x)` for the scheme's composition mode.
pub fn build_total_unitary(scheme: &SchemeConfig, x: &[f64]) -> Result<CMat> {
    scheme.check_point(x)?;
    let t = scheme.segment_time();
    let n = scheme.segment_count();
    Ok(match scheme.mode() {
        CompositionMode::MergedExponential => su2_exp(scheme.summed(x), scheme.total_time()),
        CompositionMode::SegmentProduct => {
            let cell = &su2_exp(scheme.control(), t) * &su2_exp(scheme.coefficients(x), t);
            cell.pow(n)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlKind {
    None,
    OptimalNegation,
    Custom,
}

/// A frozen control vector together with the estimate it was designed at.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlDesign {
    pub control_vector: Vec3,
    pub estimate_point: Vec<f64>,
    pub kind: ControlKind,
}

impl ControlDesign {
    pub fn none() -> Self {
        Self {
            control_vector: Vec3::ZERO,
            estimate_point: Vec::new(),
            kind: ControlKind::None,
        }
    }

    pub fn custom(control_vector: Vec3) -> Self {
        Self {
            control_vector,
            estimate_point: Vec::new(),
            kind: ControlKind::Custom,
        }
    }
}

/// `X_c = -X(x~)`.
pub fn design_control(map: &dyn CoefficientMap, estimate: &[f64]) -> ControlDesign {
    ControlDesign {
        control_vector: -map.coefficients(estimate),
        estimate_point: estimate.to_vec(),
        kind: ControlKind::OptimalNegation,
    }
}

/// `alpha_l = <X, d_l X>` for each parameter.
pub fn characterize(x_coeff: Vec3, d_coeffs: &[Vec3]) -> Result<Vec<f64>> {
    d_coeffs
        .iter()
        .map(|&d| angle_between(x_coeff, d))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenefitClass {
    /// `alpha = pi/2`: control lifts the maximum the most.
    MaxBenefit,
    PartialBenefit,
    /// `alpha` in `{0, pi}`: the quadratic term already saturates the bound.
    NoBenefit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effectiveness {
    pub alpha: f64,
    pub beta: f64,
    pub uncontrolled_max: f64,
    pub controlled_max: f64,
    pub gap: f64,
    pub class: BenefitClass,
}

pub fn classify(alpha: f64, tol: f64) -> BenefitClass {
    if alpha.abs() <= tol || (alpha - std::f64::consts::PI).abs() <= tol {
        BenefitClass::NoBenefit
    } else if (alpha - FRAC_PI_2).abs() <= tol {
        BenefitClass::MaxBenefit
    } else {
        BenefitClass::PartialBenefit
    }
}

/// Per-parameter comparison of the uncontrolled maximum against the maximum
/// under a control vector `x_c` (so `S = X + X_c`). When `S` vanishes `beta`
/// is undefined and reported as `NaN`.
pub fn effectiveness_profile(
    x_coeff: Vec3,
    d_coeffs: &[Vec3],
    control: Vec3,
    total_time: f64,
) -> Result<Vec<Effectiveness>> {
    let tol = Tolerances::default();
    let s = x_coeff + control;
    d_coeffs
        .iter()
        .map(|&d| {
            let alpha = angle_between(x_coeff, d)?;
            let beta = angle_between(s, d).unwrap_or(f64::NAN);
            let uncontrolled_max = qfi_max(x_coeff, d, total_time)?;
            let controlled_max = qfi_max_controlled(s, d, total_time)?;
            Ok(Effectiveness {
                alpha,
                beta,
                uncontrolled_max,
                controlled_max,
                gap: controlled_max - uncontrolled_max,
                class: classify(alpha, tol.angle_class),
            })
        })
        .collect()
}

/// One point of the control-gain landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub n: u64,
    pub alpha: f64,
    pub uncontrolled_max: f64,
    pub controlled_limit: f64,
    pub gap: f64,
}

/// `alpha_k = k pi / (points - 1)`, `k = 0 .. points - 1`.
pub fn alpha_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![FRAC_PI_2],
        _ => (0..points)
            .map(|k| k as f64 * std::f64::consts::PI / (points - 1) as f64)
            .collect(),
    }
}

/// Uncontrolled maximum against the `|S| -> 0` limit over `N x alpha`, rows
/// ordered N-major then by the order of `alphas`.
pub fn gap_profile(
    n_values: &[u64],
    alphas: &[f64],
    t: f64,
    x_norm: f64,
    dx_norm: f64,
) -> Result<Vec<GapRow>> {
    if n_values.is_empty() || alphas.is_empty() {
        return Err(QfimError::InvalidScheme("empty sweep grid".into()));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(QfimError::InvalidScheme(format!(
            "segment time must be > 0, got {t}"
        )));
    }
    let mut rows = Vec::with_capacity(n_values.len() * alphas.len());
    for &n in n_values {
        let total = n as f64 * t;
        let limit = total * total * dx_norm * dx_norm;
        for &alpha in alphas {
            let unc = qfi_max_from_cos(x_norm, dx_norm, alpha.cos(), total);
            rows.push(GapRow {
                n,
                alpha,
                uncontrolled_max: unc,
                controlled_limit: limit,
                gap: limit - unc,
            });
        }
    }
    Ok(rows)
}

/// Operator-norm distance between segment-product and merged total unitaries.
pub fn composition_distance(scheme: &SchemeConfig, x: &[f64]) -> Result<f64> {
    let merged = build_total_unitary(&scheme.with_mode(CompositionMode::MergedExponential), x)?;
    let product = build_total_unitary(&scheme.with_mode(CompositionMode::SegmentProduct), x)?;
    Ok((&product - &merged).operator_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::LinearMap;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn scheme(control: Vec3, mode: CompositionMode) -> SchemeConfig {
        let map = LinearMap::new(
            Vec3::new(0.6, -0.2, 0.9),
            vec![Vec3::new(0.1, 0.8, 0.0), Vec3::new(0.0, 0.3, -0.7)],
        );
        SchemeConfig::new(map, control, 0.25, 8, mode).unwrap()
    }

    #[test]
    fn merged_and_product_agree_without_control() {
        let s = scheme(Vec3::ZERO, CompositionMode::MergedExponential);
        let x = [0.4, -0.9];
        let a = build_total_unitary(&s, &x).unwrap();
        let b = build_total_unitary(&s.with_mode(CompositionMode::SegmentProduct), &x).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-13);
        assert!(a.is_unitary(1e-12));
        assert!(b.is_unitary(1e-12));
    }

    #[test]
    fn exact_negation_gives_identity() {
        let base = scheme(Vec3::ZERO, CompositionMode::MergedExponential);
        let x = [0.4, -0.9];
        let design = design_control(base.map(), &x);
        assert_eq!(design.kind, ControlKind::OptimalNegation);
        for mode in [
            CompositionMode::MergedExponential,
            CompositionMode::SegmentProduct,
        ] {
            let s = base.with_control(design.control_vector).with_mode(mode);
            let u = build_total_unitary(&s, &x).unwrap();
            assert!(u.max_abs_diff(&CMat::identity(2)) < 1e-13);
        }
    }

    #[test]
    fn product_deviates_when_estimate_is_off() {
        let base = scheme(Vec3::ZERO, CompositionMode::MergedExponential);
        let design = design_control(base.map(), &[0.4, -0.9]);
        let s = base.with_control(design.control_vector);
        assert!(composition_distance(&s, &[0.5, -0.9]).unwrap() > 1e-6);
    }

    #[test]
    fn characterize_examples() {
        let a = characterize(
            Vec3::new(1.0, 1.0, 0.0),
            &[Vec3::X, Vec3::new(1.0, 1.0, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(a[0], FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(a[1], 0.0);
        assert!(characterize(Vec3::ZERO, &[Vec3::X]).is_err());
    }

    #[test]
    fn classes() {
        let t = 1e-9;
        assert_eq!(classify(0.0, t), BenefitClass::NoBenefit);
        assert_eq!(classify(PI, t), BenefitClass::NoBenefit);
        assert_eq!(classify(FRAC_PI_2, t), BenefitClass::MaxBenefit);
        assert_eq!(classify(1.0, t), BenefitClass::PartialBenefit);
    }

    #[test]
    fn effectiveness_gap_nonnegative() {
        let x = Vec3::new(0.0, 0.0, 2.0);
        let ds = [Vec3::X, Vec3::Z, Vec3::new(1.0, 0.0, 1.0)];
        let prof = effectiveness_profile(x, &ds, -x, 5.0).unwrap();
        assert_eq!(prof[0].class, BenefitClass::MaxBenefit);
        assert_eq!(prof[1].class, BenefitClass::NoBenefit);
        assert_eq!(prof[2].class, BenefitClass::PartialBenefit);
        for p in &prof {
            assert!(p.gap >= -1e-12);
        }
        assert_abs_diff_eq!(prof[1].gap, 0.0, epsilon = 1e-12);
        assert!(prof[0].beta.is_nan());
    }

    #[test]
    fn gap_profile_caption_point() {
        let rows = gap_profile(&[5], &[FRAC_PI_2], 1.0, 2.0, 1.0).unwrap();
        let r = rows[0];
        assert_abs_diff_eq!(r.uncontrolled_max, 5.0f64.sin().powi(2), epsilon = 1e-13);
        assert_abs_diff_eq!(r.controlled_limit, 25.0, epsilon = 0.0);
        assert_abs_diff_eq!(r.gap, 25.0 - 5.0f64.sin().powi(2), epsilon = 1e-13);
        assert_abs_diff_eq!(r.gap, 24.080_464, epsilon = 1e-6);
    }

    #[test]
    fn gap_profile_edges() {
        let alphas = alpha_grid(7);
        let rows = gap_profile(&[3, 5, 10], &alphas, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(rows.len(), 21);
        for chunk in rows.chunks(7) {
            assert_eq!(chunk[0].gap, 0.0);
            for k in 0..7 {
                assert!((chunk[k].gap - chunk[6 - k].gap).abs() <= 1e-12);
            }
        }
        assert!(gap_profile(&[], &alphas, 1.0, 2.0, 1.0).is_err());
        assert!(gap_profile(&[1], &[], 1.0, 2.0, 1.0).is_err());
    }
}
