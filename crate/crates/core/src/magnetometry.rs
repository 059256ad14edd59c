//! Spin-1/2 in a static field `H = B n0 . sigma = 2B n0 . J`, with the three
//! unknowns `(B, theta, phi)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QfimError, Result};
use crate::generator::{
    CoefficientMap, CompositionMode, DegenerateFlag, GeneratorDecomposition, SchemeConfig,
};
use crate::oracle;
use crate::qfi::{entangled_weak_comm, phi_plus, qfim_pure, weak_comm_residual};
use crate::su2::{cross, Vec3};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    b: f64,
    theta: f64,
    phi: f64,
}

impl FieldPoint {
    pub fn new(b: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(QfimError::InvalidField(format!("B must be > 0, got {b}")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(QfimError::InvalidField(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(QfimError::InvalidField(format!(
                "phi must be finite, got {phi}"
            )));
        }
        Ok(Self { b, theta, phi })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn as_params(&self) -> [f64; 3] {
        [self.b, self.theta, self.phi]
    }
}

/// `n0 = (sin theta cos phi, sin theta sin phi, cos theta)`
pub fn n0(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// `d n0 / d theta`
pub fn n0_prime(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(ct * cp, ct * sp, -st)
}

/// `(-sin phi, cos phi, 0)`
pub fn azimuthal(phi: f64) -> Vec3 {
    let (sp, cp) = phi.sin_cos();
    Vec3::new(-sp, cp, 0.0)
}

/// `d n0 / d phi = sin theta * azimuthal(phi)`
pub fn n0_double_prime(theta: f64, phi: f64) -> Vec3 {
    azimuthal(phi) * theta.sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoefficients {
    pub x: Vec3,
    pub d_b: Vec3,
    pub d_theta: Vec3,
    pub d_phi: Vec3,
}

impl FieldCoefficients {
    pub fn partials(&self) -> [Vec3; 3] {
        [self.d_b, self.d_theta, self.d_phi]
    }
}

pub fn field_coefficients(p: &FieldPoint) -> FieldCoefficients {
    let (b, th, ph) = (p.b, p.theta, p.phi);
    FieldCoefficients {
        x: n0(th, ph) * (2.0 * b),
        d_b: n0(th, ph) * 2.0,
        d_theta: n0_prime(th, ph) * (2.0 * b),
        d_phi: n0_double_prime(th, ph) * (2.0 * b),
    }
}

/// `(B, theta, phi) -> 2B n0(theta, phi)` as a scheme coefficient map.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldMap;

impl CoefficientMap for FieldMap {
    fn dim(&self) -> usize {
        3
    }

    fn coefficients(&self, x: &[f64]) -> Vec3 {
        n0(x[1], x[2]) * (2.0 * x[0])
    }

    fn partial(&self, x: &[f64], index: usize) -> Vec3 {
        let (b, th, ph) = (x[0], x[1], x[2]);
        match index {
            0 => n0(th, ph) * 2.0,
            1 => n0_prime(th, ph) * (2.0 * b),
            _ => n0_double_prime(th, ph) * (2.0 * b),
        }
    }

    fn sample_points(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.7, 0.3], vec![3.0, 2.1, 4.0]]
    }
}

/// Sequential scheme for the field with `N` segments of length `t`; a
/// controlled scheme uses `X_c = -X(p)`, i.e. the estimate equals the truth.
pub fn field_scheme(
    p: &FieldPoint,
    t: f64,
    n: u64,
    controlled: bool,
    mode: CompositionMode,
) -> Result<SchemeConfig> {
    let control = if controlled {
        -field_coefficients(p).x
    } else {
        Vec3::ZERO
    };
    SchemeConfig::new(FieldMap, control, t, n, mode)
}

fn check_time(total_time: f64) -> Result<()> {
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(QfimError::InvalidScheme(format!(
            "total time must be finite and >= 0, got {total_time}"
        )));
    }
    Ok(())
}

/// Signed unit vectors `(e_B, e_theta, e_phi)` of the uncontrolled generators.
fn signed_directions(p: &FieldPoint, total_time: f64) -> [Vec3; 3] {
    let (s, c) = (p.b * total_time).sin_cos();
    let np = n0_prime(p.theta, p.phi);
    let m = azimuthal(p.phi);
    [-n0(p.theta, p.phi), np * (-c) + m * s, m * (-c) - np * s]
}

/// Closed-form uncontrolled generators for `(B, theta, phi)`.
pub fn generators_no_control(
    p: &FieldPoint,
    total_time: f64,
) -> Result<[GeneratorDecomposition; 3]> {
    check_time(total_time)?;
    let s = (p.b * total_time).sin();
    let [eb, et, ep] = signed_directions(p, total_time);
    let yb = eb * (2.0 * total_time);
    let yt = et * (2.0 * s);
    let yp = ep * (2.0 * s * p.theta.sin());
    Ok([
        GeneratorDecomposition::from_vector(yb, eb, DegenerateFlag::Colinear),
        GeneratorDecomposition::from_vector(yt, et, DegenerateFlag::Regular),
        GeneratorDecomposition::from_vector(yp, ep, DegenerateFlag::Regular),
    ])
}

/// Closed-form generators under the optimal control, `Y_l = -T d_l X`.
pub fn generators_controlled(
    p: &FieldPoint,
    total_time: f64,
) -> Result<[GeneratorDecomposition; 3]> {
    check_time(total_time)?;
    let t = total_time;
    let eb = -n0(p.theta, p.phi);
    let et = -n0_prime(p.theta, p.phi);
    let ep = -azimuthal(p.phi);
    Ok([
        GeneratorDecomposition::from_vector(eb * (2.0 * t), eb, DegenerateFlag::ZeroField),
        GeneratorDecomposition::from_vector(et * (2.0 * p.b * t), et, DegenerateFlag::ZeroField),
        GeneratorDecomposition::from_vector(
            ep * (2.0 * p.b * t * p.theta.sin()),
            ep,
            DegenerateFlag::ZeroField,
        ),
    ])
}

/// `diag(4T^2, 4 sin^2(BT), 4 sin^2(BT) sin^2 theta)`
pub fn qfim_no_control(p: &FieldPoint, total_time: f64) -> Result<DMatrix<f64>> {
    check_time(total_time)?;
    let s2 = (p.b * total_time).sin().powi(2);
    let st2 = p.theta.sin().powi(2);
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        4.0 * total_time * total_time,
        4.0 * s2,
        4.0 * s2 * st2,
    ])))
}

/// `diag(4T^2, 4(BT)^2, 4(BT)^2 sin^2 theta)`
pub fn qfim_controlled(p: &FieldPoint, total_time: f64) -> Result<DMatrix<f64>> {
    check_time(total_time)?;
    let bt2 = (p.b * total_time).powi(2);
    let st2 = p.theta.sin().powi(2);
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        4.0 * total_time * total_time,
        4.0 * bt2,
        4.0 * bt2 * st2,
    ])))
}

/// `Tr[[H_a, H_b] rho_in]` for the pairs `(B, theta)`, `(B, phi)`, `(theta, phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResiduals {
    pub b_theta: Complex64,
    pub b_phi: Complex64,
    pub theta_phi: Complex64,
}

impl PairResiduals {
    pub fn to_array(self) -> [Complex64; 3] {
        [self.b_theta, self.b_phi, self.theta_phi]
    }

    pub fn max_norm(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_bloch(r: Vec3) -> Result<()> {
    let norm = r.norm();
    if norm > 1.0 + Tolerances::default().bloch_norm {
        return Err(QfimError::UnphysicalState { norm });
    }
    Ok(())
}

/// Weak-commutation residuals written out for the field example.
pub fn weak_comm_example(
    p: &FieldPoint,
    total_time: f64,
    r: Vec3,
    controlled: bool,
) -> Result<PairResiduals> {
    check_time(total_time)?;
    check_bloch(r)?;
    let t = total_time;
    let (b, th, ph) = (p.b, p.theta, p.phi);
    let i = Complex64::i();
    if controlled {
        Ok(PairResiduals {
            b_theta: i * (2.0 * t * t * b * azimuthal(ph).dot(r)),
            b_phi: i * (-2.0 * t * t * b * th.sin() * n0_prime(th, ph).dot(r)),
            theta_phi: i * (2.0 * t * t * b * b * th.sin() * n0(th, ph).dot(r)),
        })
    } else {
        let s = (b * t).sin();
        let [eb, et, ep] = signed_directions(p, t);
        Ok(PairResiduals {
            b_theta: i * (-2.0 * t * s * ep.dot(r)),
            b_phi: i * (2.0 * t * th.sin() * s * et.dot(r)),
            theta_phi: i * (-2.0 * th.sin() * s * s * eb.dot(r)),
        })
    }
}

fn pair_indices() -> [(usize, usize); 3] {
    [(0, 1), (0, 2), (1, 2)]
}

/// Which probe a precision curve is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveProbe {
    PureQubit(Vec3),
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRow {
    pub n: u64,
    pub total_time: f64,
    pub d_b: f64,
    pub d_theta: f64,
    pub d_phi: f64,
    pub attainable: bool,
}

fn deviation(f: f64) -> f64 {
    if f > 0.0 {
        1.0 / f.sqrt()
    } else {
        f64::INFINITY
    }
}

/// `1/sqrt(F_ll)` from the optimal QFIM diagonal for `N = 1 ..= n_max`.
///
/// The attainability flag is evaluated for the requested probe: the
/// entangled probe is checked on the explicit 4-dimensional state, the pure
/// probe through its residuals and through whether it reaches every
/// diagonal maximum.
pub fn precision_curves(
    p: &FieldPoint,
    t: f64,
    n_max: u64,
    controlled: bool,
    probe: CurveProbe,
) -> Result<Vec<PrecisionRow>> {
    if n_max < 1 {
        return Err(QfimError::InvalidScheme(format!(
            "n_max must be >= 1, got {n_max}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(QfimError::InvalidScheme(format!(
            "segment time must be > 0, got {t}"
        )));
    }
    if let CurveProbe::PureQubit(r) = probe {
        let norm = r.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QfimError::MixedProbe(norm));
        }
    }
    let tol = Tolerances::default().attainability;
    (1..=n_max)
        .map(|n| {
            let total = n as f64 * t;
            let (qfim, gens) = if controlled {
                (qfim_controlled(p, total)?, generators_controlled(p, total)?)
            } else {
                (qfim_no_control(p, total)?, generators_no_control(p, total)?)
            };
            let attainable = match probe {
                CurveProbe::Entangled => {
                    let psi = phi_plus();
                    let mut ok = true;
                    for (a, b) in pair_indices() {
                        ok &= entangled_weak_comm(&gens[a], &gens[b], &psi)?.norm() <= tol;
                    }
                    ok
                }
                CurveProbe::PureQubit(r) => {
                    let f = qfim_pure(&gens, r);
                    let residuals_vanish = pair_indices()
                        .iter()
                        .all(|&(a, b)| weak_comm_residual(&gens[a], &gens[b], r).norm() <= tol);
                    residuals_vanish && (0..3).all(|l| f[(l, l)] >= qfim[(l, l)] - tol)
                }
            };
            Ok(PrecisionRow {
                n,
                total_time: total,
                d_b: deviation(qfim[(0, 0)]),
                d_theta: deviation(qfim[(1, 1)]),
                d_phi: deviation(qfim[(2, 2)]),
                attainable,
            })
        })
        .collect()
}

/// Off-diagonal QFIM entries `4 Cov_in(H_a, H_b)` for a qubit probe `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonal {
    /// `(B, theta)`, `(B, phi)`, `(theta, phi)` for the supplied `r`.
    pub covariances: [f64; 3],
    /// Whether `r` is orthogonal to every generator direction.
    pub orthogonality_holds: bool,
    /// `r` with its components along the generator directions removed.
    pub projected_r: Vec3,
    /// Covariances for `projected_r`.
    pub projected_covariances: [f64; 3],
}

fn covariances(gens: &[GeneratorDecomposition; 3], r: Vec3) -> [f64; 3] {
    let f = qfim_pure(gens, r);
    pair_indices().map(|(a, b)| f[(a, b)])
}

fn project_out(r: Vec3, dirs: &[Vec3]) -> Vec3 {
    let mut basis: Vec<Vec3> = Vec::new();
    for &d in dirs {
        let mut v = d;
        for &q in &basis {
            v = v - q * q.dot(v);
        }
        if v.norm() > 1e-9 {
            basis.push(v * (1.0 / v.norm()));
        }
    }
    basis.iter().fold(r, |acc, &q| acc - q * q.dot(acc))
}

pub fn off_diagonal_check(
    p: &FieldPoint,
    total_time: f64,
    r: Vec3,
    controlled: bool,
) -> Result<OffDiagonal> {
    check_bloch(r)?;
    let gens = if controlled {
        generators_controlled(p, total_time)?
    } else {
        generators_no_control(p, total_time)?
    };
    let dirs: Vec<Vec3> = gens
        .iter()
        .filter(|g| g.magnitude > 0.0)
        .map(|g| g.direction)
        .collect();
    let scale = r.norm().max(1.0);
    let orthogonality_holds = dirs.iter().all(|d| d.dot(r).abs() <= 1e-12 * scale);
    let projected_r = project_out(r, &dirs);
    Ok(OffDiagonal {
        covariances: covariances(&gens, r),
        orthogonality_holds,
        projected_r,
        projected_covariances: covariances(&gens, projected_r),
    })
}

/// Off-diagonal entries for the entangled probe, from the explicit 4x4 trace.
pub fn off_diagonal_entangled(
    p: &FieldPoint,
    total_time: f64,
    controlled: bool,
) -> Result<[f64; 3]> {
    let gens = if controlled {
        generators_controlled(p, total_time)?
    } else {
        generators_no_control(p, total_time)?
    };
    let lifted: Vec<_> = gens
        .iter()
        .map(|g| crate::qfi::extend_with_ancilla(&g.to_matrix()))
        .collect();
    let f = oracle::trace_qfim(&lifted, &oracle::projector(&phi_plus()));
    Ok(pair_indices().map(|(a, b)| f[(a, b)]))
}

/// `e_B x e_theta`, `e_B x e_phi`, `e_theta x e_phi` of the uncontrolled generators.
pub fn direction_cross_products(p: &FieldPoint, total_time: f64) -> [Vec3; 3] {
    let [eb, et, ep] = signed_directions(p, total_time);
    [cross(eb, et), cross(eb, ep), cross(et, ep)]
}
