//! The parametrization generator `H_l = i (d_l U^dagger) U` of a sequential
//! SU(2) scheme, computed three independent ways:
//!
//! * [`closed_form_generator`]: `H_l = |Y_l| e_l . J` from the resummed series,
//! * [`series_generator`]: the truncated nested-commutator series, summed in
//!   double-double arithmetic so that large `T|X|` does not lose the result to
//!   cancellation,
//! * [`numeric_generator`]: central differences of the explicit total unitary.
//!
//! Only the coefficient map depends on the parameters. The control vector is
//! a frozen constant under differentiation.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::control::build_total_unitary;
use crate::error::{QfimError, Result};
use crate::su2::{cross, CMat, Su2Basis, Vec3};
use crate::tolerance::Tolerances;

/// Which limit, if any, the closed form was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateFlag {
    Regular,
    /// `sin(alpha) ~ 0`: `X` and `d_l X` are parallel or antiparallel.
    Colinear,
    /// `|X| ~ 0`, which is also the perfectly controlled case `S = 0`.
    ZeroField,
}

/// `H_l = magnitude * (direction . J)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorDecomposition {
    pub magnitude: f64,
    pub direction: Vec3,
    pub flag: DegenerateFlag,
}

impl GeneratorDecomposition {
    /// Decompose a coefficient vector `Y`; `fallback` is used as the direction
    /// when `Y` vanishes.
    pub fn from_vector(y: Vec3, fallback: Vec3, flag: DegenerateFlag) -> Self {
        let magnitude = y.norm();
        let direction = if magnitude > 0.0 {
            y * (1.0 / magnitude)
        } else {
            fallback
        };
        Self {
            magnitude,
            direction,
            flag,
        }
    }

    /// Read `Y` off a traceless Hermitian 2x2 generator, `h = Y . J`.
    pub fn from_matrix(h: &CMat) -> Self {
        let y = Su2Basis::default().coefficients(h);
        Self::from_vector(y, Vec3::Z, DegenerateFlag::Regular)
    }

    /// The coefficient vector `Y = |Y| e`.
    pub fn vector(&self) -> Vec3 {
        self.direction * self.magnitude
    }

    pub fn to_matrix(&self) -> CMat {
        self.to_matrix_in(&Su2Basis::default())
    }

    pub fn to_matrix_in(&self, basis: &Su2Basis) -> CMat {
        basis.element(self.vector())
    }
}

/// Closed-form generator for `U = exp(-i T X . J)` with `d_l X = d_coeff`.
pub fn closed_form_generator(
    x_coeff: Vec3,
    d_coeff: Vec3,
    total_time: f64,
) -> Result<GeneratorDecomposition> {
    closed_form_generator_with(x_coeff, d_coeff, total_time, &Tolerances::default())
}

pub fn closed_form_generator_with(
    x_coeff: Vec3,
    d_coeff: Vec3,
    total_time: f64,
    tol: &Tolerances,
) -> Result<GeneratorDecomposition> {
    check_time(total_time)?;
    if d_coeff.is_zero() {
        return Err(QfimError::ZeroDerivative);
    }
    let t = total_time;
    let dn = d_coeff.norm();
    let xn = x_coeff.norm();
    let d_hat = d_coeff * (1.0 / dn);

    if xn < tol.zero_field {
        return Ok(GeneratorDecomposition {
            magnitude: t * dn,
            direction: -d_hat,
            flag: DegenerateFlag::ZeroField,
        });
    }

    let xd = cross(x_coeff, d_coeff);
    let sin_a = (xd.norm() / (xn * dn)).min(1.0);
    if sin_a < tol.colinear_sin {
        // Every nested cross product vanishes; only -T d_l X survives.
        return Ok(GeneratorDecomposition {
            magnitude: t * dn,
            direction: -d_hat,
            flag: DegenerateFlag::Colinear,
        });
    }
    let cos_a = (x_coeff.dot(d_coeff) / (xn * dn)).clamp(-1.0, 1.0);

    let u = t * xn;
    let v1 = xd * (1.0 / (xn * dn * sin_a));
    let v2 = cross(x_coeff, xd) * (1.0 / (xn * xn * dn * sin_a));
    let one_minus_cos = 2.0 * (0.5 * u).sin().powi(2);
    let y = -t * d_coeff + (dn * sin_a / xn) * ((u.sin() - u) * v2 + one_minus_cos * v1);

    let half = (0.5 * u).sin();
    let magnitude = (t * t * dn * dn * cos_a * cos_a
        + 4.0 * dn * dn * sin_a * sin_a / (xn * xn) * half * half)
        .sqrt();
    let yn = y.norm();
    let direction = if yn > 0.0 { y * (1.0 / yn) } else { -d_hat };
    Ok(GeneratorDecomposition {
        magnitude,
        direction,
        flag: DegenerateFlag::Regular,
    })
}

/// Generator under the optimal control `X_c = -X(x)` at `x~ = x`: `-T d_l X . J`.
pub fn controlled_generator(d_coeff: Vec3, total_time: f64) -> Result<GeneratorDecomposition> {
    closed_form_generator(Vec3::ZERO, d_coeff, total_time)
}

fn check_time(total_time: f64) -> Result<()> {
    if total_time >= 0.0 && total_time.is_finite() {
        Ok(())
    } else {
        Err(QfimError::InvalidScheme(format!(
            "total time must be finite and >= 0, got {total_time}"
        )))
    }
}

/// Result of a truncated series evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub matrix: CMat,
    pub vector: Vec3,
    /// Number of series terms summed (`n = 0 .. terms - 1`).
    pub terms: usize,
}

/// `sum_n (-T)^(n+1) / (n+1)! (X_(xn) d_l X) . J`, truncated once the
/// magnitude bound of the next term `T^(n+1) |X|^n |d_l X| / (n+1)!` drops
/// below `tol` and the tail is geometrically dominated.
pub fn series_generator(
    x_coeff: Vec3,
    d_coeff: Vec3,
    total_time: f64,
    tol: f64,
) -> Result<SeriesExpansion> {
    series_generator_capped(
        x_coeff,
        d_coeff,
        total_time,
        tol,
        Tolerances::default().series_max_terms,
    )
}

pub fn series_generator_capped(
    x_coeff: Vec3,
    d_coeff: Vec3,
    total_time: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesExpansion> {
    check_time(total_time)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(QfimError::InvalidScheme(format!(
            "series tolerance must be > 0, got {tol}"
        )));
    }
    let t = total_time;
    let tx = t * x_coeff.norm();
    let xdd = to_dd(x_coeff);

    // term_n = (-T)^(n+1)/(n+1)! X_(xn) d, built recursively in double-double.
    let mut term = scale_dd(to_dd(d_coeff), TwoFloat::from(-t));
    let mut sum = term;
    let mut bound = t * d_coeff.norm();
    let mut n = 1usize;
    loop {
        bound *= tx / (n as f64 + 1.0);
        if bound < tol && (n as f64 + 1.0) >= 2.0 * tx {
            break;
        }
        if n >= max_terms {
            return Err(QfimError::SeriesDepth {
                requested: n + 1,
                cap: max_terms,
            });
        }
        term = scale_dd(cross_dd(&xdd, &term), TwoFloat::from(-t) / (n as f64 + 1.0));
        if term.iter().all(|c| c.hi() == 0.0) {
            break;
        }
        for (s, c) in sum.iter_mut().zip(term) {
            *s += c;
        }
        n += 1;
    }
    let vector = Vec3::new(sum[0].into(), sum[1].into(), sum[2].into());
    Ok(SeriesExpansion {
        matrix: Su2Basis::default().element(vector),
        vector,
        terms: n,
    })
}

type DdVec = [TwoFloat; 3];

fn to_dd(v: Vec3) -> DdVec {
    v.to_array().map(TwoFloat::from)
}

fn scale_dd(v: DdVec, s: TwoFloat) -> DdVec {
    v.map(|c| c * s)
}

fn cross_dd(a: &DdVec, b: &DdVec) -> DdVec {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Parameter-dependent coefficient vector `x -> X(x)` with analytic partials.
pub trait CoefficientMap: Send + Sync {
    /// Number of parameters.
    fn dim(&self) -> usize;
    fn coefficients(&self, x: &[f64]) -> Vec3;
    fn partial(&self, x: &[f64], index: usize) -> Vec3;
    /// Points at which the analytic partials are checked against central
    /// differences when a scheme is constructed.
    fn sample_points(&self) -> Vec<Vec<f64>>;
}

/// Affine map `X(x) = base + sum_l x_l columns[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub base: Vec3,
    pub columns: Vec<Vec3>,
}

impl LinearMap {
    pub fn new(base: Vec3, columns: Vec<Vec3>) -> Self {
        Self { base, columns }
    }
}

impl CoefficientMap for LinearMap {
    fn dim(&self) -> usize {
        self.columns.len()
    }

    fn coefficients(&self, x: &[f64]) -> Vec3 {
        self.columns
            .iter()
            .zip(x)
            .fold(self.base, |acc, (c, &xl)| acc + *c * xl)
    }

    fn partial(&self, _x: &[f64], index: usize) -> Vec3 {
        self.columns[index]
    }

    fn sample_points(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.dim()], vec![0.5; self.dim()]]
    }
}

/// How `N` segments are composed into the total unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionMode {
    /// `exp(-i N t (X + X_c) . J)`
    #[default]
    MergedExponential,
    /// `(exp(-i t X_c . J) exp(-i t X . J))^N`
    SegmentProduct,
}

/// A sequential estimation scheme.
#[derive(Clone)]
pub struct SchemeConfig {
    map: Arc<dyn CoefficientMap>,
    control: Vec3,
    segment_time: f64,
    segment_count: u64,
    mode: CompositionMode,
}

impl fmt::Debug for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeConfig")
            .field("dim", &self.map.dim())
            .field("control", &self.control)
            .field("segment_time", &self.segment_time)
            .field("segment_count", &self.segment_count)
            .field("mode", &self.mode)
            .finish()
    }
}

impl SchemeConfig {
    pub fn new(
        map: impl CoefficientMap + 'static,
        control: Vec3,
        segment_time: f64,
        segment_count: u64,
        mode: CompositionMode,
    ) -> Result<Self> {
        Self::from_shared(Arc::new(map), control, segment_time, segment_count, mode)
    }

    pub fn from_shared(
        map: Arc<dyn CoefficientMap>,
        control: Vec3,
        segment_time: f64,
        segment_count: u64,
        mode: CompositionMode,
    ) -> Result<Self> {
        let dim = map.dim();
        if dim == 0 || dim > 3 {
            return Err(QfimError::Dimensionality(dim));
        }
        if !(segment_time > 0.0 && segment_time.is_finite()) {
            return Err(QfimError::InvalidScheme(format!(
                "segment time must be > 0, got {segment_time}"
            )));
        }
        if segment_count == 0 {
            return Err(QfimError::InvalidScheme(
                "segment count must be >= 1".into(),
            ));
        }
        validate_partials(map.as_ref(), Tolerances::default().partials_rel)?;
        Ok(Self {
            map,
            control,
            segment_time,
            segment_count,
            mode,
        })
    }

    pub fn with_control(&self, control: Vec3) -> Self {
        Self {
            control,
            ..self.clone()
        }
    }

    pub fn with_mode(&self, mode: CompositionMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn map(&self) -> &dyn CoefficientMap {
        self.map.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn control(&self) -> Vec3 {
        self.control
    }

    pub fn segment_time(&self) -> f64 {
        self.segment_time
    }

    pub fn segment_count(&self) -> u64 {
        self.segment_count
    }

    pub fn mode(&self) -> CompositionMode {
        self.mode
    }

    /// `T = N t`
    pub fn total_time(&self) -> f64 {
        self.segment_count as f64 * self.segment_time
    }

    pub fn coefficients(&self, x: &[f64]) -> Vec3 {
        self.map.coefficients(x)
    }

    pub fn partial(&self, x: &[f64], index: usize) -> Vec3 {
        self.map.partial(x, index)
    }

    /// `S = X(x) + X_c`
    pub fn summed(&self, x: &[f64]) -> Vec3 {
        self.map.coefficients(x) + self.control
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(QfimError::InvalidScheme(format!(
                "parameter point has {} entries, scheme expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

fn validate_partials(map: &dyn CoefficientMap, rel: f64) -> Result<()> {
    for p in map.sample_points() {
        for l in 0..map.dim() {
            let h = 1e-5 * p[l].abs().max(1.0);
            let (mut xp, mut xm) = (p.clone(), p.clone());
            xp[l] += h;
            xm[l] -= h;
            let fd = (map.coefficients(&xp) - map.coefficients(&xm)) * (0.5 / h);
            let analytic = map.partial(&p, l);
            let scale = analytic.norm().max(1.0);
            if fd.max_abs_diff(analytic) > rel * scale {
                return Err(QfimError::InvalidScheme(format!(
                    "analytic partial {l} disagrees with central differences at {p:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Default central-difference step, `1e-6 max(1, |x_l|)`.
pub fn default_step(x_l: f64) -> f64 {
    1e-6 * x_l.abs().max(1.0)
}

/// `i (d_l U_tot^dagger) U_tot` by central differences of the explicit total
/// unitary, symmetrized to its Hermitian part.
pub fn numeric_generator(scheme: &SchemeConfig, x: &[f64], index: usize, h: f64) -> Result<CMat> {
    let du = unitary_derivative(scheme, x, index, h)?;
    let u = build_total_unitary(scheme, x)?;
    Ok((&du.adjoint() * &u).scale(Complex64::i()).hermitian_part())
}

/// Central-difference `d_l U_tot`.
pub(crate) fn unitary_derivative(
    scheme: &SchemeConfig,
    x: &[f64],
    index: usize,
    h: f64,
) -> Result<CMat> {
    scheme.check_point(x)?;
    if index >= scheme.dim() {
        return Err(QfimError::ParameterIndex {
            index,
            dim: scheme.dim(),
        });
    }
    let tol = Tolerances::default();
    if !(h >= tol.fd_step_min && h <= tol.fd_step_max) {
        return Err(QfimError::StepSize(h));
    }
    let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
    xp[index] += h;
    xm[index] -= h;
    let up = build_total_unitary(scheme, &xp)?;
    let um = build_total_unitary(scheme, &xm)?;
    Ok((&up - &um).scale_real(0.5 / h))
}
