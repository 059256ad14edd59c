//! QFI values, QFI matrices, weak-commutation residuals and the
//! attainability verdict, for single-qubit pure probes and for maximally
//! entangled probes with an idle ancilla.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::control::build_total_unitary;
use crate::error::{QfimError, Result};
use crate::generator::{
    closed_form_generator, default_step, numeric_generator, unitary_derivative, CompositionMode,
    GeneratorDecomposition, SchemeConfig,
};
use crate::su2::{cross, CMat, Vec3};
use crate::tolerance::Tolerances;

/// `|Y|^2 (1 - (e . r)^2)` for a pure qubit probe with Bloch vector `r`.
pub fn qfi_pure(gen: &GeneratorDecomposition, r: Vec3) -> f64 {
    let er = gen.direction.dot(r);
    (gen.magnitude * gen.magnitude * (1.0 - er * er)).max(0.0)
}

/// `F_ll' = |Y_l||Y_l'| (e_l . e_l' - (e_l . r)(e_l' . r))`.
pub fn qfim_pure(gens: &[GeneratorDecomposition], r: Vec3) -> DMatrix<f64> {
    let d = gens.len();
    DMatrix::from_fn(d, d, |a, b| {
        if a == b {
            return qfi_pure(&gens[a], r);
        }
        let (ga, gb) = (&gens[a], &gens[b]);
        ga.magnitude
            * gb.magnitude
            * (ga.direction.dot(gb.direction) - ga.direction.dot(r) * gb.direction.dot(r))
    })
}

/// QFIM of the maximally entangled probe with an idle ancilla:
/// `F_ll' = |Y_l||Y_l'| e_l . e_l'`, independent of any Bloch vector.
pub fn qfim_entangled(gens: &[GeneratorDecomposition]) -> DMatrix<f64> {
    qfim_pure(gens, Vec3::ZERO)
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `T^2 |dX|^2 [cos^2 a + sin^2 a sinc^2(T|X|/2)]`, the maximal QFI over pure
/// qubit probes.
pub fn qfi_max_from_cos(x_norm: f64, dx_norm: f64, cos_alpha: f64, total_time: f64) -> f64 {
    let cos2 = (cos_alpha * cos_alpha).min(1.0);
    qfi_max_from_parts(x_norm, dx_norm * dx_norm, cos2, 1.0 - cos2, total_time)
}

fn qfi_max_from_parts(x_norm: f64, dx_norm_sq: f64, cos2: f64, sin2: f64, total_time: f64) -> f64 {
    let bound = total_time * total_time * dx_norm_sq;
    let sc = sinc(0.5 * total_time * x_norm);
    (bound * (cos2 + sin2 * sc * sc)).min(bound)
}

/// Maximal QFI `|Y_l|^2` of the uncontrolled scheme.
pub fn qfi_max(x_coeff: Vec3, d_coeff: Vec3, total_time: f64) -> Result<f64> {
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(QfimError::InvalidScheme(format!(
            "total time must be finite and >= 0, got {total_time}"
        )));
    }
    let (xn2, dn2) = (x_coeff.norm_squared(), d_coeff.norm_squared());
    if dn2 == 0.0 {
        return Ok(0.0);
    }
    let (cos2, sin2) = if xn2 == 0.0 {
        (1.0, 0.0)
    } else {
        // Both from their own products so neither suffers cancellation.
        let denom = xn2 * dn2;
        let dot = x_coeff.dot(d_coeff);
        (
            (dot * dot / denom).min(1.0),
            (cross(x_coeff, d_coeff).norm_squared() / denom).min(1.0),
        )
    };
    Ok(qfi_max_from_parts(
        x_coeff.norm(),
        dn2,
        cos2,
        sin2,
        total_time,
    ))
}

/// Maximal QFI under a control with `S = X + X_c`; `beta` takes the place of `alpha`.
pub fn qfi_max_controlled(s_coeff: Vec3, d_coeff: Vec3, total_time: f64) -> Result<f64> {
    qfi_max(s_coeff, d_coeff, total_time)
}

/// `Tr[[H_a, H_b] rho_in] = (i/2) |Y_a||Y_b| (e_a x e_b) . r`.
pub fn weak_comm_residual(
    gen_a: &GeneratorDecomposition,
    gen_b: &GeneratorDecomposition,
    r: Vec3,
) -> Complex64 {
    let triple = cross(gen_a.direction, gen_b.direction).dot(r);
    Complex64::new(0.0, 0.5 * gen_a.magnitude * gen_b.magnitude * triple)
}

/// `(|00> + |11>) / sqrt 2`
pub fn phi_plus() -> DVector<Complex64> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    DVector::from_vec(vec![a, z, z, a])
}

/// QFI `|Y|^2` of the maximally entangled probe; no orthogonality required.
pub fn entangled_qfi(gen: &GeneratorDecomposition) -> f64 {
    gen.magnitude * gen.magnitude
}

/// `H (x) I_A`
pub fn extend_with_ancilla(h: &CMat) -> CMat {
    h.kron(&CMat::identity(2))
}

fn check_normalized(probe: &DVector<Complex64>) -> Result<()> {
    let n2 = probe.norm_squared();
    if (n2 - 1.0).abs() > Tolerances::default().normalization {
        return Err(QfimError::Normalization(n2));
    }
    Ok(())
}

/// `<psi| [H_a (x) I, H_b (x) I] |psi>` on an explicit 4-dimensional probe.
pub fn entangled_weak_comm(
    gen_a: &GeneratorDecomposition,
    gen_b: &GeneratorDecomposition,
    probe: &DVector<Complex64>,
) -> Result<Complex64> {
    if probe.len() != 4 {
        return Err(QfimError::InvalidScheme(format!(
            "ancilla-extended probe must have 4 amplitudes, got {}",
            probe.len()
        )));
    }
    check_normalized(probe)?;
    let a = extend_with_ancilla(&gen_a.to_matrix());
    let b = extend_with_ancilla(&gen_b.to_matrix());
    let c = a.commutator(&b);
    Ok(probe.dotc(&c.apply(probe)))
}

/// Per-parameter generators of a scheme at `x`.
///
/// In merged mode these are the closed forms with `S = X(x) + X_c`; in
/// segment-product mode no closed form applies and the generators are read
/// off the finite-difference oracle.
pub fn scheme_generators(scheme: &SchemeConfig, x: &[f64]) -> Result<Vec<GeneratorDecomposition>> {
    scheme.check_point(x)?;
    let s = scheme.summed(x);
    (0..scheme.dim())
        .map(|l| match scheme.mode() {
            CompositionMode::MergedExponential => {
                closed_form_generator(s, scheme.partial(x, l), scheme.total_time())
            }
            CompositionMode::SegmentProduct => {
                let h = numeric_generator(scheme, x, l, default_step(x[l]))?;
                Ok(GeneratorDecomposition::from_matrix(&h))
            }
        })
        .collect()
}

/// Output of [`sld_oracle`].
#[derive(Debug, Clone)]
pub struct SldOracle {
    /// `L_l = 2 (d_l U_tot) U_tot^dagger`, ancilla-extended for 4-dim probes.
    pub slds: Vec<CMat>,
    /// `Tr[[L_l, L_l'] rho_x]`
    pub sld_residuals: DMatrix<Complex64>,
    /// `-4 Tr[[H_l, H_l'] rho_in]`
    pub generator_residuals: DMatrix<Complex64>,
    /// Largest `|sld - generator|` residual mismatch.
    pub identity_deviation: f64,
    /// Largest elementwise `|U^dagger L_l U - 2i H_l|`.
    pub rotation_deviation: f64,
}

/// Finite-difference SLD-style operators and the check that their
/// weak-commutation residuals on `rho_x` equal `-4` times the generator
/// residuals on `rho_in`.
pub fn sld_oracle(scheme: &SchemeConfig, x: &[f64], probe: &CMat) -> Result<SldOracle> {
    let dim = probe.dim();
    if dim != 2 && dim != 4 {
        return Err(QfimError::InvalidScheme(format!(
            "probe must be 2- or 4-dimensional, got {dim}"
        )));
    }
    if !probe.is_hermitian(1e-10) || (probe.trace().re - 1.0).abs() > 1e-10 {
        return Err(QfimError::InvalidScheme(
            "probe is not a unit-trace Hermitian matrix".into(),
        ));
    }
    let lift = |m: CMat| if dim == 4 { extend_with_ancilla(&m) } else { m };

    let u = lift(build_total_unitary(scheme, x)?);
    let ud = u.adjoint();
    let rho_x = &(&u * probe) * &ud;
    let gens: Vec<CMat> = scheme_generators(scheme, x)?
        .iter()
        .map(|g| lift(g.to_matrix()))
        .collect();

    let mut slds = Vec::with_capacity(scheme.dim());
    let mut rotation_deviation = 0.0f64;
    for (l, h) in gens.iter().enumerate() {
        let du = lift(unitary_derivative(scheme, x, l, default_step(x[l]))?);
        let sld = (&du * &ud).scale_real(2.0);
        let rotated = &(&ud * &sld) * &u;
        rotation_deviation =
            rotation_deviation.max(rotated.max_abs_diff(&h.scale(Complex64::new(0.0, 2.0))));
        slds.push(sld);
    }

    let d = scheme.dim();
    let sld_residuals = DMatrix::from_fn(d, d, |a, b| {
        (&slds[a].commutator(&slds[b]) * &rho_x).trace()
    });
    let generator_residuals = DMatrix::from_fn(d, d, |a, b| {
        (&gens[a].commutator(&gens[b]) * probe).trace() * -4.0
    });
    let identity_deviation = sld_residuals
        .iter()
        .zip(generator_residuals.iter())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    Ok(SldOracle {
        slds,
        sld_residuals,
        generator_residuals,
        identity_deviation,
        rotation_deviation,
    })
}

/// Probe used by [`build_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeKind {
    /// Pure single-qubit probe with unit Bloch vector `r`.
    PureQubit(Vec3),
    /// `|Phi+>` with an ancilla on which the dynamics acts as identity.
    EntangledWithAncilla,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfimReport {
    pub qfim: DMatrix<f64>,
    pub qfi_max: Vec<f64>,
    /// `|Tr[[H_l, H_l'] rho_in]|`
    pub weak_comm_residuals: DMatrix<f64>,
    /// Standard-deviation lower bounds for a single repetition.
    pub precision_bounds: Vec<f64>,
    pub attainable: bool,
    pub probe_kind: ProbeKind,
    pub generators: Vec<GeneratorDecomposition>,
}

/// `1/sqrt(F_ll)` when `F` is diagonal, otherwise `sqrt((F^-1)_ll)`; a zero
/// or singular information matrix yields `+inf`.
pub fn precision_bounds(qfim: &DMatrix<f64>, tol: f64) -> Vec<f64> {
    let d = qfim.nrows();
    let scale = qfim.diagonal().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diagonal = (0..d).all(|a| (0..d).all(|b| a == b || qfim[(a, b)].abs() <= tol * scale));
    if diagonal {
        return qfim
            .diagonal()
            .iter()
            .map(|&f| {
                if f > 0.0 {
                    1.0 / f.sqrt()
                } else {
                    f64::INFINITY
                }
            })
            .collect();
    }
    let eig = qfim.clone().symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min <= tol * scale {
        return vec![f64::INFINITY; d];
    }
    match qfim.clone().try_inverse() {
        Some(inv) => inv.diagonal().iter().map(|&v| v.max(0.0).sqrt()).collect(),
        None => vec![f64::INFINITY; d],
    }
}

/// Assemble QFIM, maxima, residuals, bounds and the attainability verdict.
pub fn build_report(scheme: &SchemeConfig, x: &[f64], probe: ProbeKind) -> Result<QfimReport> {
    let tol = Tolerances::default();
    let d = scheme.dim();
    if d > 3 {
        return Err(QfimError::Dimensionality(d));
    }
    let gens = scheme_generators(scheme, x)?;
    let qfi_max: Vec<f64> = gens.iter().map(entangled_qfi).collect();

    let (qfim, residuals) = match probe {
        ProbeKind::PureQubit(r) => {
            let norm = r.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(QfimError::MixedProbe(norm));
            }
            let res = DMatrix::from_fn(d, d, |a, b| {
                weak_comm_residual(&gens[a], &gens[b], r).norm()
            });
            (qfim_pure(&gens, r), res)
        }
        ProbeKind::EntangledWithAncilla => {
            let psi = phi_plus();
            let mut res = DMatrix::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    res[(a, b)] = entangled_weak_comm(&gens[a], &gens[b], &psi)?.norm();
                }
            }
            (qfim_entangled(&gens), res)
        }
    };

    let residuals_vanish = residuals.iter().all(|&v| v <= tol.attainability);
    let maxima_reached = (0..d).all(|l| qfim[(l, l)] >= qfi_max[l] - tol.attainability);
    Ok(QfimReport {
        precision_bounds: precision_bounds(&qfim, tol.attainability),
        qfim,
        qfi_max,
        weak_comm_residuals: residuals,
        attainable: residuals_vanish && maxima_reached,
        probe_kind: probe,
        generators: gens,
    })
}
