//! Brute-force matrix references. Nothing here uses the closed forms; these
//! are what the closed forms are checked against.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::control::build_total_unitary;
use crate::error::{QfimError, Result};
use crate::generator::{default_step, SchemeConfig};
use crate::qfi::extend_with_ancilla;
use crate::su2::{CMat, Vec3};

/// `|psi><psi|`
pub fn projector(psi: &DVector<Complex64>) -> CMat {
    CMat::from_matrix(psi * psi.adjoint())
}

/// Pure qubit state with unit Bloch vector `r`.
pub fn bloch_ket(r: Vec3) -> Result<DVector<Complex64>> {
    let n = r.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(QfimError::MixedProbe(n));
    }
    let theta = r.z.clamp(-1.0, 1.0).acos();
    let phi = r.y.atan2(r.x);
    Ok(DVector::from_vec(vec![
        Complex64::new((0.5 * theta).cos(), 0.0),
        Complex64::from_polar((0.5 * theta).sin(), phi),
    ]))
}

/// `F_ab = 2 Re Tr(rho {H_a, H_b}) - 4 Tr(rho H_a) Tr(rho H_b)`, the
/// covariance form valid for pure `rho`.
pub fn trace_qfim(gens: &[CMat], rho: &CMat) -> DMatrix<f64> {
    let means: Vec<f64> = gens.iter().map(|h| (h * rho).trace().re).collect();
    let d = gens.len();
    DMatrix::from_fn(d, d, |a, b| {
        let anti = (&gens[a].anticommutator(&gens[b]) * rho).trace().re;
        2.0 * anti - 4.0 * means[a] * means[b]
    })
}

/// `Tr([A, B] rho)`
pub fn trace_weak_comm(a: &CMat, b: &CMat, rho: &CMat) -> Complex64 {
    (&a.commutator(b) * rho).trace()
}

/// `4 (<H^2> - <H>^2)` on a state vector.
pub fn generator_state_qfi(h: &CMat, psi: &DVector<Complex64>) -> f64 {
    let hp = h.apply(psi);
    let mean = psi.dotc(&hp).re;
    4.0 * (hp.norm_squared() - mean * mean)
}

/// `exp(-i tau H)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &CMat, tau: f64) -> CMat {
    let eig = h.as_matrix().clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -tau * l)),
    ));
    let v = &eig.eigenvectors;
    CMat::from_matrix(v * phases * v.adjoint())
}

/// General `exp(A)` by scaling and squaring with a Taylor core.
pub fn expm_taylor(a: &CMat) -> CMat {
    let norm = a.as_matrix().iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a.scale_real(scale);
    let dim = a.dim();
    let mut result = CMat::identity(dim);
    let mut term = CMat::identity(dim);
    for k in 1..=20 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Pure-state QFIM of `U_tot(x) |psi>` from fourth-order central
/// differences of the output state, `F_ab = 4 Re(<d_a psi|d_b psi> - <d_a psi|psi><psi|d_b psi>)`.
/// A 4-dimensional probe is evolved with `U_tot (x) I`.
pub fn fd_pure_state_qfim(
    scheme: &SchemeConfig,
    x: &[f64],
    probe: &DVector<Complex64>,
) -> Result<DMatrix<f64>> {
    let lift = |m: CMat| {
        if probe.len() == 4 {
            extend_with_ancilla(&m)
        } else {
            m
        }
    };
    if probe.len() != 2 && probe.len() != 4 {
        return Err(QfimError::InvalidScheme(format!(
            "probe must have 2 or 4 amplitudes, got {}",
            probe.len()
        )));
    }
    let out = lift(build_total_unitary(scheme, x)?).apply(probe);
    let mut derivs = Vec::with_capacity(scheme.dim());
    for l in 0..scheme.dim() {
        let h = default_step(x[l]);
        let state_at = |k: f64| -> Result<DVector<Complex64>> {
            let mut xs = x.to_vec();
            xs[l] += k * h;
            Ok(lift(build_total_unitary(scheme, &xs)?).apply(probe))
        };
        let (p1, m1, p2, m2) = (
            state_at(1.0)?,
            state_at(-1.0)?,
            state_at(2.0)?,
            state_at(-2.0)?,
        );
        let stencil = (p1 - m1) * Complex64::new(8.0, 0.0) - (p2 - m2);
        derivs.push(stencil * Complex64::new(1.0 / (12.0 * h), 0.0));
    }
    let d = scheme.dim();
    Ok(DMatrix::from_fn(d, d, |a, b| {
        let overlap = derivs[a].dotc(&derivs[b]);
        let pa = derivs[a].dotc(&out);
        let pb = out.dotc(&derivs[b]);
        4.0 * (overlap - pa * pb).re
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{su2_exp, Su2Basis};

    #[test]
    fn bloch_ket_round_trip() {
        let r = Vec3::new(0.48, -0.6, 0.64);
        let psi = bloch_ket(r).unwrap();
        let rho = projector(&psi);
        let back = Su2Basis::default().coefficients(&rho);
        assert!(back.max_abs_diff(r) < 1e-14);
        assert!(bloch_ket(r * 0.5).is_err());
    }

    #[test]
    fn expm_paths_agree_with_su2_exp() {
        let v = Vec3::new(0.3, -1.1, 2.0);
        let h = Su2Basis::default().element(v);
        let a = expm_hermitian(&h, 1.7);
        let b = expm_taylor(&h.scale(Complex64::new(0.0, -1.7)));
        let c = su2_exp(v, 1.7);
        assert!(a.max_abs_diff(&c) < 1e-13);
        assert!(b.max_abs_diff(&c) < 1e-12);
    }

    #[test]
    fn generator_qfi_matches_covariance() {
        let h = Su2Basis::default().element(Vec3::new(1.0, 2.0, -0.5));
        let psi = bloch_ket(Vec3::new(0.0, 0.6, 0.8)).unwrap();
        let a = generator_state_qfi(&h, &psi);
        let b = trace_qfim(&[h], &projector(&psi))[(0, 0)];
        assert!((a - b).abs() < 1e-13);
    }
}
