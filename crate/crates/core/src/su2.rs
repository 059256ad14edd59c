//! Real 3-vectors, the su(2) generator basis, Bloch states and exact 2x2
//! unitary exponentials.
//!
//! The shipped representation is `J = sigma / 2` (Pauli order x, y, z), so the
//! largest generator eigenvalue is `c = 1/2`. `Su2Basis` is a value so tests
//! can inject a unitarily rotated representation.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QfimError, Result};
use crate::tolerance::Tolerances;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Real 3-vector holding coefficient vectors, their partials and Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        cross(self, other)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    /// Unit vector along `self`.
    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QfimError::DegenerateVector);
        }
        Ok(self * (1.0 / n))
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Vec3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

/// Right-handed cross product.
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    Vec3::new(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )
}

/// `z x (z x ( ... x w))` with `n` applications, capped at the default depth.
pub fn nested_cross(z: Vec3, w: Vec3, n: usize) -> Result<Vec3> {
    nested_cross_capped(z, w, n, Tolerances::default().series_max_terms)
}

pub fn nested_cross_capped(z: Vec3, w: Vec3, n: usize, cap: usize) -> Result<Vec3> {
    if n > cap {
        return Err(QfimError::SeriesDepth { requested: n, cap });
    }
    Ok((0..n).fold(w, |acc, _| cross(z, acc)))
}

/// Cosine of the angle between two nonzero vectors, clamped to `[-1, 1]`.
pub fn cos_between(a: Vec3, b: Vec3) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(QfimError::DegenerateVector);
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(a: Vec3, b: Vec3) -> Result<f64> {
    if a.is_zero() || b.is_zero() {
        return Err(QfimError::DegenerateVector);
    }
    Ok(a.cross(b).norm().atan2(a.dot(b)))
}

/// Dense complex square matrix (dimension 2 or 4 in practice).
#[derive(Debug, Clone, PartialEq)]
pub struct CMat(DMatrix<Complex64>);

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Build from row-major entries. Panics if `entries.len() != dim * dim`.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "expected {} entries", dim * dim);
        Self(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        assert!(m.is_square(), "CMat must be square");
        Self(m)
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &CMat) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `{self, other}`
    pub fn anticommutator(&self, other: &CMat) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// `self (x) other`
    pub fn kron(&self, other: &CMat) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `(A + A^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * re(0.5))
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self * &self.adjoint()).max_abs_diff(&CMat::identity(self.dim())) <= tol
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.0
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CMat::identity(self.dim());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }
}

impl Mul<&CMat> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        CMat(&self.0 * &rhs.0)
    }
}

impl Add<&CMat> for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        CMat(&self.0 + &rhs.0)
    }
}

impl Sub<&CMat> for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        CMat(&self.0 - &rhs.0)
    }
}

/// Pauli matrix `sigma_k` for `k` in `0..3`.
pub fn pauli(k: usize) -> CMat {
    let (o, z) = (re(1.0), re(0.0));
    match k {
        0 => CMat::from_rows(2, &[z, o, o, z]),
        1 => CMat::from_rows(2, &[z, -I, I, z]),
        2 => CMat::from_rows(2, &[o, z, z, -o]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// A 2-dimensional representation `(j1, j2, j3)` of su(2) with
/// `[j_m, j_k] = i eps_mkl j_l` and generator eigenvalues `+-c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Basis {
    pub j: [CMat; 3],
    pub c: f64,
}

impl Su2Basis {
    /// `J = sigma / 2`.
    pub fn pauli_half() -> Self {
        Self {
            j: [0, 1, 2].map(|k| pauli(k).scale_real(0.5)),
            c: 0.5,
        }
    }

    /// Conjugate every generator by a unitary, `j_k -> W j_k W^dagger`.
    pub fn rotated(&self, w: &CMat) -> Self {
        let wd = w.adjoint();
        Self {
            j: self.j.clone().map(|jk| &(w * &jk) * &wd),
            c: self.c,
        }
    }

    /// `v . J`
    pub fn element(&self, v: Vec3) -> CMat {
        let [a, b, c] = v.to_array();
        &(&self.j[0].scale_real(a) + &self.j[1].scale_real(b)) + &self.j[2].scale_real(c)
    }

    /// Coefficients of a traceless matrix in this basis, `v` with `h = v . J`.
    pub fn coefficients(&self, h: &CMat) -> Vec3 {
        let comp = |k: usize| {
            let jk = &self.j[k];
            (h * jk).trace().re / (jk * jk).trace().re
        };
        Vec3::new(comp(0), comp(1), comp(2))
    }
}

impl Default for Su2Basis {
    fn default() -> Self {
        Self::pauli_half()
    }
}

/// `v1 j1 + v2 j2 + v3 j3`
pub fn su2_element(v: Vec3, basis: &Su2Basis) -> CMat {
    basis.element(v)
}

/// Exact `exp(-i tau (v . J))` for `J = sigma / 2`:
/// `cos(tau|v|/2) I - i sin(tau|v|/2) (v_hat . sigma)`.
pub fn su2_exp(v: Vec3, tau: f64) -> CMat {
    let n = v.norm();
    if n == 0.0 || tau == 0.0 {
        return CMat::identity(2);
    }
    let half = 0.5 * tau * n;
    let (s, c) = half.sin_cos();
    let u = v * (1.0 / n);
    CMat::from_rows(
        2,
        &[
            Complex64::new(c, -s * u.z),
            Complex64::new(-s * u.y, -s * u.x),
            Complex64::new(s * u.y, -s * u.x),
            Complex64::new(c, s * u.z),
        ],
    )
}

/// Qubit state in Bloch form, `rho = I/2 + r . J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    r: Vec3,
}

impl BlochState {
    pub fn new(r: Vec3) -> Result<Self> {
        let norm = r.norm();
        if norm.is_nan() || norm > 1.0 + Tolerances::default().bloch_norm {
            return Err(QfimError::UnphysicalState { norm });
        }
        Ok(Self { r })
    }

    pub fn maximally_mixed() -> Self {
        Self { r: Vec3::ZERO }
    }

    pub fn r(&self) -> Vec3 {
        self.r
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.r.norm() - 1.0).abs() <= tol
    }

    /// `Tr[rho^2] = (1 + |r|^2) / 2`
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.r.norm_squared())
    }

    pub fn density(&self, basis: &Su2Basis) -> CMat {
        &CMat::identity(2).scale_real(0.5) + &basis.element(self.r)
    }
}

/// Density matrix of a Bloch state in the given basis.
pub fn density(state: &BlochState, basis: &Su2Basis) -> CMat {
    state.density(basis)
}
