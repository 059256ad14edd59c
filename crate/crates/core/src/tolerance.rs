//! Numerical thresholds shared by every module.
//!
//! The defaults are the values the crate is validated against. Callers that
//! want looser exploratory runs or a stricter CI gate construct their own
//! record and pass it to the `*_with` entry points.

/// Thresholds and caps used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity check, elementwise.
    pub hermitian: f64,
    /// Unitarity check `M M^dagger = I`, elementwise.
    pub unitary: f64,
    /// Slack on `|r| <= 1` before a Bloch vector is rejected.
    pub bloch_norm: f64,
    /// `|X|` below this switches the closed-form generator to the zero-field limit.
    pub zero_field: f64,
    /// `sin(alpha)` below this switches the closed-form generator to the colinear limit.
    pub colinear_sin: f64,
    /// Maximum number of nested cross products / series terms.
    pub series_max_terms: usize,
    /// Admissible finite-difference step range.
    pub fd_step_min: f64,
    pub fd_step_max: f64,
    /// Relative agreement required between analytic partials and central differences.
    pub partials_rel: f64,
    /// Residual and QFI-gap threshold for the attainability verdict.
    pub attainability: f64,
    /// Slack on `<psi|psi> = 1` for explicit probe vectors.
    pub normalization: f64,
    /// Angle window for the no-benefit / max-benefit classes.
    pub angle_class: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            unitary: 1e-10,
            bloch_norm: 1e-12,
            zero_field: 1e-12,
            colinear_sin: 1e-12,
            series_max_terms: 64,
            fd_step_min: 1e-12,
            fd_step_max: 1e-2,
            partials_rel: 1e-6,
            attainability: 1e-10,
            normalization: 1e-10,
            angle_class: 1e-9,
        }
    }
}
