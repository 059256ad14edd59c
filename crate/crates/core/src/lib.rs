//! Quantum Fisher information for sequential SU(2) parametrization schemes.
//!
//! A scheme applies `exp(-i t X(x) . J)` followed by a fixed control
//! `exp(-i t X_c . J)`, repeated `N` times. The crate computes the
//! per-parameter generators in closed form, the resulting QFI and QFI
//! matrices for qubit and ancilla-assisted probes, the weak-commutation
//! residuals that decide attainability, and checks every closed form against
//! explicit matrix computations in [`oracle`].

pub mod control;
pub mod error;
pub mod generator;
pub mod magnetometry;
pub mod oracle;
pub mod qfi;
pub mod su2;
pub mod tolerance;
pub mod verify;

pub use control::{
    build_total_unitary, characterize, composition_distance, design_control, effectiveness_profile,
    gap_profile, BenefitClass, ControlDesign, ControlKind, Effectiveness, GapRow,
};
pub use error::{QfimError, Result};
pub use generator::{
    closed_form_generator, controlled_generator, numeric_generator, series_generator,
    CoefficientMap, CompositionMode, DegenerateFlag, GeneratorDecomposition, LinearMap,
    SchemeConfig,
};
pub use qfi::{build_report, qfi_max, qfi_max_controlled, qfi_pure, ProbeKind, QfimReport};
pub use su2::{BlochState, CMat, Su2Basis, Vec3};
pub use tolerance::Tolerances;
