//! Numerical engine for polarization squeezing of polarized light.
//!
//! The engine studies quantum states of a two-mode optical field through
//! their Stokes operators Ŝ₀…Ŝ₃ on a truncated two-mode Fock grid. Its core
//! question: along which Poincaré-sphere directions n does the Stokes
//! variance V_n drop below the transverse-mean bound
//! √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²) — the squeezing condition f(n) < 0 that no classical
//! mixture of coherent states can reach?
//!
//! The pieces:
//!
//! - [`polarization`]: Jones vectors, Poincaré vectors, and the maps between
//!   them.
//! - [`fock`]: the truncated two-mode amplitude grid, normally ordered
//!   ladder moments, and leakage accounting that refuses silently corrupted
//!   second moments.
//! - [`stokes`]: passive mode transforms (polarization basis changes) and
//!   the first/second Stokes moments of a state or ensemble.
//! - [`states`]: a JSON-serializable state-description format and builders
//!   for the standard families (Fock, coherent, 0–1 qubit, custom,
//!   mixtures), each prepared in an arbitrary polarization mode.
//! - [`squeezing`]: the squeezing function f, four operational squeezing
//!   criteria, Mandel's Q, the analytic criterion for polarized light, the
//!   squeezing cone, and direction-grid scans.
//! - [`measurement`]: the two-counter detection model behind a rotatable
//!   polarizing beam splitter, seeded count sampling, and the count-moment
//!   estimator of f with delta-method or bootstrap error bars.
//! - [`witness`]: closed-form classical bounds for mixtures of coherent
//!   states and the nonclassicality verdict derived from a scan.
//! - [`dense`]: small dense-matrix realizations of all operators, used as an
//!   independent cross-check of the ladder algebra (and by the test suites
//!   as an oracle).
//!
//! Numerical contract: states are held at unit norm (1e−12); probability
//! mass in the top grid band (total occupation within 4 of the cutoff)
//! beyond 1e−10 marks a state unsafe for second-order moments, and every
//! operation that would consume such moments refuses with a
//! [`error::Error`] classified as a numerical-safety rejection rather than
//! returning a plausible-looking wrong number.

pub mod dense;
pub mod error;
pub mod fock;
pub mod measurement;
pub mod polarization;
pub mod squeezing;
pub mod states;
pub mod stokes;
pub mod witness;

pub use error::{Error, Result};
pub use fock::{ModePair, StateEnsemble, TwoModeFockState, DEFAULT_LEAKAGE_TOL};
pub use measurement::{
    estimate_squeezing, joint_distribution, rotated_basis, sample_counts, CountMoments,
    CountRecord, EstimatorResult, JointDistribution,
};
pub use polarization::{
    direction_from_angles, jones_from_angles, poincare_from_jones, PoincareDirection,
    PoincareVector, PolarizationVector,
};
pub use squeezing::{
    analytic_polarized_criterion, mandel_q, scan, squeezing_cone, squeezing_function,
    ConeDescriptor, ScanGrid, SqueezingReport,
};
pub use states::{build, parse_spec, StateKind, StateSpec};
pub use stokes::{mode_transform, stokes_moments, StokesMoments};
pub use witness::{
    corresponding_ensemble, count_moment_value, nonclassicality_flag, witness_value,
    CoherentMixture, NonclassicalityVerdict,
};
