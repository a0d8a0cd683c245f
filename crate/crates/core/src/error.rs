//! Error taxonomy for the engine.
//!
//! Two families matter to callers: *input* errors (malformed specs, invalid
//! arguments) and *numerical-safety* rejections (well-formed inputs the engine
//! refuses because truncation or degeneracy would silently corrupt the
//! answer). [`Error::is_numerical_safety`] distinguishes them so front-ends
//! can map the families to distinct exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("amplitude grid must be square, got {rows}x{cols}")]
    NonSquareGrid { rows: usize, cols: usize },

    #[error("state has zero norm (all amplitudes zero)")]
    ZeroNorm,

    #[error("Fock occupation ({na},{nb}) exceeds cutoff {cutoff}")]
    OccupationAboveCutoff { na: usize, nb: usize, cutoff: usize },

    #[error("Jones vector is not unit: |ex|^2+|ey|^2 = {norm_sq}")]
    NonUnitJones { norm_sq: f64 },

    #[error("Poincare vector is not unit: |m| = {norm}")]
    NonUnitPoincare { norm: f64 },

    #[error("mode pair is not orthonormal: |eps* . eps_perp| = {overlap:.3e}")]
    NonOrthogonalModes { overlap: f64 },

    #[error("directions are not orthogonal: n . n_perp = {dot:.3e}")]
    NonOrthogonalDirections { dot: f64 },

    #[error("axes (j,k,l) must be a permutation of (S1,S2,S3)")]
    AxesNotPermutation,

    #[error(
        "truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.3e}; \
         a cutoff of at least {required_cutoff} is needed"
    )]
    LeakageExceeded {
        leakage: f64,
        tolerance: f64,
        required_cutoff: usize,
    },

    #[error(
        "state is flagged unsafe for 2nd-order moments \
         (leakage {leakage:.3e} > tolerance {tolerance:.3e}); refusing moment of order ({p},{q},{r},{s})"
    )]
    UnsafeMoment {
        leakage: f64,
        tolerance: f64,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
    },

    #[error(
        "mode transform would discard probability mass {mass:.3e} above the cutoff sectors \
         (tolerance {tolerance:.3e}); raise the cutoff"
    )]
    TransformOverflow { mass: f64, tolerance: f64 },

    #[error("Mandel Q undefined: mean photon number {n_mean:.3e} is indistinguishable from 0")]
    QUndefined { n_mean: f64 },

    #[error("Mandel Q must be >= -1, got {q}")]
    QOutOfRange { q: f64 },

    #[error("imaginary residue {imag:.3e} on a real-valued moment exceeds {tolerance:.1e}")]
    ImaginaryResidue { imag: f64, tolerance: f64 },

    #[error("ensemble weights must be nonnegative with a positive sum")]
    BadWeights,

    #[error("ensemble members must share cutoff and mode labels")]
    MixedEnsemble,

    #[error("probability table is degenerate (total mass {total:.3e})")]
    DegenerateTable { total: f64 },

    #[error("estimator requires at least 2 shots, got {shots}")]
    TooFewShots { shots: u64 },

    #[error("scan grid must be at least 2x2, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("state spec: {0}")]
    Spec(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for rejections made on numerical-safety grounds (truncation
    /// leakage, unsafe moments, degenerate statistics) as opposed to
    /// malformed input.
    pub fn is_numerical_safety(&self) -> bool {
        matches!(
            self,
            Error::LeakageExceeded { .. }
                | Error::UnsafeMoment { .. }
                | Error::TransformOverflow { .. }
                | Error::QUndefined { .. }
                | Error::ImaginaryResidue { .. }
                | Error::DegenerateTable { .. }
        )
    }
}
