//! State factory: JSON-specified constructors for polarized light states and
//! adversarial non-polarized ones, plus the polarized-state verifier.
//!
//! A *polarized* state carries all its photons in one mode ε: the orthogonal
//! mode is vacuum, â_ε⊥|ψ⟩ = 0. The factory builds such states directly in
//! the (ε, ε⊥) labels, so the property holds by construction; two-mode custom
//! specs deliberately escape that class for testing.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    apply_annihilation, grid_norm, Mode, ModePair, StateEnsemble, TwoModeFockState,
    DEFAULT_LEAKAGE_TOL,
};
use crate::polarization::{jones_from_angles, PolarizationVector};
use crate::stokes::mode_transform;

/// Residual threshold below which an ensemble counts as polarized.
pub const POLARIZED_TOL: f64 = 1e-10;

/// Versioned, JSON-serializable description of a state to build.
///
/// Wire shape:
/// ```json
/// {
///   "schema": 1,
///   "kind": "fock" | "coherent" | "qubit01" | "custom-single-mode"
///         | "two-mode-custom" | "mixture",
///   "params": { ... kind-specific ... },
///   "polarization": {"theta0": 0.0, "phi0": 0.0},
///   "cutoff": 24
/// }
/// ```
/// Complex numbers are `[re, im]` pairs; `cutoff` is optional. Unknown
/// fields are tolerated (the flattened `kind`/`params` pair rules out
/// `deny_unknown_fields`); the `schema` gate is the compatibility check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateSpec {
    pub schema: u32,
    #[serde(flatten)]
    pub kind: StateKind,
    pub polarization: PolarizationAngles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

/// Sphere angles (θ₀, Φ₀) selecting the polarization mode ε.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolarizationAngles {
    pub theta0: f64,
    pub phi0: f64,
}

/// Complex number on the wire: `[re, im]`.
pub type ComplexParam = [f64; 2];

fn to_c(z: ComplexParam) -> Complex64 {
    Complex64::new(z[0], z[1])
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum StateKind {
    /// Photon-number state |n⟩ in the mode ε.
    Fock { n: usize },
    /// Coherent state |α⟩ in the mode ε (truncated Fock expansion).
    Coherent { alpha: ComplexParam },
    /// c₀|0⟩ + c₁|1⟩ in the mode ε; the tunable-Q family with Q = −|c₁|².
    Qubit01 { c0: ComplexParam, c1: ComplexParam },
    /// Arbitrary single-mode amplitudes, index = photon number in ε.
    CustomSingleMode { amplitudes: Vec<ComplexParam> },
    /// Arbitrary two-mode amplitudes as [n_a, n_b, re, im] entries —
    /// generally *not* polarized.
    TwoModeCustom { amplitudes: Vec<TwoModeAmplitude> },
    /// Finite mixture of the above (mixtures of mixtures are rejected).
    Mixture { components: Vec<MixtureComponent> },
}

/// One sparse two-mode amplitude: (n_a, n_b, re, im).
pub type TwoModeAmplitude = (usize, usize, f64, f64);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    #[serde(flatten)]
    pub kind: StateKind,
}

/// Parse a StateSpec, enforcing schema version 1.
pub fn parse_spec(json: &str) -> Result<StateSpec> {
    let spec: StateSpec = serde_json::from_str(json)?;
    if spec.schema != 1 {
        return Err(Error::Spec(format!(
            "unsupported schema version {} (expected 1)",
            spec.schema
        )));
    }
    Ok(spec)
}

/// Build the ensemble described by a spec with the default leakage tolerance.
pub fn build(spec: &StateSpec) -> Result<StateEnsemble> {
    build_with_tol(spec, DEFAULT_LEAKAGE_TOL)
}

/// Build with an explicit leakage tolerance (threaded into every member).
pub fn build_with_tol(spec: &StateSpec, leakage_tol: f64) -> Result<StateEnsemble> {
    let eps = jones_from_angles(spec.polarization.theta0, spec.polarization.phi0);
    let pair = ModePair::from_primary(eps);
    let cutoff = match spec.cutoff {
        Some(c) => c,
        None => default_cutoff(&spec.kind)?,
    };

    let members: Vec<(f64, StateKind)> = match &spec.kind {
        StateKind::Mixture { components } => {
            if components.is_empty() {
                return Err(Error::Spec("mixture has no components".into()));
            }
            components
                .iter()
                .map(|c| {
                    if matches!(c.kind, StateKind::Mixture { .. }) {
                        Err(Error::Spec("nested mixtures are not supported".into()))
                    } else {
                        Ok((c.weight, c.kind.clone()))
                    }
                })
                .collect::<Result<_>>()?
        }
        other => vec![(1.0, other.clone())],
    };

    let mut built = Vec::with_capacity(members.len());
    for (w, kind) in members {
        built.push((w, build_pure(&kind, cutoff, pair, leakage_tol)?));
    }
    StateEnsemble::new(built)
}

/// Default cutoff policy: coherent states get
/// max(20, ⌈|α|² + 8|α| + 10⌉); finite-support kinds get their maximal total
/// occupation + 4, which keeps the whole state strictly below the leakage
/// band at negligible cost. Mixtures take the maximum over components.
pub fn default_cutoff(kind: &StateKind) -> Result<usize> {
    Ok(match kind {
        StateKind::Fock { n } => n + 4,
        StateKind::Coherent { alpha } => coherent_cutoff(to_c(*alpha).norm()),
        StateKind::Qubit01 { .. } => 5,
        StateKind::CustomSingleMode { amplitudes } => amplitudes.len().saturating_sub(1) + 4,
        StateKind::TwoModeCustom { amplitudes } => {
            amplitudes
                .iter()
                .map(|(na, nb, _, _)| na + nb)
                .max()
                .unwrap_or(0)
                + 4
        }
        StateKind::Mixture { components } => {
            let mut c = 0;
            for comp in components {
                c = c.max(default_cutoff(&comp.kind)?);
            }
            c
        }
    })
}

/// Default coherent-state cutoff for a given |α|.
pub fn coherent_cutoff(alpha_abs: f64) -> usize {
    let guess = alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0;
    (guess.ceil() as usize).max(20)
}

/// Smallest cutoff for which a coherent state of mean photon number λ keeps
/// the Poisson tail above cutoff−4 at or below `tol`.
pub fn required_coherent_cutoff(alpha_abs: f64, tol: f64) -> Result<usize> {
    let lambda = alpha_abs * alpha_abs;
    if lambda > 500.0 {
        return Err(Error::Spec(format!(
            "coherent amplitude |alpha| = {alpha_abs} is too large for the Fock representation"
        )));
    }
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    let mut k = 0usize;
    // Tail P(N > k) = 1 − cdf ≤ tol.
    while 1.0 - cdf > tol && k < 4096 {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
    }
    Ok(k + 4)
}

fn build_pure(
    kind: &StateKind,
    cutoff: usize,
    pair: ModePair,
    leakage_tol: f64,
) -> Result<TwoModeFockState> {
    let dim = cutoff + 1;
    let mut amps: Array2<Complex64> = Array2::zeros((dim, dim));
    match kind {
        StateKind::Fock { n } => {
            if *n > cutoff {
                return Err(Error::OccupationAboveCutoff {
                    na: *n,
                    nb: 0,
                    cutoff,
                });
            }
            amps[(*n, 0)] = Complex64::ONE;
        }
        StateKind::Coherent { alpha } => {
            let alpha = to_c(*alpha);
            let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            amps[(0, 0)] = c;
            for n in 1..=cutoff {
                c *= alpha / (n as f64).sqrt();
                amps[(n, 0)] = c;
            }
        }
        StateKind::Qubit01 { c0, c1 } => {
            if cutoff < 1 {
                return Err(Error::Spec("qubit01 needs cutoff >= 1".into()));
            }
            amps[(0, 0)] = to_c(*c0);
            amps[(1, 0)] = to_c(*c1);
        }
        StateKind::CustomSingleMode { amplitudes } => {
            if amplitudes.len() > dim {
                return Err(Error::Spec(format!(
                    "custom-single-mode has {} amplitudes but cutoff {} allows {}",
                    amplitudes.len(),
                    cutoff,
                    dim
                )));
            }
            for (n, z) in amplitudes.iter().enumerate() {
                amps[(n, 0)] = to_c(*z);
            }
        }
        StateKind::TwoModeCustom { amplitudes } => {
            for (na, nb, re, im) in amplitudes {
                if *na > cutoff || *nb > cutoff {
                    return Err(Error::OccupationAboveCutoff {
                        na: *na,
                        nb: *nb,
                        cutoff,
                    });
                }
                amps[(*na, *nb)] += Complex64::new(*re, *im);
            }
        }
        StateKind::Mixture { .. } => {
            return Err(Error::Spec("nested mixtures are not supported".into()))
        }
    }

    let state = TwoModeFockState::from_amplitudes_with_tol(amps, pair, leakage_tol)?;
    if !state.second_moment_safe() {
        // For coherent states the cure is a known cutoff; report it.
        if let StateKind::Coherent { alpha } = kind {
            let required = required_coherent_cutoff(to_c(*alpha).norm(), leakage_tol)?;
            return Err(Error::LeakageExceeded {
                leakage: state.leakage(),
                tolerance: leakage_tol,
                required_cutoff: required,
            });
        }
    }
    Ok(state)
}

/// Max over members of ‖â_ε⊥|ψ⟩‖: zero exactly when every member is
/// polarized in ε. Members are re-expressed in (ε, ε⊥) first, so any
/// labelling is accepted.
pub fn verify_polarized(ens: &StateEnsemble, eps: &PolarizationVector) -> Result<f64> {
    let mut worst = 0.0_f64;
    for m in ens.members() {
        let in_eps = mode_transform(&m.state, eps)?;
        let lowered = apply_annihilation(&in_eps, Mode::B);
        worst = worst.max(grid_norm(&lowered));
    }
    Ok(worst)
}

/// Convenience wrapper: polarized iff the residual is at most
/// [`POLARIZED_TOL`].
pub fn is_polarized(ens: &StateEnsemble, eps: &PolarizationVector) -> Result<bool> {
    Ok(verify_polarized(ens, eps)? <= POLARIZED_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn spec(kind: StateKind, theta0: f64, phi0: f64) -> StateSpec {
        StateSpec {
            schema: 1,
            kind,
            polarization: PolarizationAngles { theta0, phi0 },
            cutoff: None,
        }
    }

    #[test]
    fn fock_build_has_expected_occupations() {
        let ens = build(&spec(StateKind::Fock { n: 5 }, PI / 3.0, PI / 4.0)).unwrap();
        // In its own labels the ε mode holds 5 photons, ε⊥ vacuum.
        let n_eps = ens.moment(1, 1, 0, 0).unwrap();
        let n_perp = ens.moment(0, 0, 1, 1).unwrap();
        assert_abs_diff_eq!(n_eps.re, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n_perp.re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit01_build_moments() {
        let ens = build(&spec(
            StateKind::Qubit01 {
                c0: [0.4_f64.sqrt(), 0.0],
                c1: [0.6_f64.sqrt(), 0.0],
            },
            0.3,
            0.9,
        ))
        .unwrap();
        assert_abs_diff_eq!(ens.moment(1, 1, 0, 0).unwrap().re, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.moment(2, 2, 0, 0).unwrap().re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let ens = build(&spec(StateKind::Coherent { alpha: [0.0, 0.0] }, 0.0, 0.0)).unwrap();
        let st = &ens.members()[0].state;
        assert_abs_diff_eq!(st.amplitude(0, 0).norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ens.moment(1, 1, 0, 0).unwrap().re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_small_cutoff_rejected_with_hint() {
        let mut s = spec(StateKind::Coherent { alpha: [3.0, 0.0] }, 0.0, 0.0);
        s.cutoff = Some(10);
        let err = build(&s).unwrap_err();
        match err {
            Error::LeakageExceeded {
                required_cutoff, ..
            } => {
                // Poisson(9) needs far more than 10 levels.
                assert!(required_cutoff > 20, "hint {required_cutoff}");
                // And the hint is sufficient.
                s.cutoff = Some(required_cutoff);
                assert!(build(&s).is_ok());
            }
            other => panic!("expected leakage error, got {other:?}"),
        }
    }

    #[test]
    fn polarized_kinds_verify_as_polarized() {
        for kind in [
            StateKind::Fock { n: 3 },
            StateKind::Coherent { alpha: [1.2, 0.5] },
            StateKind::Qubit01 {
                c0: [0.6, 0.0],
                c1: [0.0, 0.8],
            },
        ] {
            let s = spec(kind, 1.0, 2.0);
            let ens = build(&s).unwrap();
            let eps = jones_from_angles(1.0, 2.0);
            let residual = verify_polarized(&ens, &eps).unwrap();
            assert!(residual <= 1e-12, "residual {residual}");
            assert!(is_polarized(&ens, &eps).unwrap());
        }
    }

    #[test]
    fn two_mode_custom_is_not_polarized() {
        // |1,1⟩ has residual ‖â_ε⊥|1,1⟩‖ = 1.
        let s = spec(
            StateKind::TwoModeCustom {
                amplitudes: vec![(1, 1, 1.0, 0.0)],
            },
            0.0,
            0.0,
        );
        let ens = build(&s).unwrap();
        let residual = verify_polarized(&ens, &PolarizationVector::x_linear()).unwrap();
        assert_abs_diff_eq!(residual, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cross_polarized_mixture_is_not_polarized() {
        // 50/50 mixture of |1_ε⟩ and |1_ε⊥⟩: the second member fails.
        let s = StateSpec {
            schema: 1,
            kind: StateKind::Mixture {
                components: vec![
                    MixtureComponent {
                        weight: 0.5,
                        kind: StateKind::Fock { n: 1 },
                    },
                    MixtureComponent {
                        weight: 0.5,
                        kind: StateKind::TwoModeCustom {
                            amplitudes: vec![(0, 1, 1.0, 0.0)],
                        },
                    },
                ],
            },
            polarization: PolarizationAngles {
                theta0: 0.7,
                phi0: 1.3,
            },
            cutoff: Some(6),
        };
        let ens = build(&s).unwrap();
        let eps = jones_from_angles(0.7, 1.3);
        let residual = verify_polarized(&ens, &eps).unwrap();
        assert_abs_diff_eq!(residual, 1.0, epsilon = 1e-12);
        assert!(!is_polarized(&ens, &eps).unwrap());
    }

    #[test]
    fn all_zero_amplitudes_rejected() {
        let s = spec(
            StateKind::CustomSingleMode {
                amplitudes: vec![[0.0, 0.0], [0.0, 0.0]],
            },
            0.0,
            0.0,
        );
        assert!(matches!(build(&s), Err(Error::ZeroNorm)));
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{
            "schema": 1,
            "kind": "coherent",
            "params": {"alpha": [1.5, -0.25]},
            "polarization": {"theta0": 1.0471975511965976, "phi0": 0.7853981633974483},
            "cutoff": 32
        }"#;
        let spec = parse_spec(json).unwrap();
        assert_eq!(spec.cutoff, Some(32));
        assert!(matches!(spec.kind, StateKind::Coherent { .. }));
        let out = serde_json::to_string(&spec).unwrap();
        let reparsed = parse_spec(&out).unwrap();
        assert_eq!(spec, reparsed);
    }

    #[test]
    fn mixture_spec_round_trip_and_kind_names() {
        let json = r#"{
            "schema": 1,
            "kind": "mixture",
            "params": {"components": [
                {"weight": 0.5, "kind": "fock", "params": {"n": 1}},
                {"weight": 0.5, "kind": "qubit01", "params": {"c0": [0.6, 0.0], "c1": [0.8, 0.0]}}
            ]},
            "polarization": {"theta0": 0.0, "phi0": 0.0}
        }"#;
        let spec = parse_spec(json).unwrap();
        let ens = build(&spec).unwrap();
        assert_eq!(ens.members().len(), 2);
        // Round trip keeps the kebab-case tags.
        let out = serde_json::to_string(&spec).unwrap();
        assert!(out.contains("\"kind\":\"mixture\""));
        assert!(out.contains("\"kind\":\"fock\""));
        assert!(out.contains("\"kind\":\"qubit01\""));
        assert_eq!(parse_spec(&out).unwrap(), spec);
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let json = r#"{"schema": 2, "kind": "fock", "params": {"n": 1},
                       "polarization": {"theta0": 0.0, "phi0": 0.0}}"#;
        assert!(matches!(parse_spec(json), Err(Error::Spec(_))));
    }

    #[test]
    fn polarized_mean_stokes_is_m_times_s0() {
        // ⟨Ŝ_j⟩ = m_j ⟨Ŝ₀⟩ for polarized builds.
        use crate::polarization::poincare_from_jones;
        use crate::stokes::stokes_moments;
        let s = spec(StateKind::Fock { n: 2 }, 2.2, 5.1);
        let ens = build(&s).unwrap();
        let mom = stokes_moments(&ens).unwrap();
        let m = poincare_from_jones(&jones_from_angles(2.2, 5.1)).components();
        for (&s_j, &m_j) in mom.s.iter().zip(&m) {
            assert_abs_diff_eq!(s_j, m_j * mom.s0, epsilon = 1e-10);
        }
    }
}
