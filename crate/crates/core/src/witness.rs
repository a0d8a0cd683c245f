//! Nonclassicality witnessing for mixtures of two-mode coherent states.
//!
//! Classical polarized light is modelled as a statistical mixture of
//! two-mode coherent states |α_i⟩|β_i⟩ with weights w_i. For such mixtures
//! the squeezing function obeys a classical-side chain
//!
//! 0 ≤ count-moment value ≤ witness value ≤ f(n),
//!
//! where the witness value Var_w(d) + Σ w_i (|α'_i| − |β'_i|)² (with
//! d_i = |α'_i|² − |β'_i|² in the measurement basis) and the count-moment
//! value Var_w(d) + (√⟨n₁⟩ − √⟨n₂⟩)² are closed forms in the component
//! amplitudes. The steps are Cauchy–Schwarz on (|α'|, |β'|) and the triangle
//! inequality on the transverse Stokes vectors; all three coincide when the
//! components share a common mode ray (in particular for every single
//! component). Consequently f(n) ≥ 0 for every classical mixture and every
//! direction: any observed f < 0 certifies a nonclassical state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ModePair, StateEnsemble, TwoModeFockState, DEFAULT_LEAKAGE_TOL};
use crate::measurement::{rotated_basis, squeezing_from_count_moments, CountMoments};
use crate::polarization::{angles_from_direction, jones_from_angles, PoincareDirection};
use crate::squeezing::SqueezingReport;
use crate::states::{coherent_cutoff, required_coherent_cutoff};
use crate::stokes::transfer_matrix;

/// One coherent component |α⟩|β⟩ of a classical mixture, expressed in the
/// mixture's basis pair.
#[derive(Clone, Copy, Debug)]
pub struct CoherentComponent {
    pub weight: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

/// Weighted mixture of two-mode coherent states.
#[derive(Clone, Debug)]
pub struct CoherentMixture {
    components: Vec<CoherentComponent>,
    basis: ModePair,
}

/// Wire format of one component: `{"w": 0.5, "alpha": [re, im], "beta": [re, im]}`.
#[derive(Serialize, Deserialize)]
struct ComponentWire {
    w: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
}

/// Wire format of the basis: the string `"xy"` or `{"theta0": r, "phi0": r}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BasisWire {
    Named(String),
    Angles { theta0: f64, phi0: f64 },
}

#[derive(Serialize, Deserialize)]
struct MixtureWire {
    components: Vec<ComponentWire>,
    basis: BasisWire,
}

impl CoherentMixture {
    /// Validate and normalize: weights nonnegative with a positive finite
    /// sum, at least one component.
    pub fn new(components: Vec<CoherentComponent>, basis: ModePair) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::BadWeights);
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if components.iter().any(|c| c.weight < 0.0) || total <= 0.0 || !total.is_finite() {
            return Err(Error::BadWeights);
        }
        let components = components
            .into_iter()
            .map(|c| CoherentComponent {
                weight: c.weight / total,
                ..c
            })
            .collect();
        Ok(Self { components, basis })
    }

    pub fn components(&self) -> &[CoherentComponent] {
        &self.components
    }

    pub fn basis(&self) -> &ModePair {
        &self.basis
    }

    /// Parse the JSON wire form:
    /// `{"components": [{"w", "alpha", "beta"}, …], "basis": "xy" | {"theta0", "phi0"}}`.
    pub fn from_json(json: &str) -> Result<Self> {
        let wire: MixtureWire = serde_json::from_str(json)?;
        let basis = match wire.basis {
            BasisWire::Named(name) if name == "xy" => ModePair::xy(),
            BasisWire::Named(name) => {
                return Err(Error::Spec(format!(
                    "unknown basis name {name:?}; use \"xy\" or {{\"theta0\", \"phi0\"}}"
                )))
            }
            BasisWire::Angles { theta0, phi0 } => {
                ModePair::from_primary(jones_from_angles(theta0, phi0))
            }
        };
        let components = wire
            .components
            .into_iter()
            .map(|c| CoherentComponent {
                weight: c.w,
                alpha: Complex64::new(c.alpha[0], c.alpha[1]),
                beta: Complex64::new(c.beta[0], c.beta[1]),
            })
            .collect();
        Self::new(components, basis)
    }

    /// Components re-expressed in the measurement basis whose primary mode
    /// points at n: coherent eigenvalues transform linearly under the
    /// transfer matrix.
    fn transformed(&self, n: &PoincareDirection) -> Vec<(f64, Complex64, Complex64)> {
        let (theta, phi) = angles_from_direction(n);
        let pair = rotated_basis(theta, phi);
        let t = transfer_matrix(&self.basis, &pair);
        self.components
            .iter()
            .map(|c| {
                (
                    c.weight,
                    t[0][0] * c.alpha + t[0][1] * c.beta,
                    t[1][0] * c.alpha + t[1][1] * c.beta,
                )
            })
            .collect()
    }
}

/// The witness value Var_w(d) + Σ w_i (|α'_i| − |β'_i|)² along n.
pub fn witness_value(mix: &CoherentMixture, n: &PoincareDirection) -> f64 {
    let parts = mix.transformed(n);
    let d_mean: f64 = parts
        .iter()
        .map(|(w, a, b)| w * (a.norm_sqr() - b.norm_sqr()))
        .sum();
    parts
        .iter()
        .map(|(w, a, b)| {
            let d = a.norm_sqr() - b.norm_sqr();
            w * ((d - d_mean).powi(2) + (a.norm() - b.norm()).powi(2))
        })
        .sum()
}

/// Exact photon-count moments of the mixture in the measurement basis at n
/// (per component the two counters are independent Poisson variables).
pub fn count_moments(mix: &CoherentMixture, n: &PoincareDirection) -> CountMoments {
    let mut m = CountMoments {
        mean1: 0.0,
        mean2: 0.0,
        second1: 0.0,
        second2: 0.0,
        cross: 0.0,
    };
    for (w, a, b) in mix.transformed(n) {
        let (l1, l2) = (a.norm_sqr(), b.norm_sqr());
        m.mean1 += w * l1;
        m.mean2 += w * l2;
        m.second1 += w * (l1 * l1 + l1);
        m.second2 += w * (l2 * l2 + l2);
        m.cross += w * l1 * l2;
    }
    m
}

/// The count-moment value Var_w(d) + (√⟨n₁⟩ − √⟨n₂⟩)² along n, evaluated
/// through the same functional the counting estimator uses.
pub fn count_moment_value(mix: &CoherentMixture, n: &PoincareDirection) -> f64 {
    squeezing_from_count_moments(&count_moments(mix, n))
}

/// The mixture as a Fock-grid ensemble in its own basis labels, for feeding
/// the full numerical pipeline. `cutoff` defaults to a Poisson-tail-safe
/// value for the largest component.
pub fn corresponding_ensemble(
    mix: &CoherentMixture,
    cutoff: Option<usize>,
) -> Result<StateEnsemble> {
    let lambda_max = mix
        .components
        .iter()
        .map(|c| c.alpha.norm_sqr() + c.beta.norm_sqr())
        .fold(0.0, f64::max);
    let cutoff = match cutoff {
        Some(c) => c,
        None => coherent_cutoff(lambda_max.sqrt()),
    };
    let members = mix
        .components
        .iter()
        .map(|c| {
            Ok((
                c.weight,
                two_mode_coherent(c.alpha, c.beta, cutoff, mix.basis)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let ens = StateEnsemble::new(members)?;
    if !ens.second_moment_safe() {
        return Err(Error::LeakageExceeded {
            leakage: ens.leakage(),
            tolerance: DEFAULT_LEAKAGE_TOL,
            required_cutoff: required_coherent_cutoff(lambda_max.sqrt(), DEFAULT_LEAKAGE_TOL)?,
        });
    }
    Ok(ens)
}

/// |α⟩|β⟩ on a truncated grid: outer product of two single-mode coherent
/// amplitude vectors.
fn two_mode_coherent(
    alpha: Complex64,
    beta: Complex64,
    cutoff: usize,
    labels: ModePair,
) -> Result<TwoModeFockState> {
    let col = |z: Complex64| {
        let mut v = vec![Complex64::ZERO; cutoff + 1];
        v[0] = Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..cutoff {
            v[n + 1] = v[n] * z / ((n + 1) as f64).sqrt();
        }
        v
    };
    let (u, v) = (col(alpha), col(beta));
    let mut amps = ndarray::Array2::zeros((cutoff + 1, cutoff + 1));
    for (na, ua) in u.iter().enumerate() {
        for (nb, vb) in v.iter().enumerate() {
            amps[(na, nb)] = ua * vb;
        }
    }
    TwoModeFockState::from_amplitudes(amps, labels)
}

/// Verdict aggregated over a scan: nonclassical iff any direction is
/// squeezed, with the most squeezed direction attached.
#[derive(Clone, Copy, Debug)]
pub struct NonclassicalityVerdict {
    pub nonclassical: bool,
    /// (θ, φ) of the most squeezed direction, present when `nonclassical`.
    pub direction: Option<(f64, f64)>,
    /// Smallest f found over the scan.
    pub min_f: f64,
}

/// Fold scan reports into a nonclassicality verdict.
pub fn nonclassicality_flag(reports: &[SqueezingReport]) -> NonclassicalityVerdict {
    let mut min_f = f64::INFINITY;
    let mut arg_min = None;
    let mut any = false;
    for rep in reports {
        if rep.f < min_f {
            min_f = rep.f;
            arg_min = Some((rep.theta, rep.phi));
        }
        any |= rep.flags.prakash_shukla;
    }
    NonclassicalityVerdict {
        nonclassical: any,
        direction: if any { arg_min } else { None },
        min_f,
    }
}
