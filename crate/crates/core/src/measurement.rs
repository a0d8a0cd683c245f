//! Photon-counting simulation behind a rotatable polarizing beam splitter,
//! the count-moment estimator of the squeezing function, and the operator
//! identity Ŝ_n = N̂_ε̄ − N̂_ε̄⊥ underlying the detection scheme.
//!
//! The measurement model: a basis (ε̄, ε̄⊥) whose primary mode has Poincaré
//! image n is detected by two photon counters. Per shot the pair (n₁, n₂) is
//! drawn from the joint distribution p(n₁, n₂) = Σᵢ wᵢ |⟨n₁, n₂|ψᵢ⟩|² written
//! in that basis. Since Ŝ_n = N̂_ε̄ − N̂_ε̄⊥ exactly, the count moments give
//! ⟨Ŝ_n⟩ and V_n directly, and for polarized light the transverse bound
//! equals 2√(⟨N̂_ε̄⟩⟨N̂_ε̄⊥⟩), so the squeezing function has an estimator built
//! purely from the five moments (⟨n₁⟩, ⟨n₂⟩, ⟨n₁²⟩, ⟨n₂²⟩, ⟨n₁n₂⟩).

use ndarray::Array2;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::fock::{ModePair, StateEnsemble};
use crate::polarization::{jones_from_angles, poincare_from_jones, PolarizationVector};
use crate::states::{verify_polarized, POLARIZED_TOL};
use crate::stokes::{mode_transform_to_pair, stokes_along, stokes_moments};

/// Salt XORed into the record seed for the bootstrap stream, so bootstrap
/// resampling never replays the count stream.
const BOOTSTRAP_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Bootstrap resample count.
const BOOTSTRAP_RESAMPLES: usize = 200;

/// Mean sample counts at or below this many expected events switch the error
/// bar from the delta method to a bootstrap (the delta gradient has √(m₂/m₁)
/// factors that blow up near empty detectors).
const SPARSE_EVENTS: f64 = 10.0;

/// Measurement basis whose primary mode has Poincaré image
/// (cos θ, sin θ cos φ, sin θ sin φ).
pub fn rotated_basis(theta: f64, phi: f64) -> ModePair {
    ModePair::from_primary(jones_from_angles(theta, phi))
}

/// The five photon-count moments the estimator consumes.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CountMoments {
    pub mean1: f64,
    pub mean2: f64,
    pub second1: f64,
    pub second2: f64,
    pub cross: f64,
}

/// Joint photon-count distribution p(n₁, n₂) on the (cutoff+1)² grid.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    probs: Array2<f64>,
}

impl JointDistribution {
    /// Validate a probability table: square, entries ≥ 0 up to float dust,
    /// total mass 1 within 1e−10.
    pub fn new(mut probs: Array2<f64>) -> Result<Self> {
        let (rows, cols) = probs.dim();
        if rows != cols {
            return Err(Error::NonSquareGrid { rows, cols });
        }
        for p in probs.iter_mut() {
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(Error::DegenerateTable { total: *p });
                }
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > 1e-10 {
            return Err(Error::DegenerateTable { total });
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn prob(&self, n1: usize, n2: usize) -> f64 {
        self.probs[(n1, n2)]
    }

    /// Exact moments of the table.
    pub fn moments(&self) -> CountMoments {
        let mut m = CountMoments {
            mean1: 0.0,
            mean2: 0.0,
            second1: 0.0,
            second2: 0.0,
            cross: 0.0,
        };
        for ((n1, n2), &p) in self.probs.indexed_iter() {
            let (x1, x2) = (n1 as f64, n2 as f64);
            m.mean1 += p * x1;
            m.mean2 += p * x2;
            m.second1 += p * x1 * x1;
            m.second2 += p * x2 * x2;
            m.cross += p * x1 * x2;
        }
        m
    }
}

/// Joint count distribution of an ensemble measured in the given basis.
pub fn joint_distribution(ens: &StateEnsemble, basis: &ModePair) -> Result<JointDistribution> {
    let side = ens.cutoff() + 1;
    let mut probs = Array2::<f64>::zeros((side, side));
    for member in ens.members() {
        let rotated = mode_transform_to_pair(&member.state, basis)?;
        for (idx, amp) in rotated.amplitudes().indexed_iter() {
            probs[idx] += member.weight * amp.norm_sqr();
        }
    }
    JointDistribution::new(probs)
}

/// A finite run of photon-count pairs plus the seed that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountRecord {
    pub shots: u64,
    pub samples: Vec<(u32, u32)>,
    pub seed: u64,
}

/// Draw `shots` count pairs from the table with a seeded deterministic RNG.
pub fn sample_counts(dist: &JointDistribution, shots: u64, seed: u64) -> Result<CountRecord> {
    if shots < 2 {
        return Err(Error::TooFewShots { shots });
    }
    let flat: Vec<f64> = dist.probs().iter().copied().collect();
    let table = WeightedIndex::new(&flat).map_err(|_| Error::DegenerateTable {
        total: flat.iter().sum(),
    })?;
    let side = dist.probs().dim().1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..shots)
        .map(|_| {
            let k = table.sample(&mut rng);
            ((k / side) as u32, (k % side) as u32)
        })
        .collect();
    Ok(CountRecord {
        shots,
        samples,
        seed,
    })
}

/// The squeezing function from exact count moments in the measurement basis:
/// V_n − 2√(⟨n₁⟩⟨n₂⟩) with V_n = ⟨n₁²⟩ + ⟨n₂²⟩ − 2⟨n₁n₂⟩ − (⟨n₁⟩ − ⟨n₂⟩)².
/// Equals f(n) whenever the light is polarized.
pub fn squeezing_from_count_moments(m: &CountMoments) -> f64 {
    let d = m.mean1 - m.mean2;
    m.second1 + m.second2 - 2.0 * m.cross - d * d - 2.0 * (m.mean1 * m.mean2).max(0.0).sqrt()
}

/// How the standard error of an estimate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMethod {
    /// First-order propagation of the 5×5 sample covariance through the
    /// estimator gradient.
    DeltaMethod,
    /// Nonparametric bootstrap over the recorded shots (used when a detector
    /// is nearly empty and the delta gradient degenerates).
    Bootstrap,
}

/// Point estimate of the squeezing function from one count record.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub value: f64,
    pub std_error: f64,
    pub method: ErrorMethod,
    /// Sample moments the value was computed from.
    pub moments: CountMoments,
    /// Standard errors of the individual sample moments.
    pub moment_std_errors: CountMoments,
    pub shots: u64,
}

fn sample_vectors(samples: &[(u32, u32)]) -> Vec<[f64; 5]> {
    samples
        .iter()
        .map(|&(n1, n2)| {
            let (x1, x2) = (n1 as f64, n2 as f64);
            [x1, x2, x1 * x1, x2 * x2, x1 * x2]
        })
        .collect()
}

fn moments_from_means(means: [f64; 5]) -> CountMoments {
    CountMoments {
        mean1: means[0],
        mean2: means[1],
        second1: means[2],
        second2: means[3],
        cross: means[4],
    }
}

/// Estimate the squeezing function and its standard error from counts.
///
/// The point estimate plugs the five sample moments into
/// [`squeezing_from_count_moments`]. The error bar comes from the delta
/// method, g = ∂value/∂(m₁, m₂, s₁, s₂, c) against the sample covariance,
/// except when either detector averaged ≤ 10 events over the whole run —
/// there the gradient's √(m₂/m₁) factors degenerate and a seeded bootstrap
/// over the shots is used instead.
pub fn estimate_squeezing(rec: &CountRecord) -> Result<EstimatorResult> {
    let shots = rec.samples.len();
    if shots < 2 {
        return Err(Error::TooFewShots {
            shots: shots as u64,
        });
    }
    let n = shots as f64;
    let vectors = sample_vectors(&rec.samples);

    let mut means = [0.0_f64; 5];
    for v in &vectors {
        for (acc, x) in means.iter_mut().zip(v) {
            *acc += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }

    // Sample covariance of the 5 moment coordinates (ddof 1).
    let mut cov = [[0.0_f64; 5]; 5];
    for v in &vectors {
        let d: Vec<f64> = v.iter().zip(&means).map(|(x, m)| x - m).collect();
        for i in 0..5 {
            for j in 0..5 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for row in &mut cov {
        for c in row.iter_mut() {
            *c /= n - 1.0;
        }
    }

    let moments = moments_from_means(means);
    let value = squeezing_from_count_moments(&moments);
    let moment_std_errors = moments_from_means([
        (cov[0][0] / n).sqrt(),
        (cov[1][1] / n).sqrt(),
        (cov[2][2] / n).sqrt(),
        (cov[3][3] / n).sqrt(),
        (cov[4][4] / n).sqrt(),
    ]);

    let sparse = means[0] * n <= SPARSE_EVENTS || means[1] * n <= SPARSE_EVENTS;
    let (std_error, method) = if sparse {
        let mut rng = ChaCha8Rng::seed_from_u64(rec.seed ^ BOOTSTRAP_SALT);
        let dist = rand::distr::Uniform::new(0, shots).expect("shots >= 2");
        let mut values = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let mut sums = [0.0_f64; 5];
            for _ in 0..shots {
                let v = &vectors[dist.sample(&mut rng)];
                for (acc, x) in sums.iter_mut().zip(v) {
                    *acc += x;
                }
            }
            for s in &mut sums {
                *s /= n;
            }
            values.push(squeezing_from_count_moments(&moments_from_means(sums)));
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let var: f64 =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        (var.sqrt(), ErrorMethod::Bootstrap)
    } else {
        let d = means[0] - means[1];
        let g = [
            -2.0 * d - (means[1] / means[0]).sqrt(),
            2.0 * d - (means[0] / means[1]).sqrt(),
            1.0,
            1.0,
            -2.0,
        ];
        let mut var = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                var += g[i] * cov[i][j] * g[j];
            }
        }
        ((var / n).max(0.0).sqrt(), ErrorMethod::DeltaMethod)
    };

    Ok(EstimatorResult {
        value,
        std_error,
        method,
        moments,
        moment_std_errors,
        shots: shots as u64,
    })
}

/// Residuals of the detection identity at one basis.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// max |(Ŝ_n − (N̂_ε̄ − N̂_ε̄⊥))ᵢⱼ| on a dense grid (cutoff capped at 8);
    /// machine zero because both sides are the same quadratic form.
    pub residual_op: f64,
    /// |(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²) − 4⟨N̂_ε̄⟩⟨N̂_ε̄⊥⟩| for the given ensemble; zero for
    /// polarized light, generally nonzero otherwise.
    pub residual_scalar: f64,
    /// Whether the light is polarized — some single mode annihilates every
    /// member (the regime in which the scalar identity is exact). The
    /// candidate mode is read off the mean Stokes direction.
    pub polarized: bool,
}

/// Check the operator identity Ŝ_n = N̂_ε̄ − N̂_ε̄⊥ (state-independent, dense
/// matrices at min(cutoff, 8)) and its scalar consequence
/// |⟨Ŝ⟩|² − ⟨Ŝ_n⟩² = 4⟨N̂_ε̄⟩⟨N̂_ε̄⊥⟩ on the ensemble, where n is the Poincaré
/// image of the measurement mode ε̄.
pub fn identity_check(ens: &StateEnsemble, eps: &PolarizationVector) -> Result<IdentityCheck> {
    let n = poincare_from_jones(eps);

    let dense_cutoff = ens.cutoff().min(8);
    let s_n = dense::stokes_along(dense_cutoff, &n);
    let difference = &dense::mode_number(dense_cutoff, eps)
        - &dense::mode_number(dense_cutoff, &eps.orthogonal());
    let residual_op = dense::max_abs_diff(&s_n, &difference);

    let basis = ModePair::from_primary(*eps);
    let rotated = ens.map_states(|st| mode_transform_to_pair(st, &basis))?;
    let n1 = rotated.moment(1, 1, 0, 0)?.re;
    let n2 = rotated.moment(0, 0, 1, 1)?.re;
    let mom = stokes_moments(ens)?;
    let (mean_n, _) = stokes_along(&mom, &n);
    let lhs = mom.mean_norm().powi(2) - mean_n * mean_n;
    let residual_scalar = (lhs - 4.0 * n1 * n2).abs();

    // Polarized light has ⟨Ŝ⟩ along the Poincaré image of its mode with
    // |⟨Ŝ⟩| = ⟨Ŝ₀⟩, so the mean Stokes direction is the only candidate; the
    // vacuum is annihilated by every mode and counts as polarized outright.
    let polarized = if mom.s0 <= POLARIZED_TOL {
        true
    } else if mom.mean_norm() <= POLARIZED_TOL * mom.s0.max(1.0) {
        false
    } else {
        let m_hat = crate::polarization::PoincareVector::normalized(mom.s[0], mom.s[1], mom.s[2])?;
        let (theta, phi) = crate::polarization::angles_from_direction(&m_hat);
        verify_polarized(ens, &jones_from_angles(theta, phi))? <= POLARIZED_TOL
    };
    Ok(IdentityCheck {
        residual_op,
        residual_scalar,
        polarized,
    })
}

/// Serialize a count record as CSV with the exact header `n1,n2`.
pub fn counts_csv(rec: &CountRecord) -> String {
    let mut out = String::with_capacity(8 + rec.samples.len() * 8);
    out.push_str("n1,n2\n");
    for &(n1, n2) in &rec.samples {
        out.push_str(&format!("{n1},{n2}\n"));
    }
    out
}

/// Exact-moment convenience: the estimator evaluated on the true joint
/// distribution of an ensemble in the basis whose primary mode points at
/// (θ, φ). For polarized light this equals `squeezing_function` identically.
pub fn squeezing_from_distribution(ens: &StateEnsemble, theta: f64, phi: f64) -> Result<f64> {
    let basis = rotated_basis(theta, phi);
    Ok(squeezing_from_count_moments(
        &joint_distribution(ens, &basis)?.moments(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::direction_from_angles;
    use crate::squeezing::squeezing_function;
    use crate::states::{build, PolarizationAngles, StateKind, StateSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn polarized(kind: StateKind, theta0: f64, phi0: f64) -> StateEnsemble {
        build(&StateSpec {
            schema: 1,
            kind,
            polarization: PolarizationAngles { theta0, phi0 },
            cutoff: None,
        })
        .unwrap()
    }

    #[test]
    fn rotated_basis_reference_values() {
        let b = rotated_basis(PI, 0.0);
        assert!(b.primary().ex().norm() < 1e-12);
        assert_abs_diff_eq!(b.primary().ey().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.orthogonal().ex().re, -1.0, epsilon = 1e-12);
        assert!(b.orthogonal().ey().norm() < 1e-12);

        let c = rotated_basis(PI / 2.0, PI / 2.0);
        let r = 0.5_f64.sqrt();
        assert_abs_diff_eq!(c.primary().ex().re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(c.primary().ey().im, r, epsilon = 1e-12);
        assert_abs_diff_eq!(c.orthogonal().ex().re, -r, epsilon = 1e-12);
        assert_abs_diff_eq!(c.orthogonal().ey().im, r, epsilon = 1e-12);
    }

    #[test]
    fn coherent_in_its_own_basis_is_poisson_times_vacuum() {
        let ens = polarized(StateKind::Coherent { alpha: [1.2, 0.0] }, 0.9, 1.7);
        let dist = joint_distribution(&ens, &rotated_basis(0.9, 1.7)).unwrap();
        let lambda = 1.2_f64 * 1.2;
        let mut pn = (-lambda).exp();
        for n in 0..12 {
            if n > 0 {
                pn *= lambda / n as f64;
            }
            assert_abs_diff_eq!(dist.prob(n, 0), pn, epsilon = 1e-10);
            assert!(dist.prob(n, 1) < 1e-12);
        }
    }

    #[test]
    fn single_photon_splits_by_half_angle() {
        let ens = polarized(StateKind::Fock { n: 1 }, 0.0, 0.0);
        for theta in [0.0, 0.4, PI / 2.0, 2.5, PI] {
            let dist = joint_distribution(&ens, &rotated_basis(theta, 1.1)).unwrap();
            // Sphere angle between m = e1 and the basis direction is theta.
            let c = (theta / 2.0).cos().powi(2);
            assert_abs_diff_eq!(dist.prob(1, 0), c, epsilon = 1e-12);
            assert_abs_diff_eq!(dist.prob(0, 1), 1.0 - c, epsilon = 1e-12);
            assert!(dist.prob(0, 0) < 1e-14);
        }
    }

    #[test]
    fn vacuum_counts_nothing() {
        let ens = polarized(StateKind::Coherent { alpha: [0.0, 0.0] }, 0.0, 0.0);
        let dist = joint_distribution(&ens, &rotated_basis(1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(dist.prob(0, 0), 1.0, epsilon = 1e-12);
        let m = dist.moments();
        assert_eq!(m.mean1, 0.0);
        assert_eq!(m.cross, 0.0);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let ens = polarized(StateKind::Fock { n: 1 }, 0.0, 0.0);
        let theta = 1.2;
        let dist = joint_distribution(&ens, &rotated_basis(theta, 0.3)).unwrap();
        let a = sample_counts(&dist, 20_000, 42).unwrap();
        let b = sample_counts(&dist, 20_000, 42).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = sample_counts(&dist, 20_000, 43).unwrap();
        assert_ne!(a.samples, c.samples);

        // Binomial check: mean of n1 within 5 sigma of cos²(θ/2).
        let p = (theta / 2.0_f64).cos().powi(2);
        let mean1 = a.samples.iter().map(|&(n1, _)| n1 as f64).sum::<f64>() / 20_000.0;
        let sigma = (p * (1.0 - p) / 20_000.0_f64).sqrt();
        assert!(
            (mean1 - p).abs() < 5.0 * sigma,
            "mean1 {mean1} vs p {p} (sigma {sigma})"
        );
    }

    #[test]
    fn sample_counts_rejects_degenerate_requests() {
        let ens = polarized(StateKind::Fock { n: 1 }, 0.0, 0.0);
        let dist = joint_distribution(&ens, &rotated_basis(0.0, 0.0)).unwrap();
        assert!(matches!(
            sample_counts(&dist, 1, 0).unwrap_err(),
            Error::TooFewShots { shots: 1 }
        ));
    }

    #[test]
    fn estimator_on_silent_detectors_is_zero() {
        let rec = CountRecord {
            shots: 100,
            samples: vec![(0, 0); 100],
            seed: 7,
        };
        let est = estimate_squeezing(&rec).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.method, ErrorMethod::Bootstrap);
        assert!(estimate_squeezing(&CountRecord {
            shots: 1,
            samples: vec![(0, 0)],
            seed: 0,
        })
        .is_err());
    }

    #[test]
    fn estimator_agrees_with_samples_at_scale() {
        // Fock |5⟩, measured 45° off its polarization axis: the estimate must
        // land within a few standard errors of the exact value, the delta
        // method must be selected, and the error bar must be sane.
        let ens = polarized(StateKind::Fock { n: 5 }, 0.0, 0.0);
        let theta = PI / 4.0;
        let dist = joint_distribution(&ens, &rotated_basis(theta, 0.0)).unwrap();
        let exact = squeezing_from_count_moments(&dist.moments());
        let rec = sample_counts(&dist, 100_000, 11).unwrap();
        let est = estimate_squeezing(&rec).unwrap();
        assert_eq!(est.method, ErrorMethod::DeltaMethod);
        assert!(est.std_error > 0.0 && est.std_error < 0.1);
        assert!(
            (est.value - exact).abs() < 4.0 * est.std_error,
            "estimate {} vs exact {} (se {})",
            est.value,
            exact,
            est.std_error
        );
    }

    #[test]
    fn exact_moments_reproduce_the_squeezing_function() {
        // For polarized light the count-moment functional equals f(n).
        let cases = vec![
            (StateKind::Fock { n: 5 }, 0.7, 2.1),
            (StateKind::Coherent { alpha: [1.1, 0.5] }, 1.9, 0.2),
            (
                StateKind::Qubit01 {
                    c0: [0.8, 0.0],
                    c1: [0.0, 0.6],
                },
                0.3,
                5.1,
            ),
        ];
        for (kind, t0, p0) in cases {
            let ens = polarized(kind, t0, p0);
            for &(t, p) in &[(0.0, 0.0), (0.9, 1.2), (1.7, 4.0), (2.8, 0.5)] {
                let via_counts = squeezing_from_distribution(&ens, t, p).unwrap();
                let direct = squeezing_function(&ens, &direction_from_angles(t, p)).unwrap();
                assert_abs_diff_eq!(via_counts, direct, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn identity_check_reference_case() {
        // Fock |3⟩ polarized along x, measured at sphere angle π/3: both
        // sides of the scalar identity equal 27/4.
        let ens = polarized(StateKind::Fock { n: 3 }, 0.0, 0.0);
        let eps = jones_from_angles(PI / 3.0, 0.9);
        let check = identity_check(&ens, &eps).unwrap();
        assert!(check.polarized);
        assert!(check.residual_op < 1e-12);
        assert!(check.residual_scalar < 1e-9);

        let mom = stokes_moments(&ens).unwrap();
        let n = poincare_from_jones(&eps);
        let (mean_n, _) = stokes_along(&mom, &n);
        assert_abs_diff_eq!(
            mom.mean_norm().powi(2) - mean_n * mean_n,
            6.75,
            epsilon = 1e-9
        );
    }

    #[test]
    fn identity_check_operator_residual_is_machine_zero() {
        let ens = polarized(StateKind::Coherent { alpha: [0.9, 0.2] }, 1.3, 2.2);
        for (t, p) in [(0.0, 0.0), (0.8, 1.1), (2.9, 5.5)] {
            let eps = jones_from_angles(t, p);
            let check = identity_check(&ens, &eps).unwrap();
            assert!(check.residual_op < 1e-12, "residual {}", check.residual_op);
        }
    }

    #[test]
    fn identity_check_flags_unpolarized_light() {
        // 50/50 mixture of x- and y-polarized photons: mean Stokes vector
        // vanishes, the scalar identity fails, and the polarized flag drops.
        let cutoff = 6;
        let pair = ModePair::xy();
        let x = crate::fock::TwoModeFockState::fock(1, 0, cutoff, pair).unwrap();
        let y = crate::fock::TwoModeFockState::fock(0, 1, cutoff, pair).unwrap();
        let ens = StateEnsemble::new(vec![(0.5, x), (0.5, y)]).unwrap();
        let check = identity_check(&ens, &PolarizationVector::x_linear()).unwrap();
        assert!(!check.polarized);
        assert!(check.residual_scalar > 0.5);
    }

    #[test]
    fn counts_csv_shape() {
        let rec = CountRecord {
            shots: 3,
            samples: vec![(1, 0), (0, 2), (4, 4)],
            seed: 0,
        };
        let csv = counts_csv(&rec);
        assert_eq!(csv, "n1,n2\n1,0\n0,2\n4,4\n");
    }

    #[test]
    fn joint_distribution_rejects_bad_tables() {
        let bad = Array2::<f64>::zeros((3, 3));
        assert!(matches!(
            JointDistribution::new(bad).unwrap_err(),
            Error::DegenerateTable { .. }
        ));
        let mut neg = Array2::<f64>::zeros((2, 2));
        neg[(0, 0)] = 1.5;
        neg[(1, 1)] = -0.5;
        assert!(JointDistribution::new(neg).is_err());
        let mut skew = Array2::<f64>::zeros((2, 3));
        skew[(0, 0)] = 1.0;
        assert!(matches!(
            JointDistribution::new(skew).unwrap_err(),
            Error::NonSquareGrid { rows: 2, cols: 3 }
        ));
    }

    #[test]
    fn members_mix_in_the_table_not_the_amplitudes() {
        // Mixture of |1,0⟩ and |0,1⟩ measured in xy: p(1,0) = p(0,1) = 1/2,
        // with no coherence artifacts.
        let cutoff = 5;
        let pair = ModePair::xy();
        let x = crate::fock::TwoModeFockState::fock(1, 0, cutoff, pair).unwrap();
        let y = crate::fock::TwoModeFockState::fock(0, 1, cutoff, pair).unwrap();
        let ens = StateEnsemble::new(vec![(0.5, x), (0.5, y)]).unwrap();
        let dist = joint_distribution(&ens, &rotated_basis(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(dist.prob(1, 0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.prob(0, 1), 0.5, epsilon = 1e-12);
    }
}
