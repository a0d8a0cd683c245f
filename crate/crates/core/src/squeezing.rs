//! Polarization-squeezing criteria, Mandel's Q, the analytic polarized-light
//! criterion, the squeezing-cone geometry, and direction-grid scans.
//!
//! The working quantity is f(n) = V_n − √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²): a direction is
//! squeezed when f is below −tol with tol = 1e−9·max(1, ⟨Ŝ₀⟩), so marginal
//! directions (where the criterion inequalities degrade to equalities)
//! classify as not squeezed. For light polarized in a mode with photon statistics of
//! Mandel factor Q, f/⟨N⟩ = (1 − sin Φ) + Q cos²Φ with Φ the sphere angle
//! between n and the polarization image m; squeezing therefore exists exactly
//! when Q < −1/2, outside a cone around ±m of semi-vertical angle
//! arcsin(|Q|⁻¹ − 1).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::StateEnsemble;
use crate::polarization::{
    cos_big_phi, direction_from_angles, PoincareDirection, PoincareVector, PolarizationVector,
};
use crate::stokes::{mode_transform, stokes_along, stokes_moments, StokesMoments};

/// Scale factor of the squeezing strictness tolerance.
pub const SQUEEZING_TOL_SCALE: f64 = 1e-9;

/// Strictness tolerance for "squeezed": f < −tolerance(s0).
pub fn squeezing_tolerance(s0: f64) -> f64 {
    SQUEEZING_TOL_SCALE * s0.max(1.0)
}

/// Cartesian Stokes axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    S1,
    S2,
    S3,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::S1 => 0,
            Axis::S2 => 1,
            Axis::S3 => 2,
        }
    }

    pub fn unit(self) -> PoincareDirection {
        match self {
            Axis::S1 => PoincareVector::new(1.0, 0.0, 0.0),
            Axis::S2 => PoincareVector::new(0.0, 1.0, 0.0),
            Axis::S3 => PoincareVector::new(0.0, 0.0, 1.0),
        }
        .expect("axis unit vector")
    }
}

/// Per-criterion verdicts for one direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CriterionFlags {
    /// V_n < ⟨Ŝ₀⟩ (coherent-benchmark comparison).
    pub chirkin: bool,
    /// V_n < |⟨Ŝ_v⟩| < V_u for the transverse frame (u, v) built at n.
    pub heersink: bool,
    /// V_n < |⟨Ŝ_n⊥⟩| with the default transverse direction n⊥.
    pub luis: bool,
    /// f < −tol, i.e. V_n < √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²) − tol.
    pub prakash_shukla: bool,
}

/// Everything the scan records for one direction.
#[derive(Clone, Copy, Debug)]
pub struct SqueezingReport {
    pub theta: f64,
    pub phi: f64,
    pub direction: PoincareDirection,
    /// cos of the sphere angle between the direction and the mean Stokes
    /// vector (0 when the mean vanishes).
    pub cos_big_phi: f64,
    pub mean: f64,
    pub variance: f64,
    /// √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²), clamped at 0.
    pub transverse_bound: f64,
    /// variance − transverse_bound.
    pub f: f64,
    pub flags: CriterionFlags,
}

/// Squeezing-cone geometry for light of Mandel factor Q: the no-squeezing
/// cone around ±m.
#[derive(Clone, Copy, Debug)]
pub struct ConeDescriptor {
    pub q: f64,
    pub exists: bool,
    /// arcsin(|Q|⁻¹ − 1), defined iff `exists`.
    pub semi_vertical_angle: Option<f64>,
}

/// Grid over the Poincaré sphere: θ takes `theta_steps` values spanning
/// [0, π] inclusive, φ takes `phi_steps` values spanning [0, 2π) half-open;
/// reports are θ-major.
#[derive(Clone, Copy, Debug)]
pub struct ScanGrid {
    pub theta_steps: usize,
    pub phi_steps: usize,
}

impl ScanGrid {
    pub fn new(theta_steps: usize, phi_steps: usize) -> Result<Self> {
        if theta_steps < 2 || phi_steps < 2 {
            return Err(Error::GridTooSmall {
                rows: theta_steps,
                cols: phi_steps,
            });
        }
        Ok(Self {
            theta_steps,
            phi_steps,
        })
    }

    pub fn theta(&self, i: usize) -> f64 {
        std::f64::consts::PI * i as f64 / (self.theta_steps - 1) as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.phi_steps as f64
    }

    /// One-cell angular scale: the largest angle between grid neighbours.
    pub fn cell(&self) -> f64 {
        std::f64::consts::PI / (self.theta_steps - 1) as f64
            + 2.0 * std::f64::consts::PI / self.phi_steps as f64
    }
}

/// Mandel's Q of the photon statistics in mode ε:
/// Q = (⟨â_ε†²â_ε²⟩ − ⟨N̂_ε⟩²)/⟨N̂_ε⟩. Undefined (error) when ⟨N̂_ε⟩ ≈ 0.
pub fn mandel_q(ens: &StateEnsemble, eps: &PolarizationVector) -> Result<f64> {
    let in_eps = ens.map_states(|st| mode_transform(st, eps))?;
    let n = in_eps.moment(1, 1, 0, 0)?;
    let w = in_eps.moment(2, 2, 0, 0)?;
    if n.re <= 1e-12 {
        return Err(Error::QUndefined { n_mean: n.re });
    }
    Ok((w.re - n.re * n.re) / n.re)
}

/// √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²) with the small negative arguments produced by float
/// error clamped to zero.
pub fn transverse_bound(mom: &StokesMoments, mean: f64) -> f64 {
    let arg = mom.mean_norm().powi(2) - mean * mean;
    if arg <= 0.0 {
        if arg < -1e-9 * mom.s0.max(1.0).powi(2) {
            // Genuinely negative arguments cannot occur for unit n; clamp but
            // keep the value finite rather than poisoning downstream math.
            return 0.0;
        }
        0.0
    } else {
        arg.sqrt()
    }
}

/// f(n) = V_n − √(|⟨Ŝ⟩|² − ⟨Ŝ_n⟩²) from precomputed moments.
pub fn squeezing_function_from_moments(mom: &StokesMoments, n: &PoincareDirection) -> f64 {
    let (mean, variance) = stokes_along(mom, n);
    variance - transverse_bound(mom, mean)
}

/// f(n) for an ensemble.
pub fn squeezing_function(ens: &StateEnsemble, n: &PoincareDirection) -> Result<f64> {
    Ok(squeezing_function_from_moments(&stokes_moments(ens)?, n))
}

/// V_j < ⟨Ŝ₀⟩ − tol: variance below the coherent benchmark on one axis.
pub fn criterion_chirkin(mom: &StokesMoments, j: Axis) -> bool {
    let tol = squeezing_tolerance(mom.s0);
    mom.variance_axis(j.index()) < mom.s0 - tol
}

/// V_j < |⟨Ŝ_l⟩| < V_k on an axis permutation (both inequalities strict with
/// tolerance).
pub fn criterion_heersink(mom: &StokesMoments, j: Axis, k: Axis, l: Axis) -> Result<bool> {
    if j == k || k == l || j == l {
        return Err(Error::AxesNotPermutation);
    }
    let tol = squeezing_tolerance(mom.s0);
    let vj = mom.variance_axis(j.index());
    let vk = mom.variance_axis(k.index());
    let sl = mom.s[l.index()].abs();
    Ok(vj < sl - tol && sl < vk - tol)
}

/// V_n < |⟨Ŝ_n⊥⟩| − tol for an explicit orthogonal pair (n, n⊥).
pub fn criterion_luis(
    mom: &StokesMoments,
    n: &PoincareDirection,
    n_perp: &PoincareDirection,
) -> Result<bool> {
    let dot = n.dot(n_perp);
    if dot.abs() > 1e-10 {
        return Err(Error::NonOrthogonalDirections { dot });
    }
    let tol = squeezing_tolerance(mom.s0);
    let (_, variance) = stokes_along(mom, n);
    let (mean_perp, _) = stokes_along(mom, n_perp);
    Ok(variance < mean_perp.abs() - tol)
}

/// Default n⊥ for the Luis–Korolkova criterion: the normalized transverse
/// part of the mean Stokes direction relative to n (this maximizes
/// |⟨Ŝ_n⊥⟩|); degenerate cases fall back to Gram–Schmidt seeded with e₁,
/// then e₂.
pub fn default_n_perp(mom: &StokesMoments, n: &PoincareDirection) -> PoincareDirection {
    let nc = n.components();
    let mut candidates: Vec<[f64; 3]> = Vec::with_capacity(3);
    let norm = mom.mean_norm();
    if norm > 1e-12 {
        let m = [mom.s[0] / norm, mom.s[1] / norm, mom.s[2] / norm];
        candidates.push(m);
    }
    candidates.push([1.0, 0.0, 0.0]);
    candidates.push([0.0, 1.0, 0.0]);
    for seed in candidates {
        let dot = seed[0] * nc[0] + seed[1] * nc[1] + seed[2] * nc[2];
        let t = [
            seed[0] - dot * nc[0],
            seed[1] - dot * nc[1],
            seed[2] - dot * nc[2],
        ];
        let t_norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        if t_norm > 1e-6 {
            return PoincareVector::new(t[0] / t_norm, t[1] / t_norm, t[2] / t_norm)
                .expect("normalized transverse vector");
        }
    }
    unreachable!("at least one Gram-Schmidt seed is transverse to any unit n")
}

/// The analytic criterion value (1 − sin Φ)(1 + Q(1 + sin Φ)) — equal to
/// (1 − sin Φ) + Q cos²Φ — for light polarized in a mode with Mandel factor
/// Q. Negative exactly where the light is squeezed.
pub fn analytic_polarized_criterion(q: f64, big_phi: f64) -> f64 {
    let s = big_phi.sin();
    (1.0 - s) * (1.0 + q * (1.0 + s))
}

/// The squeezing cone for Mandel factor q (must be ≥ −1): exists iff
/// q < −1/2, with semi-vertical angle arcsin(|q|⁻¹ − 1).
pub fn squeezing_cone(q: f64) -> Result<ConeDescriptor> {
    if !q.is_finite() || q < -1.0 - 1e-12 {
        return Err(Error::QOutOfRange { q });
    }
    let q_eff = q.max(-1.0);
    if q_eff < -0.5 {
        let angle = (1.0 / (-q_eff) - 1.0).asin();
        Ok(ConeDescriptor {
            q,
            exists: true,
            semi_vertical_angle: Some(angle),
        })
    } else {
        Ok(ConeDescriptor {
            q,
            exists: false,
            semi_vertical_angle: None,
        })
    }
}

/// Full report for one direction from precomputed moments.
pub fn report_at(mom: &StokesMoments, theta: f64, phi: f64) -> SqueezingReport {
    let n = direction_from_angles(theta, phi);
    let (mean, variance) = stokes_along(mom, &n);
    let bound = transverse_bound(mom, mean);
    let f = variance - bound;
    let tol = squeezing_tolerance(mom.s0);

    let cos_phi = {
        let norm = mom.mean_norm();
        if norm > 1e-12 {
            let m = PoincareVector::normalized(mom.s[0], mom.s[1], mom.s[2])
                .expect("nonzero mean Stokes vector");
            cos_big_phi(&n, &m)
        } else {
            0.0
        }
    };

    let n_perp = default_n_perp(mom, &n);
    let luis = criterion_luis(mom, &n, &n_perp).expect("default n_perp is orthogonal");
    // Heersink's pair in the transverse frame at n: u = n⊥, v = n × n⊥.
    let heersink = {
        let cx = n.cross(&n_perp);
        let v = PoincareVector::new(cx[0], cx[1], cx[2]).expect("cross of orthonormal pair");
        let (mean_v, _) = stokes_along(mom, &v);
        let (_, var_u) = stokes_along(mom, &n_perp);
        variance < mean_v.abs() - tol && mean_v.abs() < var_u - tol
    };

    SqueezingReport {
        theta,
        phi,
        direction: n,
        cos_big_phi: cos_phi,
        mean,
        variance,
        transverse_bound: bound,
        f,
        flags: CriterionFlags {
            chirkin: variance < mom.s0 - tol,
            heersink,
            luis,
            prakash_shukla: f < -tol,
        },
    }
}

/// Scan a direction grid from precomputed moments (pure parallel map;
/// ordering is θ-major regardless of parallelism).
pub fn scan_from_moments(mom: &StokesMoments, grid: ScanGrid) -> Vec<SqueezingReport> {
    let angles: Vec<(f64, f64)> = (0..grid.theta_steps)
        .flat_map(|i| (0..grid.phi_steps).map(move |j| (i, j)))
        .map(|(i, j)| (grid.theta(i), grid.phi(j)))
        .collect();

    #[cfg(feature = "parallel")]
    {
        if angles.len() >= 4096 {
            return angles
                .par_iter()
                .map(|&(t, p)| report_at(mom, t, p))
                .collect();
        }
    }
    angles.iter().map(|&(t, p)| report_at(mom, t, p)).collect()
}

/// Scan a direction grid for an ensemble.
pub fn scan(ens: &StateEnsemble, grid: ScanGrid) -> Result<Vec<SqueezingReport>> {
    let mom = stokes_moments(ens)?;
    Ok(scan_from_moments(&mom, grid))
}
