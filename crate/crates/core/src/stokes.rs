//! Stokes-operator moments and passive mode transforms.
//!
//! The Stokes operators in a mode pair (labelling the two grid axes a, b) are
//! Ŝ₀,₁ = â†â ± b̂†b̂ and Ŝ₂ + iŜ₃ = 2â†b̂. All first and second moments
//! reduce to nine normally ordered ladder moments, evaluated in the
//! laboratory (x, y) labels after a passive mode transform.
//!
//! The transform itself is exact per total-photon-number sector: the 2×2 map
//! between mode pairs is lifted to each sector by induction on photon number,
//! so every block is unitary to machine precision and truncation enters only
//! through the corner n_a + n_b > cutoff that a rotated square grid cannot
//! represent (checked against the state's leakage tolerance before anything
//! is discarded).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{ModePair, StateEnsemble, TwoModeFockState};
use crate::polarization::{PoincareDirection, PolarizationVector};

/// Bound on imaginary residues of moments that must be real.
pub const IMAG_TOL: f64 = 1e-10;

/// Negative-variance clamp: variances above −1e−10 are floored at zero.
pub const VARIANCE_CLAMP: f64 = 1e-10;

/// First and second moments of the Stokes operators for one ensemble.
///
/// `anti` holds the anticommutator means ⟨{Ŝ_j, Ŝ_k}⟩ for the index pairs
/// (1,2), (2,3), (3,1) in that order.
#[derive(Clone, Copy, Debug)]
pub struct StokesMoments {
    pub s0: f64,
    pub s: [f64; 3],
    pub s2: [f64; 3],
    pub anti: [f64; 3],
}

impl StokesMoments {
    /// Variance of one Cartesian Stokes component.
    pub fn variance_axis(&self, j: usize) -> f64 {
        clamp_variance(self.s2[j] - self.s[j] * self.s[j])
    }

    /// |⟨Ŝ⟩|, the length of the mean Stokes vector.
    pub fn mean_norm(&self) -> f64 {
        (self.s[0] * self.s[0] + self.s[1] * self.s[1] + self.s[2] * self.s[2]).sqrt()
    }
}

/// The 2×2 transfer matrix T with a_new = T a_old between two mode pairs
/// (rows index the new pair, columns the old). Both pairs being orthonormal
/// makes T unitary.
pub fn transfer_matrix(old: &ModePair, new: &ModePair) -> [[Complex64; 2]; 2] {
    // a_pair = M(pair) a_xy with M rows (ε_x*, ε_y*), (ε⊥_x*, ε⊥_y*);
    // T = M_new · M_old†.
    let m = |p: &ModePair| {
        [
            [p.primary().ex().conj(), p.primary().ey().conj()],
            [p.orthogonal().ex().conj(), p.orthogonal().ey().conj()],
        ]
    };
    let mn = m(new);
    let mo = m(old);
    let mut t = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            // (M_old†)_{kj} = conj(M_old[j][k])
            t[i][j] = mn[i][0] * mo[j][0].conj() + mn[i][1] * mo[j][1].conj();
        }
    }
    t
}

/// Re-express a state in the mode pair (ε, ε⊥).
///
/// Exact block unitary on every total-photon-number sector N ≤ cutoff;
/// refuses the transform if the probability mass on N > cutoff (invisible to
/// the rotated grid) exceeds the state's leakage tolerance, otherwise that
/// negligible mass is dropped and the result renormalized.
pub fn mode_transform(
    state: &TwoModeFockState,
    eps: &PolarizationVector,
) -> Result<TwoModeFockState> {
    mode_transform_to_pair(state, &ModePair::from_primary(*eps))
}

/// As [`mode_transform`] but with an explicit target pair (any orthonormal
/// pair, not only the ε⊥ convention).
pub fn mode_transform_to_pair(
    state: &TwoModeFockState,
    new_pair: &ModePair,
) -> Result<TwoModeFockState> {
    let cutoff = state.cutoff();
    let corner: f64 = state
        .amplitudes()
        .indexed_iter()
        .filter(|((na, nb), _)| na + nb > cutoff)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    if corner > state.leakage_tolerance() {
        return Err(Error::TransformOverflow {
            mass: corner,
            tolerance: state.leakage_tolerance(),
        });
    }

    let t = transfer_matrix(state.labels(), new_pair);
    // Old-mode creation operators in the new pair:
    // a_old,a† = α a† + β b†, a_old,b† = γ a† + δ b†.
    let (alpha, beta) = (t[0][0], t[1][0]);
    let (gamma, delta) = (t[0][1], t[1][1]);

    let mut out: Array2<Complex64> = Array2::zeros((cutoff + 1, cutoff + 1));
    out[(0, 0)] = state.amplitude(0, 0);

    // images[k][p]: amplitude of |p, n−p⟩ in the image of old basis state
    // |k, n−k⟩, built inductively one photon at a time.
    let mut images: Vec<Vec<Complex64>> = vec![vec![Complex64::ONE]];
    for n in 1..=cutoff {
        let mut next: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
        // |0, n⟩ = a_old,b†/√n |0, n−1⟩.
        next.push(raise(&images[0], gamma, delta, n));
        // |k, n−k⟩ = a_old,a†/√k |k−1, n−k⟩.
        for k in 1..=n {
            next.push(raise(&images[k - 1], alpha, beta, k));
        }
        for (k, image) in next.iter().enumerate() {
            let amp = state.amplitude(k, n - k);
            if amp == Complex64::ZERO {
                continue;
            }
            for (p, coeff) in image.iter().enumerate() {
                out[(p, n - p)] += amp * coeff;
            }
        }
        images = next;
    }

    state.relabelled(out, *new_pair)
}

/// Apply c_a a† + c_b b† to a one-sector image and divide by √`norm_photon`.
fn raise(image: &[Complex64], ca: Complex64, cb: Complex64, norm_photon: usize) -> Vec<Complex64> {
    let m = image.len() - 1; // parent sector N = m
    let mut out = vec![Complex64::ZERO; m + 2];
    for (p, &c) in image.iter().enumerate() {
        if c == Complex64::ZERO {
            continue;
        }
        out[p + 1] += ca * ((p + 1) as f64).sqrt() * c;
        out[p] += cb * ((m - p + 1) as f64).sqrt() * c;
    }
    let inv = 1.0 / (norm_photon as f64).sqrt();
    for v in &mut out {
        *v *= inv;
    }
    out
}

/// Ensemble re-expressed in laboratory (x, y) labels; no-op when already
/// labelled that way.
pub fn to_lab_frame(ens: &StateEnsemble) -> Result<StateEnsemble> {
    if ens.labels().approx_eq(&ModePair::xy(), 1e-15) {
        return Ok(ens.clone());
    }
    ens.map_states(|st| mode_transform_to_pair(st, &ModePair::xy()))
}

/// All Stokes moments of an ensemble, via the nine ladder moments in the
/// laboratory frame. Errors on unsafe states and on imaginary residues
/// beyond [`IMAG_TOL`].
pub fn stokes_moments(ens: &StateEnsemble) -> Result<StokesMoments> {
    let lab = to_lab_frame(ens)?;
    let m = |p, q, r, s| lab.moment(p, q, r, s);

    let na = real_part(m(1, 1, 0, 0)?)?;
    let nb = real_part(m(0, 0, 1, 1)?)?;
    let ab = m(1, 0, 0, 1)?; // ⟨â†b̂⟩
    let a2 = real_part(m(2, 2, 0, 0)?)?; // ⟨â†²â²⟩
    let b2 = real_part(m(0, 0, 2, 2)?)?;
    let nanb = real_part(m(1, 1, 1, 1)?)?; // ⟨â†â b̂†b̂⟩
    let aabb = m(2, 0, 0, 2)?; // ⟨â†² b̂²⟩
    let c1 = m(2, 1, 0, 1)?; // ⟨â†² â b̂⟩
    let c2 = m(1, 0, 1, 2)?; // ⟨â† b̂† b̂²⟩

    let s0 = na + nb;
    let s = [na - nb, 2.0 * ab.re, 2.0 * ab.im];
    let s2 = [
        a2 + b2 + s0 - 2.0 * nanb,
        2.0 * aabb.re + 2.0 * nanb + s0,
        -2.0 * aabb.re + 2.0 * nanb + s0,
    ];
    let anti = [4.0 * (c1.re - c2.re), 4.0 * aabb.im, 4.0 * (c1.im - c2.im)];
    Ok(StokesMoments { s0, s, s2, anti })
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue {
            imag: z.im,
            tolerance: IMAG_TOL,
        });
    }
    Ok(z.re)
}

/// Mean and variance of Ŝ_n along a direction:
/// ⟨Ŝ_n⟩ = Σ n_j ⟨Ŝ_j⟩ and
/// ⟨Ŝ_n²⟩ = Σ n_j² ⟨Ŝ_j²⟩ + Σ_{j<k} n_j n_k ⟨{Ŝ_j, Ŝ_k}⟩.
pub fn stokes_along(mom: &StokesMoments, n: &PoincareDirection) -> (f64, f64) {
    let c = n.components();
    let mean = c[0] * mom.s[0] + c[1] * mom.s[1] + c[2] * mom.s[2];
    let second = c[0] * c[0] * mom.s2[0]
        + c[1] * c[1] * mom.s2[1]
        + c[2] * c[2] * mom.s2[2]
        + c[0] * c[1] * mom.anti[0]
        + c[1] * c[2] * mom.anti[1]
        + c[2] * c[0] * mom.anti[2];
    (mean, clamp_variance(second - mean * mean))
}

fn clamp_variance(v: f64) -> f64 {
    if v < 0.0 && v > -VARIANCE_CLAMP {
        0.0
    } else {
        v
    }
}

/// Phase-shift the second (y / orthogonal-label) mode: c[n_a][n_b] picks up
/// e^{−iφ·n_b}. This is the passive optical element of the measurement
/// scheme: shifting the y phase by Φ maps â_ε̄ for ε̄(θ, Φ) onto â_ε̄ for the
/// real vector ε̄(θ, 0).
pub fn phase_shift_second_mode(state: &TwoModeFockState, phi: f64) -> TwoModeFockState {
    let mut amps = state.amplitudes().clone();
    for ((_, nb), c) in amps.indexed_iter_mut() {
        *c *= Complex64::from_polar(1.0, -phi * nb as f64);
    }
    state
        .relabelled(amps, *state.labels())
        .expect("phase shift preserves norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_annihilation, grid_norm, Mode};
    use crate::polarization::{direction_from_angles, jones_from_angles};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn fock_xy(na: usize, nb: usize, cutoff: usize) -> TwoModeFockState {
        TwoModeFockState::fock(na, nb, cutoff, ModePair::xy()).unwrap()
    }

    #[test]
    fn transform_fixes_vacuum() {
        let vac = TwoModeFockState::vacuum(6, ModePair::xy());
        let eps = jones_from_angles(1.1, 2.2);
        let out = mode_transform(&vac, &eps).unwrap();
        assert_abs_diff_eq!(out.amplitude(0, 0).norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn single_photon_transforms_by_jones_map() {
        // |1,0⟩ in xy seen in the 45°-linear pair is (|1,0⟩ − |0,1⟩)/√2.
        let st = fock_xy(1, 0, 6);
        let eps = jones_from_angles(PI / 2.0, 0.0);
        let out = mode_transform(&st, &eps).unwrap();
        assert_abs_diff_eq!(out.amplitude(1, 0).re, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(0, 1).re, -FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn transform_round_trip_is_identity() {
        let mut amps = Array2::zeros((9, 9));
        amps[(0, 0)] = Complex64::new(0.3, -0.2);
        amps[(2, 1)] = Complex64::new(0.5, 0.4);
        amps[(1, 3)] = Complex64::new(-0.1, 0.7);
        amps[(4, 0)] = Complex64::new(0.2, 0.2);
        let st = TwoModeFockState::from_amplitudes(amps, ModePair::xy()).unwrap();
        let eps = jones_from_angles(0.8, 4.0);
        let there = mode_transform(&st, &eps).unwrap();
        let back = mode_transform_to_pair(&there, &ModePair::xy()).unwrap();
        let mut worst = 0.0_f64;
        for ((i, j), c) in back.amplitudes().indexed_iter() {
            worst = worst.max((c - st.amplitude(i, j)).norm());
        }
        assert!(worst < 1e-12, "round trip defect {worst}");
    }

    #[test]
    fn transform_preserves_norm_and_sectors() {
        let mut amps = Array2::zeros((8, 8));
        amps[(1, 0)] = Complex64::new(0.6, 0.0);
        amps[(0, 1)] = Complex64::new(0.0, 0.4);
        amps[(2, 2)] = Complex64::new(0.5, -0.3);
        let st = TwoModeFockState::from_amplitudes(amps, ModePair::xy()).unwrap();
        let out = mode_transform(&st, &jones_from_angles(2.0, 1.0)).unwrap();
        assert_abs_diff_eq!(grid_norm(out.amplitudes()), 1.0, epsilon = 1e-12);
        let before = st.sector_probabilities();
        let after = out.sector_probabilities();
        for (p, q) in before.iter().zip(after.iter()) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_refuses_corner_mass() {
        // All mass on the top sector cannot be rotated on the same grid.
        let st = fock_xy(3, 3, 3);
        let err = mode_transform(&st, &jones_from_angles(1.0, 0.0)).unwrap_err();
        assert!(err.is_numerical_safety());
    }

    #[test]
    fn stokes_moments_of_s1_eigenstate() {
        let ens = StateEnsemble::pure(fock_xy(2, 0, 6));
        let mom = stokes_moments(&ens).unwrap();
        assert_abs_diff_eq!(mom.s0, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s2[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s2[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mom.s2[2], 2.0, epsilon = 1e-12);
        for a in mom.anti {
            assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn stokes_moments_of_vacuum_vanish() {
        let ens = StateEnsemble::pure(TwoModeFockState::vacuum(5, ModePair::xy()));
        let mom = stokes_moments(&ens).unwrap();
        assert_eq!(mom.s0, 0.0);
        assert_eq!(mom.s, [0.0; 3]);
        assert_eq!(mom.s2, [0.0; 3]);
        assert_eq!(mom.anti, [0.0; 3]);
    }

    #[test]
    fn stokes_along_matches_axis_moments() {
        let ens = StateEnsemble::pure(fock_xy(2, 0, 6));
        let mom = stokes_moments(&ens).unwrap();
        let (mean, var) = stokes_along(&mom, &direction_from_angles(0.0, 0.0));
        assert_abs_diff_eq!(mean, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 0.0, epsilon = 1e-12);
        let (mean3, var3) = stokes_along(&mom, &direction_from_angles(PI / 2.0, PI / 2.0));
        assert_abs_diff_eq!(mean3, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var3, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn moments_agree_with_dense_oracle_on_arbitrary_state() {
        use crate::dense;
        let cutoff = 6;
        let mut amps = Array2::zeros((cutoff + 1, cutoff + 1));
        amps[(0, 1)] = Complex64::new(0.4, 0.1);
        amps[(1, 1)] = Complex64::new(-0.2, 0.3);
        amps[(2, 0)] = Complex64::new(0.1, -0.5);
        amps[(0, 0)] = Complex64::new(0.3, 0.0);
        let st = TwoModeFockState::from_amplitudes(amps, ModePair::xy()).unwrap();
        let mom = stokes_moments(&StateEnsemble::pure(st.clone())).unwrap();

        let ops = dense::stokes(cutoff);
        let s0 = dense::expectation(&ops[0], &st);
        assert_abs_diff_eq!(mom.s0, s0.re, epsilon = 1e-12);
        for j in 0..3 {
            let mean = dense::expectation(&ops[j + 1], &st);
            assert_abs_diff_eq!(mom.s[j], mean.re, epsilon = 1e-12);
            let sq = dense::expectation(&ops[j + 1].dot(&ops[j + 1]), &st);
            assert_abs_diff_eq!(mom.s2[j], sq.re, epsilon = 1e-12);
        }
        let pairs = [(1, 2), (2, 3), (3, 1)];
        for (idx, (j, k)) in pairs.into_iter().enumerate() {
            let anti = ops[j].dot(&ops[k]) + ops[k].dot(&ops[j]);
            let val = dense::expectation(&anti, &st);
            assert_abs_diff_eq!(mom.anti[idx], val.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_shift_moves_azimuth() {
        // Phase-shifting y by Φ then transforming with the real ε̄(θ, 0) is
        // the same as transforming with ε̄(θ, Φ).
        let theta = 1.1;
        let phi = 2.4;
        let mut amps = Array2::zeros((8, 8));
        amps[(1, 0)] = Complex64::new(0.7, 0.1);
        amps[(0, 2)] = Complex64::new(0.2, -0.4);
        amps[(2, 1)] = Complex64::new(-0.3, 0.3);
        let st = TwoModeFockState::from_amplitudes(amps, ModePair::xy()).unwrap();

        let direct = mode_transform(&st, &jones_from_angles(theta, phi)).unwrap();
        let shifted = phase_shift_second_mode(&st, phi);
        let rotated = mode_transform(&shifted, &jones_from_angles(theta, 0.0)).unwrap();
        for ((i, j), c) in direct.amplitudes().indexed_iter() {
            assert_abs_diff_eq!(
                c.norm_sqr(),
                rotated.amplitude(i, j).norm_sqr(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn moments_reject_unsafe_states() {
        let st = fock_xy(5, 1, 5);
        assert!(!st.second_moment_safe());
        assert!(stokes_moments(&StateEnsemble::pure(st)).is_err());
    }

    #[test]
    fn global_phase_leaves_moments_unchanged() {
        let mut amps = Array2::zeros((7, 7));
        amps[(1, 0)] = Complex64::new(0.5, 0.2);
        amps[(0, 1)] = Complex64::new(-0.1, 0.6);
        amps[(1, 1)] = Complex64::new(0.3, -0.3);
        let st = TwoModeFockState::from_amplitudes(amps.clone(), ModePair::xy()).unwrap();
        let phase = Complex64::from_polar(1.0, 1.9);
        let st2 =
            TwoModeFockState::from_amplitudes(amps.mapv(|c| c * phase), ModePair::xy()).unwrap();
        let m1 = stokes_moments(&StateEnsemble::pure(st)).unwrap();
        let m2 = stokes_moments(&StateEnsemble::pure(st2)).unwrap();
        assert_abs_diff_eq!(m1.s0, m2.s0, epsilon = 1e-12);
        for j in 0..3 {
            assert_abs_diff_eq!(m1.s[j], m2.s[j], epsilon = 1e-12);
            assert_abs_diff_eq!(m1.s2[j], m2.s2[j], epsilon = 1e-12);
            assert_abs_diff_eq!(m1.anti[j], m2.anti[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn annihilation_in_transformed_frame_matches_definition() {
        // â_ε = ε_x* â_x + ε_y* â_y: check ⟨N̂_ε⟩ two ways.
        let eps = jones_from_angles(0.9, 0.7);
        let mut amps = Array2::zeros((8, 8));
        amps[(1, 0)] = Complex64::new(0.8, 0.0);
        amps[(0, 1)] = Complex64::new(0.0, 0.5);
        amps[(1, 1)] = Complex64::new(0.2, -0.2);
        let st = TwoModeFockState::from_amplitudes(amps, ModePair::xy()).unwrap();

        let transformed = mode_transform(&st, &eps).unwrap();
        let direct = transformed.normally_ordered_moment(1, 1, 0, 0).unwrap();

        // By hand in the lab frame.
        let ax = apply_annihilation(&st, Mode::A);
        let ay = apply_annihilation(&st, Mode::B);
        let a_eps = ax.mapv(|c| c * eps.ex().conj()) + ay.mapv(|c| c * eps.ey().conj());
        let want: f64 = a_eps.iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(direct.re, want, epsilon = 1e-12);
    }
}
