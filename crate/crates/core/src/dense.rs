//! Dense matrix representations of two-mode operators on the truncated grid.
//!
//! Basis states |n_a, n_b⟩ are flattened row-major, index = n_a·(cutoff+1)+n_b.
//! These matrices are the independent route to every ladder-computed quantity:
//! commutator identities, the Ŝ_n = N̂_ε̄ − N̂_ε̄⊥ decomposition, and moment
//! cross-checks. Dimensions grow as (cutoff+1)², so this module is meant for
//! small cutoffs (≤ 10 or so), not production evaluation.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::fock::{Mode, TwoModeFockState};
use crate::polarization::{PoincareVector, PolarizationVector};

/// Flattened dimension of the truncated two-mode space.
pub fn dim(cutoff: usize) -> usize {
    (cutoff + 1) * (cutoff + 1)
}

/// Flat index of |n_a, n_b⟩.
pub fn flat(cutoff: usize, na: usize, nb: usize) -> usize {
    na * (cutoff + 1) + nb
}

/// Annihilation operator of one laboratory mode.
pub fn annihilation(cutoff: usize, mode: Mode) -> Array2<Complex64> {
    let d = dim(cutoff);
    let mut m = Array2::zeros((d, d));
    for na in 0..=cutoff {
        for nb in 0..=cutoff {
            match mode {
                Mode::A if na > 0 => {
                    m[(flat(cutoff, na - 1, nb), flat(cutoff, na, nb))] =
                        Complex64::new((na as f64).sqrt(), 0.0);
                }
                Mode::B if nb > 0 => {
                    m[(flat(cutoff, na, nb - 1), flat(cutoff, na, nb))] =
                        Complex64::new((nb as f64).sqrt(), 0.0);
                }
                _ => {}
            }
        }
    }
    m
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|c| c.conj())
}

/// Creation operator of one laboratory mode.
pub fn creation(cutoff: usize, mode: Mode) -> Array2<Complex64> {
    dagger(&annihilation(cutoff, mode))
}

/// Annihilation operator of the mode ε: â_ε = ε_x* â_x + ε_y* â_y.
pub fn mode_annihilation(cutoff: usize, eps: &PolarizationVector) -> Array2<Complex64> {
    let ax = annihilation(cutoff, Mode::A);
    let ay = annihilation(cutoff, Mode::B);
    ax.mapv(|c| c * eps.ex().conj()) + ay.mapv(|c| c * eps.ey().conj())
}

/// Number operator N̂_ε = â_ε† â_ε.
pub fn mode_number(cutoff: usize, eps: &PolarizationVector) -> Array2<Complex64> {
    let a = mode_annihilation(cutoff, eps);
    dagger(&a).dot(&a)
}

/// The four Stokes operators [Ŝ₀, Ŝ₁, Ŝ₂, Ŝ₃] in the laboratory basis:
/// Ŝ₀,₁ = â_x†â_x ± â_y†â_y and Ŝ₂ + iŜ₃ = 2 â_x†â_y.
pub fn stokes(cutoff: usize) -> [Array2<Complex64>; 4] {
    let ax = annihilation(cutoff, Mode::A);
    let ay = annihilation(cutoff, Mode::B);
    let nx = dagger(&ax).dot(&ax);
    let ny = dagger(&ay).dot(&ay);
    let cross = dagger(&ax).dot(&ay); // â_x† â_y
    let cross_dag = dagger(&cross);
    let i = Complex64::I;
    let s2 = &cross + &cross_dag;
    let s3 = (&cross_dag - &cross).mapv(|c| c * i); // −i(â_x†â_y − â_y†â_x)
    [&nx + &ny, &nx - &ny, s2, s3]
}

/// Ŝ_n = Σ_j n_j Ŝ_j for a Poincaré direction n.
pub fn stokes_along(cutoff: usize, n: &PoincareVector) -> Array2<Complex64> {
    let [_, s1, s2, s3] = stokes(cutoff);
    let c = n.components();
    s1.mapv(|v| v * c[0]) + s2.mapv(|v| v * c[1]) + s3.mapv(|v| v * c[2])
}

/// Commutator AB − BA.
pub fn commutator(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    a.dot(b) - b.dot(a)
}

/// State vector flattened to the dense basis.
pub fn flatten_state(state: &TwoModeFockState) -> Array1<Complex64> {
    let cutoff = state.cutoff();
    let mut v = Array1::zeros(dim(cutoff));
    for ((na, nb), &c) in state.amplitudes().indexed_iter() {
        v[flat(cutoff, na, nb)] = c;
    }
    v
}

/// ⟨ψ| Op |ψ⟩ for a flattened pure state.
pub fn expectation(op: &Array2<Complex64>, state: &TwoModeFockState) -> Complex64 {
    let v = flatten_state(state);
    let opv = op.dot(&v);
    v.iter().zip(opv.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Largest elementwise |a − b|.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest |entry| over columns whose basis state has total photon number
/// ≤ `max_total`; used to test operator identities away from the truncation
/// edge, where products of number-conserving operators are exact.
pub fn max_abs_on_sectors(m: &Array2<Complex64>, cutoff: usize, max_total: usize) -> f64 {
    let mut worst = 0.0_f64;
    for na in 0..=cutoff {
        for nb in 0..=cutoff {
            if na + nb > max_total {
                continue;
            }
            let col = flat(cutoff, na, nb);
            for row in 0..dim(cutoff) {
                worst = worst.max(m[(row, col)].norm());
            }
        }
    }
    worst
}
