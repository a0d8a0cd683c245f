//! Truncated two-mode Fock space.
//!
//! States are complex amplitude grids c[n_a][n_b] over photon numbers of two
//! orthogonal polarization modes, each index running 0..=cutoff. Everything
//! downstream (Stokes moments, squeezing criteria, count distributions) is
//! computed from ladder-operator action on these grids, so the safety story
//! lives here: a state whose probability mass touches the band
//! n_a + n_b > cutoff − 4 is flagged *unsafe for 2nd-order moments* and the
//! moment evaluator refuses it, since ladder factors up to â†²â² reach and
//! weight exactly that band.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polarization::PolarizationVector;

/// Default bound on probability mass in the near-cutoff band.
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-10;

/// Tolerance on state norm after construction or transformation.
pub const NORM_TOL: f64 = 1e-12;

/// Which of the two modes a ladder operator acts on (the first or second
/// grid index, i.e. the first or second label of the [`ModePair`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Orthonormal pair of Jones vectors labelling the two grid axes.
#[derive(Clone, Copy, Debug)]
pub struct ModePair {
    primary: PolarizationVector,
    orthogonal: PolarizationVector,
}

impl ModePair {
    /// Pair from explicit members; must be orthonormal within 1e−12.
    pub fn new(primary: PolarizationVector, orthogonal: PolarizationVector) -> Result<Self> {
        let overlap = primary.inner(&orthogonal).norm();
        if overlap > 1e-12 {
            return Err(Error::NonOrthogonalModes { overlap });
        }
        Ok(Self {
            primary,
            orthogonal,
        })
    }

    /// Pair (ε, ε⊥) generated from one mode by the orthogonal-partner
    /// convention.
    pub fn from_primary(primary: PolarizationVector) -> Self {
        Self {
            orthogonal: primary.orthogonal(),
            primary,
        }
    }

    /// The laboratory (x, y) pair.
    pub fn xy() -> Self {
        Self {
            primary: PolarizationVector::x_linear(),
            orthogonal: PolarizationVector::y_linear(),
        }
    }

    pub fn primary(&self) -> &PolarizationVector {
        &self.primary
    }

    pub fn orthogonal(&self) -> &PolarizationVector {
        &self.orthogonal
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.primary.approx_eq(&other.primary, tol)
            && self.orthogonal.approx_eq(&other.orthogonal, tol)
    }
}

/// Pure state of the two-mode field on the truncated grid.
///
/// Invariants held after every constructor and transformation:
/// norm 1 within [`NORM_TOL`]; `leakage()` is the probability mass on the
/// band n_a + n_b > cutoff − 4, and the state is safe for second-order
/// moments only when that mass is at most the configured tolerance.
#[derive(Clone, Debug)]
pub struct TwoModeFockState {
    cutoff: usize,
    amps: Array2<Complex64>,
    labels: ModePair,
    leakage: f64,
    leakage_tol: f64,
}

impl TwoModeFockState {
    /// Build from an amplitude grid, normalizing; the grid must be square
    /// with side cutoff+1 and must not be identically zero.
    pub fn from_amplitudes(amps: Array2<Complex64>, labels: ModePair) -> Result<Self> {
        Self::from_amplitudes_with_tol(amps, labels, DEFAULT_LEAKAGE_TOL)
    }

    /// As [`from_amplitudes`](Self::from_amplitudes) with an explicit leakage
    /// tolerance.
    pub fn from_amplitudes_with_tol(
        mut amps: Array2<Complex64>,
        labels: ModePair,
        leakage_tol: f64,
    ) -> Result<Self> {
        let (rows, cols) = amps.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NonSquareGrid { rows, cols });
        }
        let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm_sq.sqrt();
        amps.mapv_inplace(|c| c * inv);
        let cutoff = rows - 1;
        let leakage = band_mass(&amps, cutoff);
        Ok(Self {
            cutoff,
            amps,
            labels,
            leakage,
            leakage_tol,
        })
    }

    /// The vacuum |0,0⟩ at the given cutoff.
    pub fn vacuum(cutoff: usize, labels: ModePair) -> Self {
        let mut amps = Array2::zeros((cutoff + 1, cutoff + 1));
        amps[(0, 0)] = Complex64::ONE;
        // The vacuum never reaches the guard band: the band requires
        // n_a + n_b > cutoff.saturating_sub(4) ≥ 0, and the vacuum sits at 0.
        Self {
            cutoff,
            amps,
            labels,
            leakage: 0.0,
            leakage_tol: DEFAULT_LEAKAGE_TOL,
        }
    }

    /// The basis state |n_a, n_b⟩ at the given cutoff.
    pub fn fock(na: usize, nb: usize, cutoff: usize, labels: ModePair) -> Result<Self> {
        if na > cutoff || nb > cutoff {
            return Err(Error::OccupationAboveCutoff { na, nb, cutoff });
        }
        let mut amps = Array2::zeros((cutoff + 1, cutoff + 1));
        amps[(na, nb)] = Complex64::ONE;
        Self::from_amplitudes(amps, labels)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, na: usize, nb: usize) -> Complex64 {
        self.amps[(na, nb)]
    }

    pub fn labels(&self) -> &ModePair {
        &self.labels
    }

    /// Probability mass on the band n_a + n_b > cutoff − 4.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn leakage_tolerance(&self) -> f64 {
        self.leakage_tol
    }

    /// Whether second-order moments of this state are trustworthy.
    pub fn second_moment_safe(&self) -> bool {
        self.leakage <= self.leakage_tol
    }

    /// Rebuild with different mode labels (same amplitudes). Internal: used
    /// by the mode transform, which computes the new amplitudes itself.
    pub(crate) fn relabelled(&self, amps: Array2<Complex64>, labels: ModePair) -> Result<Self> {
        Self::from_amplitudes_with_tol(amps, labels, self.leakage_tol)
    }

    /// ⟨â_a†^p â_a^q â_b†^r â_b^s⟩ by repeated ladder application and inner
    /// product: the bra side receives p and r lowerings, the ket side q and s.
    ///
    /// Refuses any nontrivial moment on a state flagged unsafe; the safety
    /// guarantee covers factors up to second order (p, q, r, s ≤ 2), higher
    /// orders are computed but carry no truncation-error guarantee.
    pub fn normally_ordered_moment(
        &self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
    ) -> Result<Complex64> {
        if p + q + r + s > 0 && !self.second_moment_safe() {
            return Err(Error::UnsafeMoment {
                leakage: self.leakage,
                tolerance: self.leakage_tol,
                p,
                q,
                r,
                s,
            });
        }
        let mut ket = self.amps.clone();
        for _ in 0..q {
            ket = annihilate(&ket, Mode::A);
        }
        for _ in 0..s {
            ket = annihilate(&ket, Mode::B);
        }
        let mut bra = self.amps.clone();
        for _ in 0..p {
            bra = annihilate(&bra, Mode::A);
        }
        for _ in 0..r {
            bra = annihilate(&bra, Mode::B);
        }
        Ok(bra.iter().zip(ket.iter()).map(|(l, k)| l.conj() * k).sum())
    }

    /// Per-sector probabilities p(N) of the total photon number
    /// N = n_a + n_b.
    pub fn sector_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; 2 * self.cutoff + 1];
        for ((na, nb), c) in self.amps.indexed_iter() {
            p[na + nb] += c.norm_sqr();
        }
        p
    }
}

/// â|ψ⟩ for the chosen mode, as a raw (unnormalized) amplitude grid:
/// c'[n − 1] = √n · c[n] along that mode's axis. Vacuum maps to the zero
/// grid.
pub fn apply_annihilation(state: &TwoModeFockState, mode: Mode) -> Array2<Complex64> {
    annihilate(state.amplitudes(), mode)
}

pub(crate) fn annihilate(amps: &Array2<Complex64>, mode: Mode) -> Array2<Complex64> {
    let dim = amps.nrows();
    let mut out = Array2::zeros((dim, dim));
    for ((na, nb), &c) in amps.indexed_iter() {
        if c == Complex64::ZERO {
            continue;
        }
        match mode {
            Mode::A if na > 0 => out[(na - 1, nb)] += (na as f64).sqrt() * c,
            Mode::B if nb > 0 => out[(na, nb - 1)] += (nb as f64).sqrt() * c,
            _ => {}
        }
    }
    out
}

pub(crate) fn grid_norm(amps: &Array2<Complex64>) -> f64 {
    amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn band_mass(amps: &Array2<Complex64>, cutoff: usize) -> f64 {
    let band_above = cutoff.saturating_sub(4);
    let mut mass = 0.0;
    for ((na, nb), c) in amps.indexed_iter() {
        if na + nb > band_above {
            mass += c.norm_sqr();
        }
    }
    mass
}

/// Statistical mixture of pure states sharing cutoff and labels; weights are
/// normalized to sum to 1 at construction.
#[derive(Clone, Debug)]
pub struct StateEnsemble {
    members: Vec<EnsembleMember>,
}

#[derive(Clone, Debug)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: TwoModeFockState,
}

impl StateEnsemble {
    pub fn new(members: Vec<(f64, TwoModeFockState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::BadWeights);
        }
        let total: f64 = members.iter().map(|(w, _)| *w).sum();
        if members.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 || !total.is_finite() {
            return Err(Error::BadWeights);
        }
        let first = &members[0].1;
        let (cutoff, labels) = (first.cutoff(), *first.labels());
        for (_, st) in &members {
            if st.cutoff() != cutoff || !st.labels().approx_eq(&labels, 1e-12) {
                return Err(Error::MixedEnsemble);
            }
        }
        Ok(Self {
            members: members
                .into_iter()
                .map(|(w, state)| EnsembleMember {
                    weight: w / total,
                    state,
                })
                .collect(),
        })
    }

    /// A pure state as a single-member ensemble.
    pub fn pure(state: TwoModeFockState) -> Self {
        Self {
            members: vec![EnsembleMember { weight: 1.0, state }],
        }
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn cutoff(&self) -> usize {
        self.members[0].state.cutoff()
    }

    pub fn labels(&self) -> &ModePair {
        self.members[0].state.labels()
    }

    /// Largest member leakage.
    pub fn leakage(&self) -> f64 {
        self.members
            .iter()
            .map(|m| m.state.leakage())
            .fold(0.0, f64::max)
    }

    pub fn second_moment_safe(&self) -> bool {
        self.members.iter().all(|m| m.state.second_moment_safe())
    }

    /// Weight-averaged normally ordered moment; propagates member rejections.
    pub fn moment(&self, p: usize, q: usize, r: usize, s: usize) -> Result<Complex64> {
        let mut acc = Complex64::ZERO;
        for m in &self.members {
            acc += m.weight * m.state.normally_ordered_moment(p, q, r, s)?;
        }
        Ok(acc)
    }

    /// Apply a state-to-state map to every member, keeping weights.
    pub fn map_states<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&TwoModeFockState) -> Result<TwoModeFockState>,
    {
        let mut members = Vec::with_capacity(self.members.len());
        for m in &self.members {
            members.push((m.weight, f(&m.state)?));
        }
        Self::new(members)
    }
}

/// Weight-averaged normally ordered moment of an ensemble (free-function
/// form of [`StateEnsemble::moment`]).
pub fn ensemble_moment(
    ens: &StateEnsemble,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
) -> Result<Complex64> {
    ens.moment(p, q, r, s)
}
