//! Jones and Poincaré geometry.
//!
//! A polarization mode is a complex unit 2-vector ε (Jones vector); its image
//! on the Poincaré sphere is the real unit 3-vector m with
//! m₁ = |ε_x|² − |ε_y|², m₂ + i m₃ = 2 ε_x* ε_y. Measurement directions n on
//! the sphere are built from polar angles (θ, Φ) with the S₁ axis as pole:
//! n = (cos θ, sin θ cos Φ, sin θ sin Φ).
//!
//! The sphere angle between two Jones vectors is twice their Hilbert-space
//! angle, so ⟨ε̄|ε⟩ with |cos(Φ/2)| = |⟨ε̄|ε⟩| corresponds to cos Φ = n·m.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on unit-norm constraints for Jones and Poincaré vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Complex unit 2-vector (ε_x, ε_y) labelling a polarization mode.
///
/// Construction enforces unit norm, so a value of this type is always a valid
/// mode; use [`PolarizationVector::normalized`] to build from unnormalized
/// amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationVector {
    ex: Complex64,
    ey: Complex64,
}

impl PolarizationVector {
    /// Build from components, requiring |ex|² + |ey|² = 1 within [`UNIT_TOL`].
    pub fn new(ex: Complex64, ey: Complex64) -> Result<Self> {
        let norm_sq = ex.norm_sqr() + ey.norm_sqr();
        if (norm_sq - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitJones { norm_sq });
        }
        Ok(Self { ex, ey })
    }

    /// Build from arbitrary nonzero components, normalizing.
    pub fn normalized(ex: Complex64, ey: Complex64) -> Result<Self> {
        let norm = (ex.norm_sqr() + ey.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            ex: ex / norm,
            ey: ey / norm,
        })
    }

    /// Horizontal (x-linear) mode, ε = (1, 0).
    pub fn x_linear() -> Self {
        Self {
            ex: Complex64::ONE,
            ey: Complex64::ZERO,
        }
    }

    /// Vertical (y-linear) mode, ε = (0, 1).
    pub fn y_linear() -> Self {
        Self {
            ex: Complex64::ZERO,
            ey: Complex64::ONE,
        }
    }

    pub fn ex(&self) -> Complex64 {
        self.ex
    }

    pub fn ey(&self) -> Complex64 {
        self.ey
    }

    /// Hermitian inner product ε* · other (linear in `other`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.ex.conj() * other.ex + self.ey.conj() * other.ey
    }

    /// The orthogonal partner mode, ε⊥ with ε* · ε⊥ = 0.
    ///
    /// Phase convention: for ε = (cos(θ₀/2), sin(θ₀/2) e^{iΦ₀}) this returns
    /// (−sin(θ₀/2), cos(θ₀/2) e^{iΦ₀}); the generalization to arbitrary unit
    /// vectors is ε⊥ = (−(|ε_y|/|ε_x|) ε_x, (|ε_x|/|ε_y|) ε_y), with the
    /// degenerate axes handled so that (1,0) ↦ (0,1) and (0,e^{iφ}) ↦ (−1,0).
    pub fn orthogonal(&self) -> Self {
        let ax = self.ex.norm();
        let ay = self.ey.norm();
        if ay <= UNIT_TOL {
            // ε ∝ e_x: partner is e_y carrying ε_x's phase.
            Self {
                ex: Complex64::ZERO,
                ey: self.ex / ax,
            }
        } else if ax <= UNIT_TOL {
            // ε ∝ e_y: θ₀ = π in the convention above.
            Self {
                ex: -Complex64::ONE,
                ey: Complex64::ZERO,
            }
        } else {
            Self {
                ex: -(self.ex / ax) * ay,
                ey: (self.ey / ay) * ax,
            }
        }
    }

    /// Componentwise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.ex - other.ex).norm() <= tol && (self.ey - other.ey).norm() <= tol
    }
}

/// Real unit 3-vector on the Poincaré sphere: a polarization image m or a
/// measurement direction n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoincareVector {
    m: [f64; 3],
}

/// Alias used where the vector plays the role of a tested direction.
pub type PoincareDirection = PoincareVector;

impl PoincareVector {
    /// Build from components, requiring unit norm within [`UNIT_TOL`].
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let norm = (m1 * m1 + m2 * m2 + m3 * m3).sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitPoincare { norm });
        }
        Ok(Self { m: [m1, m2, m3] })
    }

    /// Build from an arbitrary nonzero vector, normalizing.
    pub fn normalized(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let norm = (m1 * m1 + m2 * m2 + m3 * m3).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            m: [m1 / norm, m2 / norm, m3 / norm],
        })
    }

    pub fn components(&self) -> [f64; 3] {
        self.m
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.m[0] * other.m[0] + self.m[1] * other.m[1] + self.m[2] * other.m[2]
    }

    pub fn cross(&self, other: &Self) -> [f64; 3] {
        let a = &self.m;
        let b = &other.m;
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
}

/// Jones vector from sphere angles: ε = (cos(θ₀/2), sin(θ₀/2) e^{iΦ₀}).
pub fn jones_from_angles(theta0: f64, phi0: f64) -> PolarizationVector {
    let half = 0.5 * theta0;
    PolarizationVector {
        ex: Complex64::new(half.cos(), 0.0),
        ey: Complex64::from_polar(half.sin(), phi0),
    }
}

/// Poincaré image of a Jones vector: m₁ = |ε_x|²−|ε_y|², m₂+i m₃ = 2 ε_x*ε_y.
pub fn poincare_from_jones(eps: &PolarizationVector) -> PoincareVector {
    let m1 = eps.ex.norm_sqr() - eps.ey.norm_sqr();
    let cross = eps.ex.conj() * eps.ey;
    // Unit norm is automatic for a unit Jones vector; normalize away the
    // last-digit float dust so downstream dot products stay clamped.
    PoincareVector::normalized(m1, 2.0 * cross.re, 2.0 * cross.im)
        .expect("unit Jones vector has unit Poincare image")
}

/// Measurement direction from sphere angles:
/// n = (cos θ, sin θ cos Φ, sin θ sin Φ).
pub fn direction_from_angles(theta: f64, phi: f64) -> PoincareDirection {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    PoincareVector {
        m: [ct, st * cp, st * sp],
    }
}

/// Sphere angles (θ ∈ [0, π], φ ∈ [0, 2π)) of a direction, the inverse of
/// [`direction_from_angles`] up to the azimuth degeneracy at the poles.
pub fn angles_from_direction(n: &PoincareVector) -> (f64, f64) {
    let [m1, m2, m3] = n.m;
    let theta = m1.clamp(-1.0, 1.0).acos();
    let mut phi = m3.atan2(m2);
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    if phi >= 2.0 * std::f64::consts::PI {
        phi = 0.0;
    }
    (theta, phi)
}

/// cos Φ for the angle Φ ∈ [0, π] between a direction n and a polarization
/// image m: the clamped dot product n·m.
pub fn cos_big_phi(n: &PoincareVector, m: &PoincareVector) -> f64 {
    n.dot(m).clamp(-1.0, 1.0)
}
