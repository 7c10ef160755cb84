//! Polarization qubits and 2x2 density matrices over the (H, V) basis.

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the normalization invariant |α|² + |β|² = 1.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerances on the density-matrix invariants (hermiticity, unit trace,
/// positivity).
pub const DENSITY_TOL: f64 = 1e-10;

/// A normalized two-component complex amplitude pair over (H, V): the qubit
/// carried by a single photon's polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationQubit {
    alpha: Complex64,
    beta: Complex64,
}

impl PolarizationQubit {
    /// Builds a qubit `α|H⟩ + β|V⟩`, rejecting non-normalized amplitudes.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    pub fn h() -> Self {
        Self { alpha: Complex64::ONE, beta: Complex64::ZERO }
    }

    pub fn v() -> Self {
        Self { alpha: Complex64::ZERO, beta: Complex64::ONE }
    }

    /// +45° linear polarization, (|H⟩ + |V⟩)/√2.
    pub fn plus45() -> Self {
        let r = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: r, beta: r }
    }

    /// −45° linear polarization, (|H⟩ − |V⟩)/√2.
    pub fn minus45() -> Self {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: Complex64::new(r, 0.0), beta: Complex64::new(-r, 0.0) }
    }

    /// Right-circular polarization, (|H⟩ + i|V⟩)/√2.
    pub fn right_circular() -> Self {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: Complex64::new(r, 0.0), beta: Complex64::new(0.0, r) }
    }

    /// Linear polarization at `angle` radians from H.
    pub fn linear(angle: f64) -> Self {
        Self {
            alpha: Complex64::new(angle.cos(), 0.0),
            beta: Complex64::new(angle.sin(), 0.0),
        }
    }

    /// Bloch-sphere parameterization cos(θ/2)|H⟩ + e^{iφ} sin(θ/2)|V⟩.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let half = theta / 2.0;
        Self {
            alpha: Complex64::new(half.cos(), 0.0),
            beta: Complex64::from_polar(half.sin(), phi),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// The orthogonal state (⟨ψ⊥|ψ⟩ = 0).
    pub fn orthogonal(&self) -> Self {
        Self { alpha: self.beta.conj(), beta: -self.alpha.conj() }
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }
}

/// A 2x2 polarization density matrix over the (H, V) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    entries: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    /// Validates hermiticity, unit trace and positivity before wrapping.
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        if (entries[0][1] - entries[1][0].conj()).norm() > DENSITY_TOL
            || entries[0][0].im.abs() > DENSITY_TOL
            || entries[1][1].im.abs() > DENSITY_TOL
        {
            return Err(Error::InvalidDensityMatrix("not hermitian"));
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix("trace differs from 1"));
        }
        let rho = Self { entries };
        let (lo, _) = rho.eigenvalues();
        if lo < -DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(rho)
    }

    pub fn from_pure(q: &PolarizationQubit) -> Self {
        let a = q.alpha();
        let b = q.beta();
        Self {
            entries: [
                [a * a.conj(), a * b.conj()],
                [b * a.conj(), b * b.conj()],
            ],
        }
    }

    pub fn maximally_mixed() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self { entries: [[half, Complex64::ZERO], [Complex64::ZERO, half]] }
    }

    /// Normalized mixture Σ wᵢ ρᵢ / Σ wᵢ of weighted parts.
    pub fn mixture<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a DensityMatrix2)>,
    {
        let mut acc = [[Complex64::ZERO; 2]; 2];
        let mut total = 0.0;
        for (w, rho) in parts {
            total += w;
            for r in 0..2 {
                for c in 0..2 {
                    acc[r][c] += rho.entries[r][c] * w;
                }
            }
        }
        if total <= 0.0 {
            return Err(Error::InvalidDensityMatrix("mixture of zero total weight"));
        }
        for row in acc.iter_mut() {
            for e in row.iter_mut() {
                *e /= total;
            }
        }
        Self::new(acc)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    /// Eigenvalues (ascending) of the hermitian matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = (self.entries[0][0].re + self.entries[1][1].re) / 2.0;
        let det = (self.entries[0][0] * self.entries[1][1]
            - self.entries[0][1] * self.entries[1][0])
            .re;
        let gap = (half_tr * half_tr - det).max(0.0).sqrt();
        (half_tr - gap, half_tr + gap)
    }

    /// ⟨q|ρ|q⟩: the probability that a photon in state `ρ` passes a filter for
    /// the pure state `q`.
    pub fn fidelity(&self, q: &PolarizationQubit) -> f64 {
        let a = q.alpha();
        let b = q.beta();
        let ket = [
            self.entries[0][0] * a + self.entries[0][1] * b,
            self.entries[1][0] * a + self.entries[1][1] * b,
        ];
        (a.conj() * ket[0] + b.conj() * ket[1]).re
    }
}
