//! Sparse Fock-state algebra over (path, polarization, temporal-bin) modes.
//!
//! `FockBasisState` assigns photon counts to modes; `StateVector` is a sparse
//! complex amplitude map over basis states plus a probability `weight` that
//! conditional states carry through post-selection. Two basis states are
//! equal iff their canonical (ordered) serializations are equal.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::PolarizationQubit;

/// Amplitudes below this magnitude are dropped after each element.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Photon polarization along the laboratory H/V axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const BOTH: [Pol; 2] = [Pol::H, Pol::V];
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}

/// One bosonic mode: spatial path x polarization x temporal bin.
///
/// The derived ordering (path, pol, tbin) fixes the canonical serialization
/// of basis states. Temporal bins model photon distinguishability at the
/// Bell analyzer; only bins 0 and 1 are ever populated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub path: String,
    pub pol: Pol,
    pub tbin: u8,
}

impl ModeLabel {
    pub fn new(path: &str, pol: Pol, tbin: u8) -> Self {
        Self { path: path.to_string(), pol, tbin }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", self.path, self.pol, self.tbin)
    }
}

/// An occupation-number assignment over modes; only nonzero counts are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState {
    occ: BTreeMap<ModeLabel, u32>,
}

impl FockBasisState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Basis state with one photon in each listed mode (repeats accumulate).
    pub fn from_modes(modes: &[ModeLabel]) -> Self {
        let mut s = Self::vacuum();
        for m in modes {
            s.add(m.clone(), 1);
        }
        s
    }

    pub(crate) fn add(&mut self, mode: ModeLabel, n: u32) {
        if n > 0 {
            *self.occ.entry(mode).or_insert(0) += n;
        }
    }

    pub fn with_added(&self, mode: &ModeLabel, n: u32) -> Self {
        let mut s = self.clone();
        s.add(mode.clone(), n);
        s
    }

    pub fn occupation(&self, mode: &ModeLabel) -> u32 {
        self.occ.get(mode).copied().unwrap_or(0)
    }

    pub fn modes(&self) -> impl Iterator<Item = (&ModeLabel, u32)> {
        self.occ.iter().map(|(m, &n)| (m, n))
    }

    pub fn total_photons(&self) -> u32 {
        self.occ.values().sum()
    }

    pub fn photons_on_path(&self, path: &str) -> u32 {
        self.occ
            .iter()
            .filter(|(m, _)| m.path == path)
            .map(|(_, &n)| n)
            .sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.occ.is_empty()
    }

    /// Spatial paths with at least one photon.
    pub fn occupied_paths(&self) -> BTreeSet<&str> {
        self.occ.keys().map(|m| m.path.as_str()).collect()
    }

    /// Splits the occupation into (modes matching `pred`, the rest).
    pub fn split<F: Fn(&ModeLabel) -> bool>(&self, pred: F) -> (Self, Self) {
        let mut hit = Self::vacuum();
        let mut rest = Self::vacuum();
        for (m, &n) in &self.occ {
            if pred(m) {
                hit.add(m.clone(), n);
            } else {
                rest.add(m.clone(), n);
            }
        }
        (hit, rest)
    }

    /// √(Π n!) over all occupied modes: the bosonic factor between the raw
    /// creation-operator monomial and the normalized basis ket.
    pub fn factorial_norm(&self) -> f64 {
        let mut acc = 1.0f64;
        for &n in self.occ.values() {
            for k in 2..=n {
                acc *= k as f64;
            }
        }
        acc.sqrt()
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vacuum() {
            return f.write_str("|vac>");
        }
        f.write_str("|")?;
        for (i, (m, n)) in self.occ.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if *n == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{n}x{m}")?;
            }
        }
        f.write_str(">")
    }
}

/// Sparse complex amplitude map over Fock basis states.
///
/// `weight` is the probability weight a conditional state carries: source
/// emission branches start with their branch probability, post-selection
/// multiplies in the pattern probability, and tensor products multiply
/// weights. Amplitudes of a usable state are normalized to Σ|a|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    terms: BTreeMap<FockBasisState, Complex64>,
    weight: f64,
}

impl StateVector {
    /// The vacuum state (single term, amplitude 1, weight 1).
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(FockBasisState::vacuum(), Complex64::ONE);
        Self { terms, weight: 1.0 }
    }

    /// The zero vector: no terms, weight 0. Returned by post-selection when a
    /// pattern has probability 0.
    pub fn empty() -> Self {
        Self { terms: BTreeMap::new(), weight: 0.0 }
    }

    /// Single photon carrying qubit `q` on `path`: α|H⟩ + β|V⟩ at `tbin`.
    pub fn qubit_photon(q: &PolarizationQubit, path: &str, tbin: u8) -> Self {
        let mut terms = BTreeMap::new();
        for (pol, amp) in [(Pol::H, q.alpha()), (Pol::V, q.beta())] {
            if amp.norm() > 0.0 {
                terms.insert(
                    FockBasisState::from_modes(&[ModeLabel::new(path, pol, tbin)]),
                    amp,
                );
            }
        }
        Self { terms, weight: 1.0 }
    }

    /// The anti-symmetric two-photon state
    /// (|H⟩_a |V⟩_b − |V⟩_a |H⟩_b)/√2 shared between two distinct paths.
    pub fn psi_minus(path_a: &str, path_b: &str, tbin: u8) -> Result<Self> {
        if path_a == path_b {
            return Err(Error::DuplicatePath(path_a.to_string()));
        }
        let r = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut terms = BTreeMap::new();
        terms.insert(
            FockBasisState::from_modes(&[
                ModeLabel::new(path_a, Pol::H, tbin),
                ModeLabel::new(path_b, Pol::V, tbin),
            ]),
            r,
        );
        terms.insert(
            FockBasisState::from_modes(&[
                ModeLabel::new(path_a, Pol::V, tbin),
                ModeLabel::new(path_b, Pol::H, tbin),
            ]),
            -r,
        );
        Ok(Self { terms, weight: 1.0 })
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (FockBasisState, Complex64)>,
    {
        let mut s = Self::empty();
        s.weight = 1.0;
        for (basis, amp) in terms {
            s.accumulate(basis, amp);
        }
        s.prune(PRUNE_THRESHOLD);
        s
    }

    pub(crate) fn accumulate(&mut self, basis: FockBasisState, amp: Complex64) {
        let slot = self.terms.entry(basis).or_insert(Complex64::ZERO);
        *slot += amp;
    }

    pub fn amplitude(&self, basis: &FockBasisState) -> Complex64 {
        self.terms.get(basis).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockBasisState, Complex64)> {
        self.terms.iter().map(|(b, &a)| (b, a))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales amplitudes to Σ|a|² = 1 (no-op on the zero vector).
    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in self.terms.values_mut() {
                *a /= n;
            }
        }
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for a in self.terms.values_mut() {
            *a *= factor;
        }
        self
    }

    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, a| a.norm() >= threshold);
    }

    /// Spatial paths occupied by any term.
    pub fn occupied_paths(&self) -> BTreeSet<String> {
        let mut paths = BTreeSet::new();
        for basis in self.terms.keys() {
            for p in basis.occupied_paths() {
                paths.insert(p.to_string());
            }
        }
        paths
    }

    /// Product state of two factors on disjoint path sets; amplitudes and
    /// weights multiply. Multi-photon occupation of a shared mode is the
    /// pulse source's job, never tensor's.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mine = self.occupied_paths();
        for p in other.occupied_paths() {
            if mine.contains(&p) {
                return Err(Error::OverlappingPaths(p));
            }
        }
        let mut out = Self::empty();
        out.weight = self.weight * other.weight;
        for (b1, a1) in self.terms() {
            for (b2, a2) in other.terms() {
                let mut merged = b1.clone();
                for (m, n) in b2.modes() {
                    merged.add(m.clone(), n);
                }
                out.accumulate(merged, a1 * a2);
            }
        }
        out.prune(PRUNE_THRESHOLD);
        Ok(out)
    }

    /// ⟨self|other⟩ = Σ conj(a₁)·a₂ over shared basis states.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (basis, amp) in self.terms() {
            let other_amp = other.amplitude(basis);
            if other_amp != Complex64::ZERO {
                acc += amp.conj() * other_amp;
            }
        }
        acc
    }
}

/// A polynomial in creation operators: map from the exponent monomial
/// (reusing `FockBasisState` as exponent record) to its coefficient.
/// Applying to vacuum converts monomial coefficients into normalized basis
/// amplitudes via the √(n!) bosonic factors.
#[derive(Debug, Clone, Default)]
pub(crate) struct OperatorSum {
    monomials: BTreeMap<FockBasisState, Complex64>,
}

impl OperatorSum {
    /// The multiplicative identity scaled by `c` (empty monomial).
    pub fn constant(c: Complex64) -> Self {
        let mut monomials = BTreeMap::new();
        monomials.insert(FockBasisState::vacuum(), c);
        Self { monomials }
    }

    /// Σ cⱼ a†ⱼ over the given modes.
    pub fn linear(terms: &[(ModeLabel, Complex64)]) -> Self {
        let mut monomials = BTreeMap::new();
        for (mode, c) in terms {
            if c.norm() > 0.0 {
                let key = FockBasisState::from_modes(core::slice::from_ref(mode));
                *monomials.entry(key).or_insert(Complex64::ZERO) += c;
            }
        }
        Self { monomials }
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for c in self.monomials.values_mut() {
            *c *= factor;
        }
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (m1, c1) in &self.monomials {
            for (m2, c2) in &other.monomials {
                let mut merged = m1.clone();
                for (mode, n) in m2.modes() {
                    merged.add(mode.clone(), n);
                }
                *out.monomials.entry(merged).or_insert(Complex64::ZERO) += c1 * c2;
            }
        }
        out
    }

    /// Multiplies by Σ cⱼ a†ⱼ once.
    pub fn mul_linear(&self, terms: &[(ModeLabel, Complex64)]) -> Self {
        let mut out = Self::default();
        for (mono, coeff) in &self.monomials {
            for (mode, c) in terms {
                if c.norm() == 0.0 {
                    continue;
                }
                let shifted = mono.with_added(mode, 1);
                *out.monomials.entry(shifted).or_insert(Complex64::ZERO) += coeff * c;
            }
        }
        out
    }

    /// Multiplies by (a†_mode)^n without expansion.
    pub fn mul_creation_pow(mut self, mode: &ModeLabel, n: u32) -> Self {
        if n == 0 {
            return self;
        }
        let monomials = core::mem::take(&mut self.monomials);
        self.monomials = monomials
            .into_iter()
            .map(|(mono, c)| (mono.with_added(mode, n), c))
            .collect();
        self
    }

    pub fn sub(mut self, other: &Self) -> Self {
        for (mono, c) in &other.monomials {
            *self.monomials.entry(mono.clone()).or_insert(Complex64::ZERO) -= c;
        }
        self
    }

    /// Applies the operator polynomial to |vac⟩:
    /// Π (a†)^n |vac⟩ = √(Π n!) |n⟩.
    pub fn apply_to_vacuum(&self) -> StateVector {
        let mut out = StateVector::empty();
        out.weight = 1.0;
        for (mono, c) in &self.monomials {
            out.accumulate(mono.clone(), c * mono.factorial_norm());
        }
        out.prune(PRUNE_THRESHOLD);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQ: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn qubit_photon_basis_state() {
        let s = StateVector::qubit_photon(&PolarizationQubit::h(), "1", 0);
        assert_eq!(s.num_terms(), 1);
        let basis = FockBasisState::from_modes(&[ModeLabel::new("1", Pol::H, 0)]);
        assert!(close(s.amplitude(&basis), Complex64::ONE));
    }

    #[test]
    fn qubit_photon_plus45_two_equal_real_terms() {
        let s = StateVector::qubit_photon(&PolarizationQubit::plus45(), "1", 0);
        assert_eq!(s.num_terms(), 2);
        for (_, amp) in s.terms() {
            assert!((amp.re - SQ).abs() < 1e-12 && amp.im == 0.0);
        }
    }

    #[test]
    fn qubit_photon_circular_has_imaginary_v_amplitude() {
        let s = StateVector::qubit_photon(&PolarizationQubit::right_circular(), "1", 0);
        let v = FockBasisState::from_modes(&[ModeLabel::new("1", Pol::V, 0)]);
        let amp = s.amplitude(&v);
        assert!(amp.re.abs() < 1e-15 && (amp.im - SQ).abs() < 1e-12);
    }

    #[test]
    fn psi_minus_amplitudes() {
        let s = StateVector::psi_minus("2", "3", 0).unwrap();
        assert_eq!(s.num_terms(), 2);
        let hv = FockBasisState::from_modes(&[
            ModeLabel::new("2", Pol::H, 0),
            ModeLabel::new("3", Pol::V, 0),
        ]);
        let vh = FockBasisState::from_modes(&[
            ModeLabel::new("2", Pol::V, 0),
            ModeLabel::new("3", Pol::H, 0),
        ]);
        assert!(close(s.amplitude(&hv), Complex64::new(SQ, 0.0)));
        assert!(close(s.amplitude(&vh), Complex64::new(-SQ, 0.0)));
        assert!(close(s.inner(&s), Complex64::ONE));
    }

    #[test]
    fn psi_minus_rejects_identical_paths() {
        assert!(matches!(
            StateVector::psi_minus("2", "2", 0),
            Err(Error::DuplicatePath(_))
        ));
    }

    #[test]
    fn tensor_qubit_with_pair_gives_four_terms() {
        let q = StateVector::qubit_photon(&PolarizationQubit::plus45(), "1", 0);
        let pair = StateVector::psi_minus("2", "3", 0).unwrap();
        let s = q.tensor(&pair).unwrap();
        assert_eq!(s.num_terms(), 4);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for (basis, _) in s.terms() {
            assert_eq!(basis.total_photons(), 3);
        }
    }

    #[test]
    fn tensor_with_vacuum_is_identity() {
        let pair = StateVector::psi_minus("2", "3", 0).unwrap();
        let s = StateVector::vacuum().tensor(&pair).unwrap();
        assert_eq!(s, pair);
    }

    #[test]
    fn tensor_two_pairs_gives_eq5_product() {
        let a = StateVector::psi_minus("1", "4", 0).unwrap();
        let b = StateVector::psi_minus("2", "3", 0).unwrap();
        let s = a.tensor(&b).unwrap();
        assert_eq!(s.num_terms(), 4);
        for (basis, _) in s.terms() {
            assert_eq!(basis.total_photons(), 4);
        }
    }

    #[test]
    fn tensor_rejects_shared_path() {
        let a = StateVector::psi_minus("1", "2", 0).unwrap();
        let b = StateVector::psi_minus("2", "3", 0).unwrap();
        assert!(matches!(a.tensor(&b), Err(Error::OverlappingPaths(_))));
    }

    #[test]
    fn inner_orthogonal_photons_is_zero() {
        let h = StateVector::qubit_photon(&PolarizationQubit::h(), "1", 0);
        let v = StateVector::qubit_photon(&PolarizationQubit::v(), "1", 0);
        assert!(h.inner(&v).norm() < 1e-15);
    }

    /// Projecting the qubit-plus-ancillaries product onto Ψ⁻₁₂ ⊗ ψ₃ leaves
    /// amplitude −1/2: the Bell analyzer succeeds in one of four cases.
    #[test]
    fn inner_projection_amplitude_is_minus_half() {
        for q in [
            PolarizationQubit::h(),
            PolarizationQubit::plus45(),
            PolarizationQubit::right_circular(),
            PolarizationQubit::from_bloch(2.2, 0.4),
        ] {
            let psi123 = StateVector::qubit_photon(&q, "1", 0)
                .tensor(&StateVector::psi_minus("2", "3", 0).unwrap())
                .unwrap();
            let probe = StateVector::psi_minus("1", "2", 0)
                .unwrap()
                .tensor(&StateVector::qubit_photon(&q, "3", 0))
                .unwrap();
            let amp = probe.inner(&psi123);
            assert!(close(amp, Complex64::new(-0.5, 0.0)), "amp = {amp}");
        }
    }

    #[test]
    fn operator_sum_reproduces_bosonic_factors() {
        // (a†)² |vac⟩ = √2 |2⟩
        let mode = ModeLabel::new("x", Pol::H, 0);
        let op = OperatorSum::linear(&[(mode.clone(), Complex64::ONE)]);
        let sq = op.mul(&op);
        let state = sq.apply_to_vacuum();
        let basis = FockBasisState::vacuum().with_added(&mode, 2);
        assert!(close(
            state.amplitude(&basis),
            Complex64::new(core::f64::consts::SQRT_2, 0.0)
        ));
    }
}
