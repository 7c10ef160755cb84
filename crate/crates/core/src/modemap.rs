//! Unitary linear maps on mode subsets and their action on Fock states.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{ModeLabel, OperatorSum, StateVector, PRUNE_THRESHOLD};

/// Tolerance on the unitarity invariant M·M† = I.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A unitary map on an ordered subset of modes. Every optical element is one;
/// modes outside the subset are acted on as identity.
///
/// Convention: `entry(r, c)` is the amplitude with which input mode `c` feeds
/// output mode `r`, i.e. the state map substitutes a†_c → Σ_r entry(r, c) a†_r.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    modes: Vec<ModeLabel>,
    index: BTreeMap<ModeLabel, usize>,
    entries: Vec<Complex64>, // row-major, dim x dim
}

impl ModeMatrix {
    /// Validates that `entries` is a square matrix over distinct `modes` and
    /// unitary within [`UNITARITY_TOL`].
    pub fn new(modes: Vec<ModeLabel>, entries: Vec<Complex64>) -> Result<Self> {
        let dim = modes.len();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { modes: dim, entries: entries.len() });
        }
        let mut index = BTreeMap::new();
        for (i, m) in modes.iter().enumerate() {
            if index.insert(m.clone(), i).is_some() {
                return Err(Error::DuplicatePath(m.path.clone()));
            }
        }
        let matrix = Self { modes, index, entries };
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(matrix)
    }

    pub fn identity(modes: Vec<ModeLabel>) -> Self {
        let dim = modes.len();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::ONE;
        }
        Self::new(modes, entries).expect("identity is unitary")
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// max |(M·M† − I)_{rc}| over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::ZERO;
                for k in 0..dim {
                    acc += self.entry(r, k) * self.entry(c, k).conj();
                }
                let expect = if r == c { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    /// Conjugate transpose (the inverse map).
    pub fn dagger(&self) -> Self {
        let dim = self.dim();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = self.entry(c, r).conj();
            }
        }
        Self::new(self.modes.clone(), entries).expect("dagger of a unitary is unitary")
    }

    fn column(&self, col: usize) -> Vec<(ModeLabel, Complex64)> {
        (0..self.dim())
            .filter_map(|row| {
                let e = self.entry(row, col);
                (e.norm() > 0.0).then(|| (self.modes[row].clone(), e))
            })
            .collect()
    }

    /// Evolves a state by substituting every creation operator:
    /// a†_c → Σ_r entry(r, c) a†_r, with the bosonic √(n!) factors supplied
    /// by the monomial-to-ket conversion. Preserves norm and weight.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        let columns: Vec<Vec<(ModeLabel, Complex64)>> =
            (0..self.dim()).map(|c| self.column(c)).collect();

        let mut out = StateVector::empty().with_weight(state.weight());
        for (basis, amp) in state.terms() {
            let mut poly = OperatorSum::constant(amp / basis.factorial_norm());
            for (mode, n) in basis.modes() {
                match self.index.get(mode) {
                    Some(&col) => {
                        for _ in 0..n {
                            poly = poly.mul_linear(&columns[col]);
                        }
                    }
                    None => {
                        poly = poly.mul_creation_pow(mode, n);
                    }
                }
            }
            for (mono, ket_amp) in poly.apply_to_vacuum().terms() {
                out.accumulate(mono.clone(), ket_amp);
            }
        }
        out.prune(PRUNE_THRESHOLD);
        out
    }
}
