//! Shared test oracles: a dense multi-photon propagator built on the
//! permanent formula, independent of the sparse substitution engine.

// Each integration-test binary uses its own slice of these helpers.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use telesim_core::{FockBasisState, ModeLabel, ModeMatrix, StateVector};

/// Dense single-photon unitary over an explicit mode universe, with identity
/// on universe modes the element does not touch.
pub struct DenseUnitary {
    pub modes: Vec<ModeLabel>,
    entries: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn embed(element: &ModeMatrix, universe: &[ModeLabel]) -> Self {
        let dim = universe.len();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        let pos = |m: &ModeLabel| universe.iter().position(|u| u == m);
        for r in 0..dim {
            entries[r * dim + r] = Complex64::ONE;
        }
        for (ec, cm) in element.modes().iter().enumerate() {
            let Some(c) = pos(cm) else { continue };
            for r in 0..dim {
                entries[r * dim + c] = Complex64::ZERO;
            }
            for (er, rm) in element.modes().iter().enumerate() {
                if let Some(r) = pos(rm) {
                    entries[r * dim + c] = element.entry(er, ec);
                }
            }
        }
        Self { modes: universe.to_vec(), entries }
    }

    fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.modes.len() + c]
    }

    fn photon_list(&self, basis: &FockBasisState) -> Vec<usize> {
        let mut list = Vec::new();
        for (mode, n) in basis.modes() {
            let idx = self
                .modes
                .iter()
                .position(|m| m == mode)
                .expect("basis mode inside universe");
            for _ in 0..n {
                list.push(idx);
            }
        }
        list
    }

    /// ⟨out| U |in⟩ = Per(U[out|in]) / sqrt(prod n_out! prod n_in!), the
    /// standard multi-photon transition amplitude.
    pub fn transition(&self, out: &FockBasisState, inp: &FockBasisState) -> Complex64 {
        let rows = self.photon_list(out);
        let cols = self.photon_list(inp);
        if rows.len() != cols.len() {
            return Complex64::ZERO;
        }
        let n = rows.len();
        if n == 0 {
            return Complex64::ONE;
        }
        let mut sub = vec![Complex64::ZERO; n * n];
        for (t, &r) in rows.iter().enumerate() {
            for (s, &c) in cols.iter().enumerate() {
                sub[t * n + s] = self.entry(r, c);
            }
        }
        permanent(&sub, n) / (factorial_product(out) * factorial_product(inp)).sqrt()
    }
}

fn factorial_product(basis: &FockBasisState) -> f64 {
    let mut acc = 1.0;
    for (_, n) in basis.modes() {
        for k in 2..=n {
            acc *= k as f64;
        }
    }
    acc
}

/// Permanent by direct permutation sum; fine for the n <= 4 photons the
/// oracle handles.
fn permanent(matrix: &[Complex64], n: usize) -> Complex64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::ZERO;
    loop {
        let mut product = Complex64::ONE;
        for (t, &s) in perm.iter().enumerate() {
            product *= matrix[t * n + s];
        }
        total += product;
        if !next_permutation(&mut perm) {
            return total;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All occupation assignments of `photons` over `modes`.
fn occupations(modes: &[ModeLabel], photons: u32) -> Vec<FockBasisState> {
    fn rec(
        modes: &[ModeLabel],
        left: u32,
        idx: usize,
        current: &mut FockBasisState,
        out: &mut Vec<FockBasisState>,
    ) {
        if idx == modes.len() {
            if left == 0 {
                out.push(current.clone());
            }
            return;
        }
        if idx + 1 == modes.len() {
            out.push(current.with_added(&modes[idx], left));
            return;
        }
        for take in 0..=left {
            let mut next = current.with_added(&modes[idx], take);
            rec(modes, left - take, idx + 1, &mut next, out);
        }
    }
    let mut out = Vec::new();
    rec(modes, photons, 0, &mut FockBasisState::vacuum(), &mut out);
    out
}

/// Dense reference propagation: enumerates the full multi-photon basis per
/// input photon number and sums transition amplitudes. Exponential in modes
/// and photons, so keep it at <= 4 photons over <= 12 modes.
pub fn apply_dense_oracle(element: &ModeMatrix, state: &StateVector) -> StateVector {
    let mut universe: Vec<ModeLabel> = element.modes().to_vec();
    for (basis, _) in state.terms() {
        for (mode, _) in basis.modes() {
            if !universe.contains(mode) {
                universe.push(mode.clone());
            }
        }
    }
    universe.sort();
    let dense = DenseUnitary::embed(element, &universe);

    let mut terms: Vec<(FockBasisState, Complex64)> = Vec::new();
    for (inp, amp) in state.terms() {
        for out in occupations(&universe, inp.total_photons()) {
            let t = dense.transition(&out, inp);
            if t.norm() > 0.0 {
                terms.push((out, amp * t));
            }
        }
    }
    StateVector::from_terms(terms).with_weight(state.weight())
}

/// Largest per-amplitude difference between two states.
pub fn max_amplitude_diff(a: &StateVector, b: &StateVector) -> f64 {
    let mut worst = 0.0f64;
    for (basis, amp) in a.terms() {
        worst = worst.max((amp - b.amplitude(basis)).norm());
    }
    for (basis, amp) in b.terms() {
        worst = worst.max((amp - a.amplitude(basis)).norm());
    }
    worst
}

/// Random unitary over the given modes: Gram-Schmidt on a random complex
/// matrix.
pub fn random_mode_unitary<R: Rng>(modes: Vec<ModeLabel>, rng: &mut R) -> ModeMatrix {
    let dim = modes.len();
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    for c in 0..dim {
        for prev in 0..c {
            let proj: Complex64 = (0..dim).map(|r| cols[prev][r].conj() * cols[c][r]).sum();
            for r in 0..dim {
                let sub = proj * cols[prev][r];
                cols[c][r] -= sub;
            }
        }
        let norm: f64 = cols[c].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..dim {
            cols[c][r] /= norm;
        }
    }
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            entries[r * dim + c] = cols[c][r];
        }
    }
    ModeMatrix::new(modes, entries).expect("orthonormalized columns form a unitary")
}

/// Random normalized state with the given photon number ceiling over a mode
/// set.
pub fn random_state<R: Rng>(modes: &[ModeLabel], max_photons: u32, rng: &mut R) -> StateVector {
    let n_terms = rng.random_range(1..=4usize);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let photons = rng.random_range(1..=max_photons);
        let mut basis = FockBasisState::vacuum();
        for _ in 0..photons {
            let idx = rng.random_range(0..modes.len());
            basis = basis.with_added(&modes[idx], 1);
        }
        terms.push((
            basis,
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ));
    }
    StateVector::from_terms(terms).normalized()
}
