//! Optical elements as unitary mode matrices.
//!
//! Lossy components (polarizers, detector inefficiency) are modeled
//! unitarily by routing the rejected amplitude to sink paths that no detector
//! ever watches, so one evolution mechanism serves every element.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::fock::{ModeLabel, Pol};
use crate::modemap::ModeMatrix;

/// The two temporal bins every polarization element acts on identically.
pub const TBINS: [u8; 2] = [0, 1];

/// Half- or quarter-wave retarder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Assembles a block-diagonal matrix applying the same `block` to each group
/// of modes in turn.
fn block_diagonal(groups: &[Vec<ModeLabel>], block: &[Complex64]) -> ModeMatrix {
    let bd = groups.first().map(|g| g.len()).unwrap_or(0);
    assert_eq!(block.len(), bd * bd);
    let modes: Vec<ModeLabel> = groups.iter().flatten().cloned().collect();
    let dim = modes.len();
    let mut entries = alloc::vec![Complex64::ZERO; dim * dim];
    for b in 0..groups.len() {
        for r in 0..bd {
            for col in 0..bd {
                entries[(b * bd + r) * dim + (b * bd + col)] = block[r * bd + col];
            }
        }
    }
    ModeMatrix::new(modes, entries).expect("element blocks are unitary")
}

/// Groups covering every (polarization, temporal-bin) pair of the given paths.
fn submode_groups(paths: &[&str]) -> Vec<Vec<ModeLabel>> {
    let mut groups = Vec::new();
    for pol in Pol::BOTH {
        for tbin in TBINS {
            groups.push(paths.iter().map(|p| ModeLabel::new(p, pol, tbin)).collect());
        }
    }
    groups
}

/// Symmetric 50/50 beamsplitter: transmission 1/√2, reflection i/√2, acting
/// identically on every (polarization, temporal-bin) sub-mode pair.
pub fn beamsplitter(port_a: &str, port_b: &str) -> Result<ModeMatrix> {
    if port_a == port_b {
        return Err(Error::DuplicatePath(port_a.to_string()));
    }
    let t = c(core::f64::consts::FRAC_1_SQRT_2);
    let r = Complex64::new(0.0, core::f64::consts::FRAC_1_SQRT_2);
    Ok(block_diagonal(&submode_groups(&[port_a, port_b]), &[t, r, r, t]))
}

/// Wave plate with fast axis at `angle` radians from H, applied per temporal
/// bin on one path. Jones matrices: R(θ)·diag(1, −1)·R(−θ) for half-wave,
/// R(θ)·diag(1, −i)·R(−θ) for quarter-wave (so a quarter-wave plate at π/4
/// turns |H⟩ into the right-circular state (|H⟩ + i|V⟩)/√2 up to phase).
pub fn waveplate(path: &str, kind: WaveplateKind, angle: f64) -> ModeMatrix {
    let retard = match kind {
        WaveplateKind::Half => c(-1.0),
        WaveplateKind::Quarter => Complex64::new(0.0, -1.0),
    };
    let jones = rotated_diag(angle, Complex64::ONE, retard);
    polarization_map(path, jones)
}

/// Arbitrary polarization unitary on one path sending the qubit `basis` to
/// |H⟩ (and its orthogonal complement to |V⟩); the general analysis rotator.
pub fn basis_rotator(path: &str, basis: &crate::qubit::PolarizationQubit) -> ModeMatrix {
    let a = basis.alpha();
    let b = basis.beta();
    polarization_map(path, [[a.conj(), b.conj()], [-b, a]])
}

/// 2x2 polarization unitary replicated over the temporal bins of `path`.
fn polarization_map(path: &str, jones: [[Complex64; 2]; 2]) -> ModeMatrix {
    let block = [jones[0][0], jones[0][1], jones[1][0], jones[1][1]];
    let groups: Vec<Vec<ModeLabel>> = TBINS
        .iter()
        .map(|&tbin| {
            alloc::vec![
                ModeLabel::new(path, Pol::H, tbin),
                ModeLabel::new(path, Pol::V, tbin),
            ]
        })
        .collect();
    block_diagonal(&groups, &block)
}

fn rotated_diag(angle: f64, d0: Complex64, d1: Complex64) -> [[Complex64; 2]; 2] {
    let (s, co) = angle.sin_cos();
    let (s, co) = (c(s), c(co));
    // R(θ) diag(d0, d1) R(−θ)
    [
        [co * co * d0 + s * s * d1, co * s * (d0 - d1)],
        [co * s * (d0 - d1), s * s * d0 + co * co * d1],
    ]
}

/// Polarizing beamsplitter: H modes of `path_in` route to `path_out_h`,
/// V modes to `path_out_v`. Completed to a unitary by the reverse swaps,
/// which is harmless as long as the output paths start in vacuum.
pub fn pbs(path_in: &str, path_out_h: &str, path_out_v: &str) -> Result<ModeMatrix> {
    let paths = [path_in, path_out_h, path_out_v];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if paths[i] == paths[j] {
                return Err(Error::DuplicatePath(paths[i].to_string()));
            }
        }
    }
    let mut modes = Vec::new();
    let mut pairs = Vec::new();
    for tbin in TBINS {
        let in_h = ModeLabel::new(path_in, Pol::H, tbin);
        let in_v = ModeLabel::new(path_in, Pol::V, tbin);
        let out_h = ModeLabel::new(path_out_h, Pol::H, tbin);
        let out_v = ModeLabel::new(path_out_v, Pol::V, tbin);
        pairs.push((in_h.clone(), out_h.clone()));
        pairs.push((in_v.clone(), out_v.clone()));
        modes.extend([in_h, in_v, out_h, out_v]);
    }
    let dim = modes.len();
    let mut entries = alloc::vec![Complex64::ZERO; dim * dim];
    let pos = |m: &ModeLabel| modes.iter().position(|x| x == m).unwrap();
    for i in 0..dim {
        entries[i * dim + i] = Complex64::ONE;
    }
    for (a, b) in &pairs {
        let (ia, ib) = (pos(a), pos(b));
        entries[ia * dim + ia] = Complex64::ZERO;
        entries[ib * dim + ib] = Complex64::ZERO;
        entries[ia * dim + ib] = Complex64::ONE;
        entries[ib * dim + ia] = Complex64::ONE;
    }
    ModeMatrix::new(modes, entries)
}

/// Linear polarizer at `angle`: the component along the pass axis stays in
/// `path`, the orthogonal component routes to `sink`. Unitary on
/// {path, sink}; acts as a lossy projector once the sink goes unmonitored.
pub fn polarizer(path: &str, angle: f64, sink: &str) -> Result<ModeMatrix> {
    if path == sink {
        return Err(Error::DuplicatePath(path.to_string()));
    }
    let (s, co) = angle.sin_cos();
    // Basis change B: columns are the pass axis |θ⟩ and its complement |θ⊥⟩.
    let b = [[c(co), c(-s)], [c(s), c(co)]];
    // In the rotated basis over (path_θ, path_θ⊥, sink_θ, sink_θ⊥):
    // pass stays, reject swaps with the sink's reject slot.
    let mut p = [[Complex64::ZERO; 4]; 4];
    p[0][0] = Complex64::ONE;
    p[3][1] = Complex64::ONE;
    p[1][3] = Complex64::ONE;
    p[2][2] = Complex64::ONE;
    // M = (B ⊕ B) · P · (B ⊕ B)†
    let bb = |r: usize, col: usize| -> Complex64 {
        if r / 2 == col / 2 {
            b[r % 2][col % 2]
        } else {
            Complex64::ZERO
        }
    };
    let mut block = [[Complex64::ZERO; 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            let mut acc = Complex64::ZERO;
            for k in 0..4 {
                for l in 0..4 {
                    acc += bb(r, k) * p[k][l] * bb(col, l).conj();
                }
            }
            block[r][col] = acc;
        }
    }
    let flat: Vec<Complex64> = block.iter().flatten().copied().collect();
    // The polarizer block couples both polarizations, so it repeats per
    // temporal bin rather than per (pol, tbin) pair.
    let groups: Vec<Vec<ModeLabel>> = TBINS
        .iter()
        .map(|&tbin| {
            alloc::vec![
                ModeLabel::new(path, Pol::H, tbin),
                ModeLabel::new(path, Pol::V, tbin),
                ModeLabel::new(sink, Pol::H, tbin),
                ModeLabel::new(sink, Pol::V, tbin),
            ]
        })
        .collect();
    Ok(block_diagonal(&groups, &flat))
}

/// Loss channel: amplitude √eta stays on `path`, √(1−eta) routes to `sink`.
/// Detector efficiency is this beamsplitter to an unmonitored sink.
pub fn loss(path: &str, eta: f64, sink: &str) -> Result<ModeMatrix> {
    if path == sink {
        return Err(Error::DuplicatePath(path.to_string()));
    }
    let eta = check_range("loss transmission", eta, 0.0, 1.0)?;
    let t = c(eta.sqrt());
    let r = c((1.0 - eta).sqrt());
    Ok(block_diagonal(&submode_groups(&[path, sink]), &[t, -r, r, t]))
}
