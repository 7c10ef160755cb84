//! Classical reference strategies: measure-and-resend over a classical
//! channel, and the randomly polarized substitute photon.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detect::{condition_on_pattern, ClickPattern};
use crate::error::Result;
use crate::experiments::swap::{build_swap_circuit, SwapConfig};
use crate::experiments::FringePoint;
use crate::qubit::PolarizationQubit;

/// Expected fidelity of measure-in-basis, resend-the-eigenstate: the photon
/// is measured in {basis, basis⊥} and a fresh photon in the observed
/// eigenstate is sent on. Averaged over the two outcomes this is
/// |⟨b|q⟩|⁴ + |⟨b⊥|q⟩|⁴.
pub fn classical_measure_resend(q: &PolarizationQubit, basis: &PolarizationQubit) -> f64 {
    let p_b = basis.overlap(q).norm_sqr();
    let p_perp = basis.orthogonal().overlap(q).norm_sqr();
    p_b * p_b + p_perp * p_perp
}

/// A qubit drawn uniformly from the Bloch sphere.
pub fn sample_haar_qubit<R: Rng>(rng: &mut R) -> PolarizationQubit {
    let cos_theta = rng.random::<f64>() * 2.0 - 1.0;
    let theta = cos_theta.acos();
    let phi = rng.random::<f64>() * 2.0 * core::f64::consts::PI;
    PolarizationQubit::from_bloch(theta, phi)
}

/// Mean measure-resend fidelity over Haar-random inputs; converges to 2/3,
/// the classical teleportation bound.
pub fn haar_average_fidelity(samples: u64, seed: u64) -> f64 {
    let basis = PolarizationQubit::h();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples.max(1) {
        let q = sample_haar_qubit(&mut rng);
        acc += classical_measure_resend(&q, &basis);
    }
    acc / samples.max(1) as f64
}

/// Θ-scan rates when Bob's conditional photon is replaced by a uniformly
/// random polarization per event. A Haar-random photon passes either output
/// of the ±45° analyzer with probability exactly 1/2, so both curves equal
/// half the f1·f2·D4 flux and carry no Θ dependence beyond it.
pub fn random_photon_baseline(cfg: &SwapConfig) -> Result<Vec<FringePoint>> {
    let circuit0 = build_swap_circuit(cfg, cfg.thetas.first().copied().unwrap_or(0.0))?;
    let branches = circuit0.source.branches();
    let triple = ClickPattern::all_click(&["f1", "f2", "D4"]);
    let mut points = Vec::with_capacity(cfg.thetas.len());
    for &theta in &cfg.thetas {
        let circuit = build_swap_circuit(cfg, theta)?;
        let mut flux = 0.0;
        for comp in &branches {
            let propagated = circuit.propagate(&comp.state);
            flux += comp.probability
                * condition_on_pattern(&propagated, &triple, &circuit.detectors)?.probability;
        }
        points.push(FringePoint { theta, rate_plus: flux / 2.0, rate_minus: flux / 2.0 });
    }
    Ok(points)
}
