//! The two experiment circuits (qubit teleportation and entanglement
//! swapping), their exact amplitude-propagation runs, the seeded Monte Carlo
//! counting engine, the classical baselines, and overlap calibration.

mod baseline;
mod calibrate;
mod monte_carlo;
mod swap;
mod teleport;

pub use baseline::{
    classical_measure_resend, haar_average_fidelity, random_photon_baseline, sample_haar_qubit,
};
pub use calibrate::{
    calibrate_swap_visibility, calibrate_teleport_fidelity, Calibration, CALIBRATION_TOL,
};
pub use monte_carlo::{exact_signature_probs, run_monte_carlo, CountTable};
pub use swap::{
    build_swap_circuit, default_theta_grid, fit_count_fringe, fitted_visibility, fringe_fits,
    run_swap_exact, swap_source, CountFringePoint, SwapConfig,
};
pub use teleport::{
    build_teleport_circuit, run_teleport_exact, run_teleport_with_branches, teleport_source,
    InputSetting, TeleportConfig,
};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::detect::{ClickPattern, DetectorSpec};
use crate::fock::StateVector;
use crate::modemap::ModeMatrix;
use crate::qubit::{DensityMatrix2, PolarizationQubit};
use crate::source::PulseSource;

/// An assembled experiment: pulse source, ordered element list, detectors,
/// and the identifying (herald) coincidence pattern.
///
/// Elements before `analysis_start` carry the photons to the Bell analyzer
/// and the herald detectors; elements from `analysis_start` on are the
/// measurement optics on the output arms. The split exists because the
/// conditional output state is extracted between the two stages, and because
/// herald conditioning commutes with the analysis stage (they act on
/// disjoint paths).
#[derive(Debug, Clone)]
pub struct Circuit {
    pub source: PulseSource,
    pub elements: Vec<ModeMatrix>,
    pub detectors: Vec<DetectorSpec>,
    pub herald: ClickPattern,
    pub analysis_start: usize,
}

impl Circuit {
    /// Runs a state through every element in order.
    pub fn propagate(&self, state: &StateVector) -> StateVector {
        self.propagate_suffix(&self.propagate_prefix(state))
    }

    /// Applies the transmission stage only (everything up to the analysis
    /// optics).
    pub fn propagate_prefix(&self, state: &StateVector) -> StateVector {
        let mut s = state.clone();
        for element in &self.elements[..self.analysis_start] {
            s = element.apply(&s);
        }
        s
    }

    /// Applies the analysis stage to an already-transmitted state.
    pub fn propagate_suffix(&self, state: &StateVector) -> StateVector {
        let mut s = state.clone();
        for element in &self.elements[self.analysis_start..] {
            s = element.apply(&s);
        }
        s
    }

    pub fn detector(&self, id: &str) -> Option<&DetectorSpec> {
        self.detectors.iter().find(|d| d.id == id)
    }

    /// Every spatial path the circuit touches (source, elements, detectors).
    pub fn paths(&self) -> alloc::collections::BTreeSet<String> {
        let mut paths = alloc::collections::BTreeSet::new();
        let cfg = self.source.config();
        for p in [
            &cfg.forward_paths.0,
            &cfg.forward_paths.1,
            &cfg.return_paths.0,
            &cfg.return_paths.1,
        ] {
            paths.insert(p.clone());
        }
        for element in &self.elements {
            for mode in element.modes() {
                paths.insert(mode.path.clone());
            }
        }
        for det in &self.detectors {
            for mode in &det.monitored {
                paths.insert(mode.path.clone());
            }
        }
        paths
    }
}

/// Which experiment a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Teleport,
    Swap,
    RandomPhotonBaseline,
}

/// One point of the Θ scan: fourfold rates into the +45 and −45 analyzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringePoint {
    pub theta: f64,
    pub rate_plus: f64,
    pub rate_minus: f64,
}

/// Double-return-pair bookkeeping: how often the spurious emission class
/// fires the identifying coincidence, and how often it also produces a click
/// at Bob's analyzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosstalkStats {
    pub spurious_threefold_prob: f64,
    pub spurious_with_bob_click_prob: f64,
    /// 1 − with_bob/spurious, defined as 1 when no spurious triples occur.
    pub rejection: f64,
}

impl CrosstalkStats {
    pub fn new(spurious_threefold_prob: f64, spurious_with_bob_click_prob: f64) -> Self {
        let rejection = if spurious_threefold_prob <= 0.0 {
            1.0
        } else {
            1.0 - spurious_with_bob_click_prob / spurious_threefold_prob
        };
        Self { spurious_threefold_prob, spurious_with_bob_click_prob, rejection }
    }

    pub fn none() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// Per-run results of an exact experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    /// Identifying coincidence probability per pulse (p·f1·f2 for
    /// teleportation; the f1·f2 Bell coincidence for swapping).
    pub threefold_prob: f64,
    /// Full coincidence probabilities per pulse, keyed by the sorted
    /// '+'-joined detector ids that must click.
    pub fourfold_probs: BTreeMap<String, f64>,
    /// Bob's conditional polarization state (teleportation only).
    pub bob_conditional: Option<DensityMatrix2>,
    /// Θ-scan rates (swapping and the random baseline only).
    pub fringe: Option<Vec<FringePoint>>,
    /// Teleportation: ⟨ψ_in|ρ_Bob|ψ_in⟩ on the fourfold-conditioned state.
    /// Swapping: ⟨Ψ⁻|ρ₃₄|Ψ⁻⟩ on the Bell-coincidence-conditioned pair.
    /// None when the conditioning never succeeds.
    pub fidelity: Option<f64>,
    /// Probability of the identifying coincidence given a valid input
    /// (one pair in each pass, and for teleportation the input photon past
    /// its preparation polarizer). 1/4 for the ideal analyzer.
    pub efficiency: Option<f64>,
    /// Teleportation: analyzer contrast (P(d1) − P(d2))/(P(d1) + P(d2)) of
    /// the fourfold rates. Swapping: mean fitted fringe visibility.
    pub visibility: Option<f64>,
    pub crosstalk: CrosstalkStats,
    /// Fraction of identifying coincidences with no photon in Bob's output
    /// path. Diagnostic only; never enters the fidelity.
    pub bob_vacuum_fraction: f64,
    /// Mode overlap the run used (echoed from the source config).
    pub overlap_v: f64,
    /// The intended input qubit (teleportation only).
    pub input: Option<PolarizationQubit>,
}

impl ExperimentReport {
    #[cfg(test)]
    pub(crate) fn empty_for_tests() -> Self {
        Self {
            kind: ExperimentKind::Teleport,
            threefold_prob: 0.0,
            fourfold_probs: BTreeMap::new(),
            bob_conditional: None,
            fringe: None,
            fidelity: None,
            efficiency: None,
            visibility: None,
            crosstalk: CrosstalkStats::none(),
            bob_vacuum_fraction: 0.0,
            overlap_v: 1.0,
            input: None,
        }
    }
}
