//! The qubit teleportation circuit: dual-pass source, preparation polarizer,
//! beamsplitter Bell analyzer with trigger, and Bob's polarization analysis.
//!
//! Forward-pass pair -> paths 2 (to Alice's analyzer) and 3 (to Bob).
//! Return-pass pair -> paths 1 (through the preparation polarizer, defining
//! the input qubit) and p (the trigger). A p-f1-f2 threefold coincidence
//! heralds the anti-symmetric Bell outcome and projects Bob's photon onto the
//! input state.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::detect::{condition_on_pattern, reduced_polarization, ClickPattern, DetectorSpec};
use crate::elements::{basis_rotator, beamsplitter, loss, pbs, polarizer, waveplate, WaveplateKind};
use crate::error::{check_range, Result};
use crate::experiments::{Circuit, CrosstalkStats, ExperimentKind, ExperimentReport};
use crate::modemap::ModeMatrix;
use crate::qubit::{DensityMatrix2, PolarizationQubit};
use crate::source::{EmissionBranch, EmissionComponent, PulseSource, SourceConfig};

pub const QUBIT_PATH: &str = "1";
pub const ALICE_PATH: &str = "2";
pub const BOB_PATH: &str = "3";
pub const TRIGGER_PATH: &str = "p";
const PREP_SINK: &str = "sink_prep";

/// The demonstrated polarizer settings plus an arbitrary qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSetting {
    H,
    V,
    Plus45,
    Minus45,
    /// Right-circular, prepared with a quarter-wave plate behind the polarizer.
    RightCircular,
    Custom(PolarizationQubit),
}

impl InputSetting {
    /// The five settings demonstrated in the experiment.
    pub fn five_settings() -> [InputSetting; 5] {
        [
            InputSetting::H,
            InputSetting::V,
            InputSetting::Plus45,
            InputSetting::Minus45,
            InputSetting::RightCircular,
        ]
    }

    pub fn qubit(&self) -> PolarizationQubit {
        match self {
            InputSetting::H => PolarizationQubit::h(),
            InputSetting::V => PolarizationQubit::v(),
            InputSetting::Plus45 => PolarizationQubit::plus45(),
            InputSetting::Minus45 => PolarizationQubit::minus45(),
            InputSetting::RightCircular => PolarizationQubit::right_circular(),
            InputSetting::Custom(q) => *q,
        }
    }
}

/// Configuration of one teleportation run.
#[derive(Debug, Clone)]
pub struct TeleportConfig {
    pub input: InputSetting,
    pub source: SourceConfig,
    /// Per-detector efficiencies (missing ids default to 1); modeled as loss
    /// elements in front of the detectors.
    pub detector_efficiency: BTreeMap<String, f64>,
    /// Per-detector dark-click probabilities (missing ids default to 0).
    pub dark_click: BTreeMap<String, f64>,
    /// Bob's analysis basis; `None` analyzes in the basis of the input state.
    pub analysis: Option<PolarizationQubit>,
}

impl TeleportConfig {
    /// Ideal parameters: equal pair amplitudes, full mode overlap, unit
    /// detector efficiency, no dark counts.
    pub fn ideal(input: InputSetting) -> Self {
        Self {
            input,
            source: teleport_source(0.1, 0.1, 1.0).expect("defaults are in range"),
            detector_efficiency: BTreeMap::new(),
            dark_click: BTreeMap::new(),
            analysis: None,
        }
    }

    pub fn with_overlap(mut self, overlap_v: f64) -> Result<Self> {
        self.source =
            teleport_source(self.source.chi_forward, self.source.chi_return, overlap_v)?;
        Ok(self)
    }

    pub fn with_uniform_efficiency(mut self, eta: f64) -> Result<Self> {
        let eta = check_range("detector efficiency", eta, 0.0, 1.0)?;
        for id in ["p", "f1", "f2", "d1", "d2"] {
            self.detector_efficiency.insert(String::from(id), eta);
        }
        Ok(self)
    }
}

/// Source wiring for the teleportation layout.
pub fn teleport_source(chi_forward: f64, chi_return: f64, overlap_v: f64) -> Result<SourceConfig> {
    SourceConfig::new(
        chi_forward,
        chi_return,
        (ALICE_PATH, BOB_PATH),
        (QUBIT_PATH, TRIGGER_PATH),
        overlap_v,
    )
}

fn prep_elements(input: &InputSetting) -> Result<Vec<ModeMatrix>> {
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let at = |angle: f64| polarizer(QUBIT_PATH, angle, PREP_SINK);
    Ok(match input {
        InputSetting::H => alloc::vec![at(0.0)?],
        InputSetting::V => alloc::vec![at(FRAC_PI_2)?],
        InputSetting::Plus45 => alloc::vec![at(FRAC_PI_4)?],
        InputSetting::Minus45 => alloc::vec![at(-FRAC_PI_4)?],
        InputSetting::RightCircular => alloc::vec![
            at(0.0)?,
            waveplate(QUBIT_PATH, WaveplateKind::Quarter, FRAC_PI_4),
        ],
        InputSetting::Custom(q) => alloc::vec![
            at(0.0)?,
            basis_rotator(QUBIT_PATH, q).dagger(),
        ],
    })
}

/// Wave plates sending the analysis basis state to |H⟩ so that the d1 output
/// of the polarizing splitter signals "Bob matches the input".
fn analysis_elements(
    input: &InputSetting,
    analysis: &Option<PolarizationQubit>,
) -> Vec<ModeMatrix> {
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};
    if let Some(q) = analysis {
        return alloc::vec![basis_rotator(BOB_PATH, q)];
    }
    match input {
        InputSetting::H => Vec::new(),
        InputSetting::V => alloc::vec![waveplate(BOB_PATH, WaveplateKind::Half, FRAC_PI_4)],
        InputSetting::Plus45 => alloc::vec![waveplate(BOB_PATH, WaveplateKind::Half, FRAC_PI_8)],
        InputSetting::Minus45 => {
            alloc::vec![waveplate(BOB_PATH, WaveplateKind::Half, -FRAC_PI_8)]
        }
        InputSetting::RightCircular => {
            alloc::vec![waveplate(BOB_PATH, WaveplateKind::Quarter, -FRAC_PI_4)]
        }
        InputSetting::Custom(q) => alloc::vec![basis_rotator(BOB_PATH, q)],
    }
}

pub fn build_teleport_circuit(cfg: &TeleportConfig) -> Result<Circuit> {
    let mut elements = prep_elements(&cfg.input)?;
    elements.push(beamsplitter(QUBIT_PATH, ALICE_PATH)?);

    let eta = |id: &str| cfg.detector_efficiency.get(id).copied().unwrap_or(1.0);
    let add_loss = |elements: &mut Vec<ModeMatrix>, id: &str, path: &str| -> Result<()> {
        let e = check_range("detector efficiency", eta(id), 0.0, 1.0)?;
        if e < 1.0 {
            elements.push(loss(path, e, &alloc::format!("sink_{id}"))?);
        }
        Ok(())
    };
    add_loss(&mut elements, "p", TRIGGER_PATH)?;
    add_loss(&mut elements, "f1", QUBIT_PATH)?;
    add_loss(&mut elements, "f2", ALICE_PATH)?;

    let analysis_start = elements.len();
    elements.extend(analysis_elements(&cfg.input, &cfg.analysis));
    elements.push(pbs(BOB_PATH, "d1", "d2")?);
    add_loss(&mut elements, "d1", "d1")?;
    add_loss(&mut elements, "d2", "d2")?;

    let mut detectors = Vec::new();
    for (id, path) in [
        ("p", TRIGGER_PATH),
        ("f1", QUBIT_PATH),
        ("f2", ALICE_PATH),
        ("d1", "d1"),
        ("d2", "d2"),
    ] {
        let dark = cfg.dark_click.get(id).copied().unwrap_or(0.0);
        detectors.push(DetectorSpec::for_path(id, path).with_dark_click(dark)?);
    }

    Ok(Circuit {
        source: PulseSource::new(cfg.source.clone()),
        elements,
        detectors,
        herald: ClickPattern::all_click(&["p", "f1", "f2"]),
        analysis_start,
    })
}

pub fn run_teleport_exact(cfg: &TeleportConfig) -> Result<ExperimentReport> {
    let circuit = build_teleport_circuit(cfg)?;
    let branches = circuit.source.branches();
    run_teleport_with_branches(cfg, &branches)
}

/// Exact run over an explicit emission-component list. Exposed so the source
/// truncation can be sliced (for example, to show that dropping the
/// double-return class changes nothing about Bob's conditional state).
pub fn run_teleport_with_branches(
    cfg: &TeleportConfig,
    branches: &[EmissionComponent],
) -> Result<ExperimentReport> {
    let circuit = build_teleport_circuit(cfg)?;
    let herald = &circuit.herald;
    let detectors = &circuit.detectors;
    let input_qubit = cfg.input.qubit();

    let mut threefold = 0.0;
    let mut rho_num = [[Complex64::ZERO; 2]; 2];
    let mut rho_den = 0.0;
    let mut vacuum_weight = 0.0;
    let mut fourfold = BTreeMap::new();
    let four_d1 = herald.clone().click("d1");
    let four_d2 = herald.clone().click("d2");
    let mut p4 = [0.0f64; 2];

    for comp in branches {
        let after_prefix = circuit.propagate_prefix(&comp.state);
        let heralded = condition_on_pattern(&after_prefix, herald, detectors)?;
        threefold += comp.probability * heralded.probability;

        for branch in &heralded.branches {
            match reduced_polarization(branch, BOB_PATH) {
                Ok((p_single, rho)) => {
                    let w = branch.weight() * p_single;
                    for r in 0..2 {
                        for c in 0..2 {
                            rho_num[r][c] += rho.entry(r, c) * w;
                        }
                    }
                    rho_den += w;
                }
                Err(crate::error::Error::NoSinglePhoton(_)) => {}
                Err(e) => return Err(e),
            }
            let p_vac: f64 = branch
                .terms()
                .filter(|(b, _)| b.photons_on_path(BOB_PATH) == 0)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            vacuum_weight += branch.weight() * p_vac;
        }

        let full = circuit.propagate_suffix(&after_prefix);
        p4[0] += comp.probability * condition_on_pattern(&full, &four_d1, detectors)?.probability;
        p4[1] += comp.probability * condition_on_pattern(&full, &four_d2, detectors)?.probability;
    }

    fourfold.insert(String::from("d1+f1+f2+p"), p4[0]);
    fourfold.insert(String::from("d2+f1+f2+p"), p4[1]);

    let (bob_conditional, fidelity) = if rho_den > 0.0 {
        let mut entries = rho_num;
        for row in entries.iter_mut() {
            for e in row.iter_mut() {
                *e /= rho_den;
            }
        }
        let rho = DensityMatrix2::new(entries)?;
        let f = rho.fidelity(&input_qubit);
        (Some(rho), Some(f))
    } else {
        (None, None)
    };

    let visibility = (p4[0] + p4[1] > 0.0).then(|| (p4[0] - p4[1]) / (p4[0] + p4[1]));
    let efficiency = teleport_efficiency(&circuit, branches)?;
    let crosstalk = teleport_crosstalk(&circuit, branches)?;
    let bob_vacuum_fraction = if threefold > 0.0 { vacuum_weight / threefold } else { 0.0 };

    Ok(ExperimentReport {
        kind: ExperimentKind::Teleport,
        threefold_prob: threefold,
        fourfold_probs: fourfold,
        bob_conditional,
        fringe: None,
        fidelity,
        efficiency,
        visibility,
        crosstalk,
        bob_vacuum_fraction,
        overlap_v: cfg.source.overlap_v,
        input: Some(input_qubit),
    })
}

/// P(f1·f2 coincidence | one pair in each pass and the input photon past its
/// preparation polarizer). 1/4 for the ideal analyzer, independent of the
/// input setting.
fn teleport_efficiency(
    circuit: &Circuit,
    branches: &[EmissionComponent],
) -> Result<Option<f64>> {
    let Some(comp) = branches.iter().find(|c| c.branch == EmissionBranch::OnePerPass) else {
        return Ok(None);
    };
    let after_prefix = circuit.propagate_prefix(&comp.state);
    let sink_watch = [DetectorSpec::for_path("prep_sink", PREP_SINK)];
    let valid = condition_on_pattern(
        &after_prefix,
        &ClickPattern::new().no_click("prep_sink"),
        &sink_watch,
    )?;
    if valid.probability <= 0.0 {
        return Ok(None);
    }
    let coincidence = ClickPattern::all_click(&["f1", "f2"]);
    let mut p_joint = 0.0;
    for branch in &valid.branches {
        let share = branch.weight() / comp.probability;
        p_joint += share * condition_on_pattern(branch, &coincidence, &circuit.detectors)?.probability;
    }
    Ok(Some(p_joint / valid.probability))
}

/// Spurious p-f1-f2 triples from the double-return-pair class and how often
/// they come with a click at Bob's analyzers.
fn teleport_crosstalk(
    circuit: &Circuit,
    branches: &[EmissionComponent],
) -> Result<CrosstalkStats> {
    let Some(comp) = branches.iter().find(|c| c.branch == EmissionBranch::DoubleReturn) else {
        return Ok(CrosstalkStats::none());
    };
    let full = circuit.propagate_suffix(&circuit.propagate_prefix(&comp.state));
    let herald_prob =
        condition_on_pattern(&full, &circuit.herald, &circuit.detectors)?.probability;
    let silent_bob = circuit.herald.clone().no_click("d1").no_click("d2");
    let silent_prob = condition_on_pattern(&full, &silent_bob, &circuit.detectors)?.probability;
    let spurious = comp.probability * herald_prob;
    let with_bob = comp.probability * (herald_prob - silent_prob);
    Ok(CrosstalkStats::new(spurious, with_bob))
}
