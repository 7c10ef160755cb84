//! Entanglement swapping: both pairs of the dual-pass source are used whole.
//!
//! Forward-pass pair -> paths 2 (to the Bell analyzer) and 3 (to the ±45°
//! analysis); return-pass pair -> paths 1 (to the Bell analyzer, with no
//! polarizer so the initial entanglement survives) and 4 (through a polarizer
//! at Θ to detector D4). An f1-f2 coincidence projects photons 1 and 2 onto
//! the anti-symmetric state, leaving the never-interacting photons 3 and 4
//! entangled in |Ψ⁻⟩₃₄; the Θ scan of the fourfold rates traces two
//! complementary fringes.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::detect::{condition_on_pattern, ClickPattern, DetectorSpec};
use crate::elements::{beamsplitter, loss, pbs, polarizer, waveplate, WaveplateKind};
use crate::error::{check_range, Error, Result};
use crate::experiments::{
    Circuit, CrosstalkStats, ExperimentKind, ExperimentReport, FringePoint,
};
use crate::metrics::{fit_fringe, FringeFit};
use crate::modemap::ModeMatrix;
use crate::source::{EmissionBranch, PulseSource, SourceConfig};

pub const RETURN_BSM_PATH: &str = "1";
pub const FORWARD_BSM_PATH: &str = "2";
pub const BOB_PATH: &str = "3";
pub const THETA_PATH: &str = "4";
const THETA_SINK: &str = "sink_theta";

/// Configuration of one swapping run.
#[derive(Debug, Clone)]
pub struct SwapConfig {
    /// Polarizer angles for photon 4; must be nonempty.
    pub thetas: Vec<f64>,
    pub source: SourceConfig,
    pub detector_efficiency: BTreeMap<String, f64>,
    pub dark_click: BTreeMap<String, f64>,
}

impl SwapConfig {
    /// Ideal parameters with the default Θ grid: 0 to π in 16 steps.
    pub fn ideal() -> Self {
        Self {
            thetas: default_theta_grid(16),
            source: swap_source(0.1, 0.1, 1.0).expect("defaults are in range"),
            detector_efficiency: BTreeMap::new(),
            dark_click: BTreeMap::new(),
        }
    }

    pub fn with_overlap(mut self, overlap_v: f64) -> Result<Self> {
        self.source = swap_source(self.source.chi_forward, self.source.chi_return, overlap_v)?;
        Ok(self)
    }

    pub fn with_theta_steps(mut self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InsufficientData("theta grid needs at least one step"));
        }
        self.thetas = default_theta_grid(steps);
        Ok(self)
    }
}

/// Θ grid of `steps` points covering [0, π).
pub fn default_theta_grid(steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| i as f64 * core::f64::consts::PI / steps as f64)
        .collect()
}

/// Source wiring for the swapping layout.
pub fn swap_source(chi_forward: f64, chi_return: f64, overlap_v: f64) -> Result<SourceConfig> {
    SourceConfig::new(
        chi_forward,
        chi_return,
        (FORWARD_BSM_PATH, BOB_PATH),
        (RETURN_BSM_PATH, THETA_PATH),
        overlap_v,
    )
}

/// Builds the swap circuit for one polarizer angle.
pub fn build_swap_circuit(cfg: &SwapConfig, theta: f64) -> Result<Circuit> {
    let mut elements: Vec<ModeMatrix> = Vec::new();
    elements.push(beamsplitter(RETURN_BSM_PATH, FORWARD_BSM_PATH)?);

    let eta = |id: &str| cfg.detector_efficiency.get(id).copied().unwrap_or(1.0);
    let add_loss = |elements: &mut Vec<ModeMatrix>, id: &str, path: &str| -> Result<()> {
        let e = check_range("detector efficiency", eta(id), 0.0, 1.0)?;
        if e < 1.0 {
            elements.push(loss(path, e, &alloc::format!("sink_{id}"))?);
        }
        Ok(())
    };
    add_loss(&mut elements, "f1", RETURN_BSM_PATH)?;
    add_loss(&mut elements, "f2", FORWARD_BSM_PATH)?;

    let analysis_start = elements.len();
    // ±45° analysis of photon 3: a half-wave plate at π/8 maps +45° to H,
    // so the D3plus output signals the +45° result.
    elements.push(waveplate(BOB_PATH, WaveplateKind::Half, core::f64::consts::FRAC_PI_8));
    elements.push(pbs(BOB_PATH, "D3plus", "D3minus")?);
    elements.push(polarizer(THETA_PATH, theta, THETA_SINK)?);
    add_loss(&mut elements, "D3plus", "D3plus")?;
    add_loss(&mut elements, "D3minus", "D3minus")?;
    add_loss(&mut elements, "D4", THETA_PATH)?;

    let mut detectors = Vec::new();
    for (id, path) in [
        ("f1", RETURN_BSM_PATH),
        ("f2", FORWARD_BSM_PATH),
        ("D3plus", "D3plus"),
        ("D3minus", "D3minus"),
        ("D4", THETA_PATH),
    ] {
        let dark = cfg.dark_click.get(id).copied().unwrap_or(0.0);
        detectors.push(DetectorSpec::for_path(id, path).with_dark_click(dark)?);
    }

    Ok(Circuit {
        source: PulseSource::new(cfg.source.clone()),
        elements,
        detectors,
        herald: ClickPattern::all_click(&["f1", "f2"]),
        analysis_start,
    })
}

pub fn run_swap_exact(cfg: &SwapConfig) -> Result<ExperimentReport> {
    if cfg.thetas.is_empty() {
        return Err(Error::InsufficientData("theta list is empty"));
    }
    let circuit0 = build_swap_circuit(cfg, cfg.thetas[0])?;
    let branches = circuit0.source.branches();

    // The transmission stage is Θ-independent: herald once, analyze per Θ.
    let mut heralded = Vec::new();
    let mut herald_prob = 0.0;
    let mut efficiency = None;
    for comp in &branches {
        let after_prefix = circuit0.propagate_prefix(&comp.state);
        let cond = condition_on_pattern(&after_prefix, &circuit0.herald, &circuit0.detectors)?;
        herald_prob += comp.probability * cond.probability;
        if comp.branch == EmissionBranch::OnePerPass {
            efficiency = Some(cond.probability);
        }
        heralded.extend(cond.branches);
    }

    let mut vacuum_weight = 0.0;
    for branch in &heralded {
        let p_vac: f64 = branch
            .terms()
            .filter(|(b, _)| b.photons_on_path(BOB_PATH) == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        vacuum_weight += branch.weight() * p_vac;
    }

    // Teleported-qubit fidelity, measured the fourfold way: conditioned on
    // the Bell coincidence and a D4 click behind the polarizer at Θ, photon 3
    // should be orthogonal to the detected Θ polarization. The figure is
    // Θ-independent; the scan is averaged to keep the arithmetic symmetric.
    let mut fid_acc = 0.0;
    let mut fid_count = 0u32;
    for &theta in &cfg.thetas {
        if let Some(f) = conditional_fidelity_at(cfg, &heralded, theta)? {
            fid_acc += f;
            fid_count += 1;
        }
    }
    let fidelity = (fid_count > 0).then(|| fid_acc / fid_count as f64);

    // Θ scan of the two fourfold rates.
    let plus = ClickPattern::all_click(&["D3plus", "D4"]);
    let minus = ClickPattern::all_click(&["D3minus", "D4"]);
    let mut fringe = Vec::with_capacity(cfg.thetas.len());
    for &theta in &cfg.thetas {
        let circuit = build_swap_circuit(cfg, theta)?;
        let mut rate_plus = 0.0;
        let mut rate_minus = 0.0;
        for branch in &heralded {
            let analyzed = circuit.propagate_suffix(branch);
            rate_plus += condition_on_pattern(&analyzed, &plus, &circuit.detectors)?.probability
                * branch.weight();
            rate_minus += condition_on_pattern(&analyzed, &minus, &circuit.detectors)?
                .probability
                * branch.weight();
        }
        fringe.push(FringePoint { theta, rate_plus, rate_minus });
    }

    let visibility = fitted_visibility(&fringe).ok();
    let crosstalk = swap_crosstalk(cfg, &branches)?;
    let bob_vacuum_fraction = if herald_prob > 0.0 { vacuum_weight / herald_prob } else { 0.0 };

    Ok(ExperimentReport {
        kind: ExperimentKind::Swap,
        threefold_prob: herald_prob,
        fourfold_probs: BTreeMap::new(),
        bob_conditional: None,
        fringe: Some(fringe),
        fidelity,
        efficiency,
        visibility,
        crosstalk,
        bob_vacuum_fraction,
        overlap_v: cfg.source.overlap_v,
        input: None,
    })
}

/// ⟨ψ⊥(Θ)|ρ₃|ψ⊥(Θ)⟩ for Bob's photon conditioned on the Bell coincidence
/// plus a D4 click behind the polarizer at Θ. `None` when the fourfold never
/// occurs at this angle.
fn conditional_fidelity_at(
    cfg: &SwapConfig,
    heralded: &[crate::fock::StateVector],
    theta: f64,
) -> Result<Option<f64>> {
    let angle_pol = polarizer(THETA_PATH, theta, THETA_SINK)?;
    let eta_d4 = cfg.detector_efficiency.get("D4").copied().unwrap_or(1.0);
    let d4_loss = (eta_d4 < 1.0).then(|| loss(THETA_PATH, eta_d4, "sink_D4")).transpose()?;
    let dark_d4 = cfg.dark_click.get("D4").copied().unwrap_or(0.0);
    let d4 = DetectorSpec::for_path("D4", THETA_PATH).with_dark_click(dark_d4)?;
    let pattern = ClickPattern::all_click(&["D4"]);
    let target = crate::qubit::PolarizationQubit::linear(theta + core::f64::consts::FRAC_PI_2);

    let mut rho_num = [[Complex64::ZERO; 2]; 2];
    let mut rho_den = 0.0;
    for branch in heralded {
        let mut analyzed = angle_pol.apply(branch);
        if let Some(l) = &d4_loss {
            analyzed = l.apply(&analyzed);
        }
        let cond = condition_on_pattern(&analyzed, &pattern, core::slice::from_ref(&d4))?;
        for sub in &cond.branches {
            match crate::detect::reduced_polarization(sub, BOB_PATH) {
                Ok((p_single, rho)) => {
                    let w = sub.weight() * p_single;
                    for r in 0..2 {
                        for c in 0..2 {
                            rho_num[r][c] += rho.entry(r, c) * w;
                        }
                    }
                    rho_den += w;
                }
                Err(Error::NoSinglePhoton(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if rho_den <= 0.0 {
        return Ok(None);
    }
    let mut entries = rho_num;
    for row in entries.iter_mut() {
        for e in row.iter_mut() {
            *e /= rho_den;
        }
    }
    let rho = crate::qubit::DensityMatrix2::new(entries)?;
    Ok(Some(rho.fidelity(&target)))
}

/// Fits both fringes and returns the mean visibility.
pub fn fitted_visibility(fringe: &[FringePoint]) -> Result<f64> {
    let (plus, minus) = fringe_fits(fringe)?;
    Ok((plus.visibility + minus.visibility) / 2.0)
}

/// A counted fringe point: estimated per-pulse rates plus the raw counts
/// they came from, so fits can weight by the Poisson variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountFringePoint {
    pub theta: f64,
    pub rate_plus: f64,
    pub rate_minus: f64,
    pub counts_plus: u64,
    pub counts_minus: u64,
}

/// Poisson-weighted least-squares visibility from counted fringes (mean of
/// both arms); weight 1/max(n, 1) per point.
pub fn fit_count_fringe(points: &[CountFringePoint]) -> Result<f64> {
    let plus: Vec<(f64, f64)> = points.iter().map(|p| (p.theta, p.rate_plus)).collect();
    let minus: Vec<(f64, f64)> = points.iter().map(|p| (p.theta, p.rate_minus)).collect();
    let w_plus: Vec<f64> = points.iter().map(|p| 1.0 / p.counts_plus.max(1) as f64).collect();
    let w_minus: Vec<f64> = points.iter().map(|p| 1.0 / p.counts_minus.max(1) as f64).collect();
    let fit_plus = crate::metrics::fit_fringe_weighted(&plus, &w_plus)?;
    let fit_minus = crate::metrics::fit_fringe_weighted(&minus, &w_minus)?;
    Ok((fit_plus.visibility + fit_minus.visibility) / 2.0)
}

/// Least-squares fits of the D3plus·D4 and D3minus·D4 curves.
pub fn fringe_fits(fringe: &[FringePoint]) -> Result<(FringeFit, FringeFit)> {
    let plus: Vec<(f64, f64)> = fringe.iter().map(|p| (p.theta, p.rate_plus)).collect();
    let minus: Vec<(f64, f64)> = fringe.iter().map(|p| (p.theta, p.rate_minus)).collect();
    Ok((fit_fringe(&plus)?, fit_fringe(&minus)?))
}

/// Double-return triples (f1·f2·D4 with nothing at Bob's analyzers),
/// evaluated at the first Θ of the grid; the doubled singlet state is
/// rotationally invariant so the angle does not matter.
fn swap_crosstalk(
    cfg: &SwapConfig,
    branches: &[crate::source::EmissionComponent],
) -> Result<CrosstalkStats> {
    let Some(comp) = branches.iter().find(|c| c.branch == EmissionBranch::DoubleReturn) else {
        return Ok(CrosstalkStats::none());
    };
    let circuit = build_swap_circuit(cfg, cfg.thetas[0])?;
    let full = circuit.propagate(&comp.state);
    let triple = ClickPattern::all_click(&["f1", "f2", "D4"]);
    let triple_prob = condition_on_pattern(&full, &triple, &circuit.detectors)?.probability;
    let silent = triple.clone().no_click("D3plus").no_click("D3minus");
    let silent_prob = condition_on_pattern(&full, &silent, &circuit.detectors)?.probability;
    let spurious = comp.probability * triple_prob;
    let with_bob = comp.probability * (triple_prob - silent_prob);
    Ok(CrosstalkStats::new(spurious, with_bob))
}
