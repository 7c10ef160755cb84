//! Threshold detectors and post-selection on click patterns.
//!
//! A detector watches a set of modes and clicks when at least one photon
//! arrives in any of them. Conditioning a state on a click pattern projects
//! the watched modes away; distinct detected photon-number configurations
//! never re-interfere, so the conditional result is a list of weighted pure
//! branches rather than a density operator over the full Fock space.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::fock::{FockBasisState, ModeLabel, Pol, StateVector};
use crate::qubit::DensityMatrix2;

/// A threshold (non-photon-number-resolving) detector.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    pub id: String,
    pub monitored: BTreeSet<ModeLabel>,
    /// Probability that an arriving photon registers. Circuit builders model
    /// inefficiency with loss elements upstream and leave this at 1; setting
    /// it below 1 applies binomial thinning at click time instead.
    pub efficiency: f64,
    /// Constant dark-click probability per pulse; default 0.
    pub dark_click: f64,
}

impl DetectorSpec {
    pub fn new(id: &str, monitored: BTreeSet<ModeLabel>) -> Result<Self> {
        if monitored.is_empty() {
            return Err(Error::EmptyDetector(id.to_string()));
        }
        Ok(Self { id: id.to_string(), monitored, efficiency: 1.0, dark_click: 0.0 })
    }

    /// Detector watching every (polarization, temporal-bin) mode of a path.
    pub fn for_path(id: &str, path: &str) -> Self {
        let mut monitored = BTreeSet::new();
        for pol in Pol::BOTH {
            for tbin in [0u8, 1u8] {
                monitored.insert(ModeLabel::new(path, pol, tbin));
            }
        }
        Self { id: id.to_string(), monitored, efficiency: 1.0, dark_click: 0.0 }
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Result<Self> {
        self.efficiency = check_range("detector efficiency", efficiency, 0.0, 1.0)?;
        Ok(self)
    }

    pub fn with_dark_click(mut self, dark_click: f64) -> Result<Self> {
        self.dark_click = check_range("dark-click probability", dark_click, 0.0, 1.0)?;
        Ok(self)
    }

    pub fn photons_in(&self, basis: &FockBasisState) -> u32 {
        self.monitored.iter().map(|m| basis.occupation(m)).sum()
    }

    /// Probability that this detector clicks given `n` photons arrived.
    pub fn click_probability(&self, n: u32) -> f64 {
        let miss = (1.0 - self.efficiency).powi(n as i32) * (1.0 - self.dark_click);
        1.0 - miss
    }
}

/// Required click states for a subset of detectors; detectors not listed are
/// unconstrained.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClickPattern {
    required: BTreeMap<String, bool>,
}

impl ClickPattern {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pattern requiring every listed detector to click.
    pub fn all_click(ids: &[&str]) -> Self {
        let mut p = Self::new();
        for id in ids {
            p = p.click(id);
        }
        p
    }

    pub fn click(mut self, id: &str) -> Self {
        self.required.insert(id.to_string(), true);
        self
    }

    pub fn no_click(mut self, id: &str) -> Self {
        self.required.insert(id.to_string(), false);
        self
    }

    pub fn requirements(&self) -> impl Iterator<Item = (&str, bool)> {
        self.required.iter().map(|(id, &c)| (id.as_str(), c))
    }

    pub fn is_empty(&self) -> bool {
        self.required.is_empty()
    }
}

/// Result of post-selection: the pattern probability (relative to the input
/// state's own preparation) and the conditional branches. Branch amplitudes
/// are normalized; branch weights fold in the input weight and the pattern
/// probability, so Σ branch weights = input weight × probability.
#[derive(Debug, Clone)]
pub struct Conditioned {
    pub probability: f64,
    pub branches: Vec<StateVector>,
}

/// Post-selects `state` on a detector click pattern.
///
/// Probability sums |amplitude|² over basis states consistent with the
/// pattern (times per-detector click factors when efficiency < 1 or dark
/// counts are enabled). Watched modes of the pattern's detectors are traced
/// away by projection; terms whose detected photon-number configurations
/// differ land in separate branches and add incoherently.
pub fn condition_on_pattern(
    state: &StateVector,
    pattern: &ClickPattern,
    detectors: &[DetectorSpec],
) -> Result<Conditioned> {
    let by_id: BTreeMap<&str, &DetectorSpec> =
        detectors.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut constrained: Vec<(&DetectorSpec, bool)> = Vec::new();
    for (id, click) in pattern.requirements() {
        let det = by_id
            .get(id)
            .ok_or_else(|| Error::UnknownDetector(id.to_string()))?;
        constrained.push((det, click));
    }
    let watched: BTreeSet<&ModeLabel> = constrained
        .iter()
        .flat_map(|(d, _)| d.monitored.iter())
        .collect();

    // Group surviving terms by their detected photon-number configuration.
    struct Branch {
        factor: f64,
        norm_sqr: f64,
        rest: StateVector,
    }
    let mut groups: BTreeMap<FockBasisState, Branch> = BTreeMap::new();

    for (basis, amp) in state.terms() {
        let (detected, rest) = basis.split(|m| watched.contains(m));
        let mut factor = 1.0;
        for (det, click) in &constrained {
            let n = det.photons_in(&detected);
            let p_click = det.click_probability(n);
            factor *= if *click { p_click } else { 1.0 - p_click };
            if factor == 0.0 {
                break;
            }
        }
        if factor == 0.0 {
            continue;
        }
        let entry = groups.entry(detected).or_insert_with(|| Branch {
            factor,
            norm_sqr: 0.0,
            rest: StateVector::empty(),
        });
        entry.norm_sqr += amp.norm_sqr();
        entry.rest.accumulate(rest, amp);
    }

    let mut probability = 0.0;
    let mut branches = Vec::with_capacity(groups.len());
    for branch in groups.into_values() {
        let p = branch.norm_sqr * branch.factor;
        if p <= 0.0 {
            continue;
        }
        probability += p;
        branches.push(
            branch
                .rest
                .normalized()
                .with_weight(state.weight() * p),
        );
    }
    Ok(Conditioned { probability, branches })
}

/// Sorted '+'-joined ids of the detectors that click (deterministically, with
/// ideal efficiency and no dark counts) on a given basis state; "none" when
/// no detector sees a photon.
pub fn click_signature(basis: &FockBasisState, detectors: &[DetectorSpec]) -> String {
    let mut ids: Vec<&str> = detectors
        .iter()
        .filter(|d| d.photons_in(basis) > 0)
        .map(|d| d.id.as_str())
        .collect();
    ids.sort_unstable();
    if ids.is_empty() {
        "none".to_string()
    } else {
        ids.join("+")
    }
}

/// Probability that exactly one photon occupies `path` (summed over
/// polarization and temporal bin), and the 2x2 polarization density matrix
/// conditioned on that event, tracing out all other modes and the bin.
pub fn reduced_polarization(state: &StateVector, path: &str) -> Result<(f64, DensityMatrix2)> {
    // Coherence survives only within a fixed (environment, temporal-bin)
    // sector; the polarization amplitudes of each sector contribute one
    // projector to the trace.
    let mut groups: BTreeMap<(FockBasisState, u8), [Complex64; 2]> = BTreeMap::new();
    for (basis, amp) in state.terms() {
        if basis.photons_on_path(path) != 1 {
            continue;
        }
        let (on_path, env) = basis.split(|m| m.path == path);
        let mode = on_path
            .modes()
            .next()
            .map(|(m, _)| m.clone())
            .expect("exactly one photon on path");
        let slot = groups.entry((env, mode.tbin)).or_insert([Complex64::ZERO; 2]);
        slot[(mode.pol == Pol::V) as usize] += amp;
    }
    let mut p_single = 0.0;
    let mut acc = [[Complex64::ZERO; 2]; 2];
    for vec2 in groups.values() {
        for (r, vr) in vec2.iter().enumerate() {
            for (c, vc) in vec2.iter().enumerate() {
                acc[r][c] += vr * vc.conj();
            }
            p_single += vr.norm_sqr();
        }
    }
    let total = state.norm_sqr();
    if p_single <= 0.0 || total <= 0.0 {
        return Err(Error::NoSinglePhoton(path.to_string()));
    }
    for row in acc.iter_mut() {
        for e in row.iter_mut() {
            *e /= p_single;
        }
    }
    Ok((p_single / total, DensityMatrix2::new(acc)?))
}

/// Two-path analogue of [`reduced_polarization`]: probability of exactly one
/// photon on each path and the 4x4 two-photon polarization density matrix in
/// the (HH, HV, VH, VV) basis over (path_a, path_b).
pub fn reduced_polarization_pair(
    state: &StateVector,
    path_a: &str,
    path_b: &str,
) -> Result<(f64, [[Complex64; 4]; 4])> {
    if path_a == path_b {
        return Err(Error::DuplicatePath(path_a.to_string()));
    }
    let mut groups: BTreeMap<(FockBasisState, u8, u8), Vec<(usize, Complex64)>> = BTreeMap::new();
    for (basis, amp) in state.terms() {
        if basis.photons_on_path(path_a) != 1 || basis.photons_on_path(path_b) != 1 {
            continue;
        }
        let (on_paths, env) = basis.split(|m| m.path == path_a || m.path == path_b);
        let mut mode_a = None;
        let mut mode_b = None;
        for (m, _) in on_paths.modes() {
            if m.path == path_a {
                mode_a = Some(m.clone());
            } else {
                mode_b = Some(m.clone());
            }
        }
        let (ma, mb) = (mode_a.expect("photon on path_a"), mode_b.expect("photon on path_b"));
        let idx = 2 * (ma.pol == Pol::V) as usize + (mb.pol == Pol::V) as usize;
        groups
            .entry((env, ma.tbin, mb.tbin))
            .or_default()
            .push((idx, amp));
    }
    let mut p_pair = 0.0;
    let mut acc = [[Complex64::ZERO; 4]; 4];
    for comps in groups.values() {
        let mut vec4 = [Complex64::ZERO; 4];
        for (idx, a) in comps {
            vec4[*idx] += a;
        }
        for (r, vr) in vec4.iter().enumerate() {
            for (c, vc) in vec4.iter().enumerate() {
                acc[r][c] += vr * vc.conj();
            }
            p_pair += vr.norm_sqr();
        }
    }
    let total = state.norm_sqr();
    if p_pair <= 0.0 || total <= 0.0 {
        return Err(Error::NoSinglePhoton(path_a.to_string()));
    }
    for row in acc.iter_mut() {
        for e in row.iter_mut() {
            *e /= p_pair;
        }
    }
    Ok((p_pair / total, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::PolarizationQubit;

    #[test]
    fn vacuum_all_silent_has_probability_one() {
        let dets = [DetectorSpec::for_path("f1", "a"), DetectorSpec::for_path("f2", "b")];
        let pattern = ClickPattern::new().no_click("f1").no_click("f2");
        let out = condition_on_pattern(&StateVector::vacuum(), &pattern, &dets).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-15);
        assert_eq!(out.branches.len(), 1);
        assert_eq!(out.branches[0], StateVector::vacuum());
    }

    #[test]
    fn unknown_detector_is_rejected() {
        let dets = [DetectorSpec::for_path("f1", "a")];
        let pattern = ClickPattern::new().click("nope");
        assert!(matches!(
            condition_on_pattern(&StateVector::vacuum(), &pattern, &dets),
            Err(Error::UnknownDetector(_))
        ));
    }

    #[test]
    fn impossible_pattern_returns_zero_probability() {
        let dets = [DetectorSpec::for_path("f1", "a")];
        let pattern = ClickPattern::new().click("f1");
        let out = condition_on_pattern(&StateVector::vacuum(), &pattern, &dets).unwrap();
        assert_eq!(out.probability, 0.0);
        assert!(out.branches.is_empty());
    }

    /// Qubit ⊗ Ψ⁻ through the analyzer splitter, conditioned on an f1-f2
    /// coincidence: probability 1/4 and Bob's photon carries the input qubit.
    #[test]
    fn bell_coincidence_probability_is_one_quarter() {
        let q = PolarizationQubit::from_bloch(1.9, 0.8);
        let s = StateVector::qubit_photon(&q, "1", 0)
            .tensor(&StateVector::psi_minus("2", "3", 0).unwrap())
            .unwrap();
        let bs = crate::elements::beamsplitter("1", "2").unwrap();
        let out = bs.apply(&s);
        let dets = [DetectorSpec::for_path("f1", "1"), DetectorSpec::for_path("f2", "2")];
        let cond =
            condition_on_pattern(&out, &ClickPattern::all_click(&["f1", "f2"]), &dets).unwrap();
        assert!((cond.probability - 0.25).abs() < 1e-12);

        let mut num = [[Complex64::ZERO; 2]; 2];
        let mut den = 0.0;
        for branch in &cond.branches {
            let (p1, rho) = reduced_polarization(branch, "3").unwrap();
            let w = branch.weight() * p1;
            for r in 0..2 {
                for c in 0..2 {
                    num[r][c] += rho.entry(r, c) * w;
                }
            }
            den += w;
        }
        for row in num.iter_mut() {
            for e in row.iter_mut() {
                *e /= den;
            }
        }
        let rho = DensityMatrix2::new(num).unwrap();
        assert!((rho.fidelity(&q) - 1.0).abs() < 1e-9);
    }

    /// Two identically polarized photons in one analyzer port plus two
    /// trigger photons: the coincidence pattern fires with probability 1/2
    /// and leaves zero photons on Bob's path.
    #[test]
    fn double_pair_coincidence_probability_is_half() {
        let two_in_one_port = FockBasisState::vacuum()
            .with_added(&ModeLabel::new("1", Pol::H, 0), 2)
            .with_added(&ModeLabel::new("p", Pol::V, 0), 2);
        let s = StateVector::from_terms([(two_in_one_port, Complex64::ONE)]);
        let bs = crate::elements::beamsplitter("1", "2").unwrap();
        let out = bs.apply(&s);
        let dets = [
            DetectorSpec::for_path("p", "p"),
            DetectorSpec::for_path("f1", "1"),
            DetectorSpec::for_path("f2", "2"),
        ];
        let cond =
            condition_on_pattern(&out, &ClickPattern::all_click(&["p", "f1", "f2"]), &dets)
                .unwrap();
        assert!((cond.probability - 0.5).abs() < 1e-12);
        for branch in &cond.branches {
            for (basis, _) in branch.terms() {
                assert_eq!(basis.photons_on_path("3"), 0);
            }
        }
    }

    /// All 2^K full click patterns are mutually exclusive and exhaustive.
    #[test]
    fn pattern_probabilities_sum_to_one() {
        let q = PolarizationQubit::plus45();
        let s = StateVector::qubit_photon(&q, "1", 0)
            .tensor(&StateVector::psi_minus("2", "3", 0).unwrap())
            .unwrap();
        let bs = crate::elements::beamsplitter("1", "2").unwrap();
        let out = bs.apply(&s);
        let dets = [
            DetectorSpec::for_path("f1", "1"),
            DetectorSpec::for_path("f2", "2"),
            DetectorSpec::for_path("d", "3"),
        ];
        let mut total = 0.0;
        for bits in 0..8u32 {
            let mut pattern = ClickPattern::new();
            for (i, det) in dets.iter().enumerate() {
                pattern = if bits >> i & 1 == 1 {
                    pattern.click(&det.id)
                } else {
                    pattern.no_click(&det.id)
                };
            }
            total += condition_on_pattern(&out, &pattern, &dets).unwrap().probability;
        }
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_polarization_of_pair_member_is_maximally_mixed() {
        let pair = StateVector::psi_minus("2", "3", 0).unwrap();
        for path in ["2", "3"] {
            let (p1, rho) = reduced_polarization(&pair, path).unwrap();
            assert!((p1 - 1.0).abs() < 1e-12);
            for r in 0..2 {
                for c in 0..2 {
                    let expect = if r == c { 0.5 } else { 0.0 };
                    assert!((rho.entry(r, c) - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reduced_polarization_of_pure_photon_is_projector() {
        let q = PolarizationQubit::right_circular();
        let s = StateVector::qubit_photon(&q, "1", 0);
        let (p1, rho) = reduced_polarization(&s, "1").unwrap();
        assert!((p1 - 1.0).abs() < 1e-12);
        assert!((rho.fidelity(&q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_polarization_errors_without_single_photon() {
        assert!(matches!(
            reduced_polarization(&StateVector::vacuum(), "1"),
            Err(Error::NoSinglePhoton(_))
        ));
    }

    #[test]
    fn pair_reduction_recovers_psi_minus() {
        let pair = StateVector::psi_minus("3", "4", 0).unwrap();
        let (p, rho) = reduced_polarization_pair(&pair, "3", "4").unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        // ⟨Ψ⁻|ρ|Ψ⁻⟩ with |Ψ⁻⟩ = (|HV⟩ − |VH⟩)/√2.
        let v = [0.0, core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2, 0.0];
        let mut f = Complex64::ZERO;
        for r in 0..4 {
            for c in 0..4 {
                f += Complex64::new(v[r], 0.0) * rho[r][c] * Complex64::new(v[c], 0.0);
            }
        }
        assert!((f.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dark_click_factor() {
        let det = DetectorSpec::for_path("d", "x").with_dark_click(0.25).unwrap();
        assert!((det.click_probability(0) - 0.25).abs() < 1e-15);
        assert!((det.click_probability(2) - 1.0).abs() < 1e-15);
    }
}
