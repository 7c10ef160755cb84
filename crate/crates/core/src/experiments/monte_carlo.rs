//! Seeded Monte Carlo counting: the statistical counterpart of the exact
//! engine.
//!
//! Each trial draws an emission class from the pulse statistics, then a
//! detector click signature from that class's outcome distribution (photon
//! placements are propagated exactly once per class and cached). Trials use
//! independent ChaCha streams derived from (seed, trial index), so counts are
//! reproducible for a fixed seed and order-independent under any partition of
//! the trial range.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detect::click_signature;
use crate::experiments::Circuit;
use crate::source::EmissionComponent;

/// Accumulated click-signature counts for one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub trials: u64,
    /// Signature ("+"-joined sorted detector ids, or "none") -> count.
    pub counts: BTreeMap<String, u64>,
    pub seed: u64,
    /// Probability mass of the emission classes that were sampled; 1 for
    /// unconditional sampling, the two-pair mass under conditional sampling.
    /// Frequencies estimate per-pulse probabilities divided by this factor.
    pub restriction: f64,
}

impl CountTable {
    pub fn frequency(&self, signature: &str) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.counts.get(signature).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Per-class cached outcome distribution: cumulative probabilities over click
/// signatures.
struct ClassDistribution {
    cumulative: Vec<(f64, String)>,
}

impl ClassDistribution {
    fn sample(&self, u: f64) -> &str {
        let idx = self
            .cumulative
            .partition_point(|(edge, _)| *edge < u)
            .min(self.cumulative.len() - 1);
        &self.cumulative[idx].1
    }
}

fn class_distribution(circuit: &Circuit, comp: &EmissionComponent) -> ClassDistribution {
    let propagated = circuit.propagate(&comp.state);
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();
    for (basis, amp) in propagated.terms() {
        let sig = click_signature(basis, &circuit.detectors);
        *probs.entry(sig).or_insert(0.0) += amp.norm_sqr();
    }
    let total: f64 = probs.values().sum();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for (sig, p) in probs {
        acc += p / total;
        cumulative.push((acc, sig));
    }
    if let Some(last) = cumulative.last_mut() {
        last.0 = 1.0;
    }
    ClassDistribution { cumulative }
}

/// Folds independent dark clicks into a sampled signature.
fn apply_dark_clicks<R: Rng>(signature: &str, circuit: &Circuit, rng: &mut R) -> String {
    let mut ids: Vec<&str> = if signature == "none" {
        Vec::new()
    } else {
        signature.split('+').collect()
    };
    let mut changed = false;
    for det in &circuit.detectors {
        if det.dark_click > 0.0
            && !ids.contains(&det.id.as_str())
            && rng.random::<f64>() < det.dark_click
        {
            ids.push(&det.id);
            changed = true;
        }
    }
    if !changed {
        return String::from(signature);
    }
    ids.sort_unstable();
    ids.join("+")
}

/// Runs `trials` pulses through the circuit, counting click signatures.
///
/// With `conditional_sampling` the emission draw is restricted to classes
/// with at least two pairs (renormalized), making rare fourfold coincidences
/// estimable at desk scale; the restriction factor is recorded in the table.
pub fn run_monte_carlo(
    circuit: &Circuit,
    trials: u64,
    seed: u64,
    conditional_sampling: bool,
) -> CountTable {
    let components: Vec<EmissionComponent> = circuit
        .source
        .branches()
        .into_iter()
        .filter(|c| !conditional_sampling || c.branch.pair_count() >= 2)
        .collect();
    let restriction: f64 = components.iter().map(|c| c.probability).sum();

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    if trials == 0 || components.is_empty() || restriction <= 0.0 {
        return CountTable { trials, counts, seed, restriction: restriction.max(0.0) };
    }

    let distributions: Vec<ClassDistribution> =
        components.iter().map(|c| class_distribution(circuit, c)).collect();
    let mut class_edges = Vec::with_capacity(components.len());
    let mut acc = 0.0;
    for c in &components {
        acc += c.probability / restriction;
        class_edges.push(acc);
    }
    if let Some(last) = class_edges.last_mut() {
        *last = 1.0;
    }
    let has_dark = circuit.detectors.iter().any(|d| d.dark_click > 0.0);

    let base = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut rng = base.clone();
        rng.set_stream(trial);
        let u_class = rng.random::<f64>();
        let class = class_edges
            .partition_point(|edge| *edge < u_class)
            .min(components.len() - 1);
        let signature = distributions[class].sample(rng.random::<f64>());
        let signature = if has_dark {
            apply_dark_clicks(signature, circuit, &mut rng)
        } else {
            String::from(signature)
        };
        *counts.entry(signature).or_insert(0) += 1;
    }
    CountTable { trials, counts, seed, restriction }
}

/// Exact per-signature probabilities for the same sampling scheme: the
/// distribution `run_monte_carlo` frequencies converge to. Dark counts are
/// folded in analytically.
pub fn exact_signature_probs(
    circuit: &Circuit,
    conditional_sampling: bool,
) -> (f64, BTreeMap<String, f64>) {
    let components: Vec<EmissionComponent> = circuit
        .source
        .branches()
        .into_iter()
        .filter(|c| !conditional_sampling || c.branch.pair_count() >= 2)
        .collect();
    let restriction: f64 = components.iter().map(|c| c.probability).sum();
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();
    if restriction <= 0.0 {
        return (0.0, probs);
    }
    for comp in &components {
        let propagated = circuit.propagate(&comp.state);
        let share = comp.probability / restriction;
        for (basis, amp) in propagated.terms() {
            let sig = click_signature(basis, &circuit.detectors);
            *probs.entry(sig).or_insert(0.0) += share * amp.norm_sqr();
        }
    }
    // Guard against amplitude-pruning drift, mirroring the sampler.
    let total: f64 = probs.values().sum();
    for p in probs.values_mut() {
        *p /= total;
    }

    let dark: Vec<&crate::detect::DetectorSpec> =
        circuit.detectors.iter().filter(|d| d.dark_click > 0.0).collect();
    if dark.is_empty() {
        return (restriction, probs);
    }
    let mut mixed: BTreeMap<String, f64> = BTreeMap::new();
    for (sig, p) in &probs {
        let base_ids: Vec<&str> =
            if sig == "none" { Vec::new() } else { sig.split('+').collect() };
        let absent: Vec<&&crate::detect::DetectorSpec> = dark
            .iter()
            .filter(|d| !base_ids.contains(&d.id.as_str()))
            .collect();
        for mask in 0u32..(1 << absent.len()) {
            let mut ids = base_ids.clone();
            let mut weight = *p;
            for (i, det) in absent.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    ids.push(det.id.as_str());
                    weight *= det.dark_click;
                } else {
                    weight *= 1.0 - det.dark_click;
                }
            }
            ids.sort_unstable();
            let key = if ids.is_empty() { String::from("none") } else { ids.join("+") };
            *mixed.entry(key).or_insert(0.0) += weight;
        }
    }
    (restriction, mixed)
}
