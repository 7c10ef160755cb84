//! Dual-pass pulsed down-conversion source, truncated at two pairs per pulse.
//!
//! A pump pulse has two opportunities to create anti-symmetric photon pairs:
//! one pair on the forward pass (into `forward_paths`) and one on the return
//! pass (into `return_paths`). The emitted state is the coherent superposition
//! of vacuum, one pair per pass, one pair in each pass, and a doubled pair on
//! either pass, with the three-pair-and-up terms dropped (truncation error
//! O(chi^4) in amplitude).
//!
//! Forward-pass photons occupy temporal bin 0; return-pass photons carry the
//! wavepacket √v |t0⟩ + √(1−v) |t1⟩, so the mode overlap `v` sets the
//! two-photon interference visibility at the Bell analyzer.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::fock::{ModeLabel, OperatorSum, Pol, StateVector};

/// Largest pair-creation amplitude the truncation supports: at chi = 0.2 the
/// neglected three-pair amplitude is below 1e-3 relative.
pub const CHI_MAX: f64 = 0.2;

/// Source configuration: pair-creation amplitudes per pass, the paths each
/// pass feeds, and the return-pass mode overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub chi_forward: f64,
    pub chi_return: f64,
    pub forward_paths: (String, String),
    pub return_paths: (String, String),
    pub overlap_v: f64,
}

impl SourceConfig {
    pub fn new(
        chi_forward: f64,
        chi_return: f64,
        forward_paths: (&str, &str),
        return_paths: (&str, &str),
        overlap_v: f64,
    ) -> Result<Self> {
        let cfg = Self {
            chi_forward: check_range("chi_forward", chi_forward, 0.0, CHI_MAX)?,
            chi_return: check_range("chi_return", chi_return, 0.0, CHI_MAX)?,
            forward_paths: (forward_paths.0.to_string(), forward_paths.1.to_string()),
            return_paths: (return_paths.0.to_string(), return_paths.1.to_string()),
            overlap_v: check_range("overlap_v", overlap_v, 0.0, 1.0)?,
        };
        let paths = [
            &cfg.forward_paths.0,
            &cfg.forward_paths.1,
            &cfg.return_paths.0,
            &cfg.return_paths.1,
        ];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if paths[i] == paths[j] {
                    return Err(Error::DuplicatePath(paths[i].clone()));
                }
            }
        }
        Ok(cfg)
    }
}

/// Which emission event a source component describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EmissionBranch {
    Vacuum,
    Forward,
    Return,
    OnePerPass,
    DoubleForward,
    DoubleReturn,
}

impl EmissionBranch {
    pub const ALL: [EmissionBranch; 6] = [
        EmissionBranch::Vacuum,
        EmissionBranch::Forward,
        EmissionBranch::Return,
        EmissionBranch::OnePerPass,
        EmissionBranch::DoubleForward,
        EmissionBranch::DoubleReturn,
    ];

    pub fn pair_count(self) -> u32 {
        match self {
            EmissionBranch::Vacuum => 0,
            EmissionBranch::Forward | EmissionBranch::Return => 1,
            EmissionBranch::OnePerPass
            | EmissionBranch::DoubleForward
            | EmissionBranch::DoubleReturn => 2,
        }
    }
}

/// One component of the truncated pulse state: its emission class, its
/// probability within the pulse, and the normalized state (whose weight is
/// set to that probability). Components with different photon placements
/// never share a Fock basis state, so they add incoherently in every
/// counting statistic and can be propagated one at a time.
#[derive(Debug, Clone)]
pub struct EmissionComponent {
    pub branch: EmissionBranch,
    pub probability: f64,
    pub state: StateVector,
}

/// The dual-pass pulse source.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSource {
    cfg: SourceConfig,
}

impl PulseSource {
    pub fn new(cfg: SourceConfig) -> Self {
        Self { cfg }
    }

    pub fn config(&self) -> &SourceConfig {
        &self.cfg
    }

    /// Pair-creation operator for one pass: (a†_H b†_V − a†_V b†_H)/√2 with
    /// each photon carrying the given temporal wavepacket.
    fn pair_operator(paths: (&str, &str), temporal: &[(u8, f64)]) -> OperatorSum {
        let packet = |path: &str, pol: Pol| -> Vec<(ModeLabel, Complex64)> {
            temporal
                .iter()
                .map(|&(tbin, amp)| (ModeLabel::new(path, pol, tbin), Complex64::new(amp, 0.0)))
                .collect()
        };
        let a_h = OperatorSum::linear(&packet(paths.0, Pol::H));
        let a_v = OperatorSum::linear(&packet(paths.0, Pol::V));
        let b_h = OperatorSum::linear(&packet(paths.1, Pol::H));
        let b_v = OperatorSum::linear(&packet(paths.1, Pol::V));
        a_h.mul(&b_v)
            .sub(&a_v.mul(&b_h))
            .scaled(Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    fn forward_op(&self) -> OperatorSum {
        Self::pair_operator(
            (&self.cfg.forward_paths.0, &self.cfg.forward_paths.1),
            &[(0, 1.0)],
        )
    }

    fn return_op(&self) -> OperatorSum {
        let v = self.cfg.overlap_v;
        Self::pair_operator(
            (&self.cfg.return_paths.0, &self.cfg.return_paths.1),
            &[(0, v.sqrt()), (1, (1.0 - v).sqrt())],
        )
    }

    /// Unnormalized second-order expansion of exp(χf S†_f + χr S†_r)|vac⟩,
    /// one term per emission class.
    fn raw_components(&self) -> Vec<(EmissionBranch, StateVector)> {
        let chi_f = Complex64::new(self.cfg.chi_forward, 0.0);
        let chi_r = Complex64::new(self.cfg.chi_return, 0.0);
        let fwd = self.forward_op();
        let ret = self.return_op();
        let half = Complex64::new(0.5, 0.0);
        let mut parts = alloc::vec![
            (EmissionBranch::Vacuum, StateVector::vacuum()),
            (EmissionBranch::Forward, fwd.apply_to_vacuum().scaled(chi_f)),
            (EmissionBranch::Return, ret.apply_to_vacuum().scaled(chi_r)),
            (
                EmissionBranch::OnePerPass,
                fwd.mul(&ret).apply_to_vacuum().scaled(chi_f * chi_r),
            ),
            (
                EmissionBranch::DoubleForward,
                fwd.mul(&fwd).apply_to_vacuum().scaled(chi_f * chi_f * half),
            ),
            (
                EmissionBranch::DoubleReturn,
                ret.mul(&ret).apply_to_vacuum().scaled(chi_r * chi_r * half),
            ),
        ];
        for (_, s) in parts.iter_mut() {
            s.prune(crate::fock::PRUNE_THRESHOLD);
        }
        parts.retain(|(_, s)| !s.is_empty());
        parts
    }

    /// The emission components with per-pulse probabilities summing to 1.
    pub fn branches(&self) -> Vec<EmissionComponent> {
        let raw = self.raw_components();
        let total: f64 = raw.iter().map(|(_, s)| s.norm_sqr()).sum();
        raw.into_iter()
            .map(|(branch, s)| {
                let probability = s.norm_sqr() / total;
                EmissionComponent {
                    branch,
                    probability,
                    state: s.normalized().with_weight(probability),
                }
            })
            .collect()
    }

    /// The full coherent pulse state: the normalized superposition of all
    /// emission components.
    pub fn state(&self) -> StateVector {
        let raw = self.raw_components();
        let total: f64 = raw.iter().map(|(_, s)| s.norm_sqr()).sum();
        let scale = Complex64::new(1.0 / total.sqrt(), 0.0);
        let mut out = StateVector::empty().with_weight(1.0);
        for (_, part) in raw {
            for (basis, amp) in part.terms() {
                out.accumulate(basis.clone(), amp * scale);
            }
        }
        out.prune(crate::fock::PRUNE_THRESHOLD);
        out
    }
}

/// Convenience wrapper matching the source's role as a state factory.
pub fn spdc_pulse_state(cfg: &SourceConfig) -> StateVector {
    PulseSource::new(cfg.clone()).state()
}
