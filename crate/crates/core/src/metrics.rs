//! Fringe fitting, visibility/fidelity conversion, and the three quality
//! criteria: teleportation fidelity against the 2/3 classical bound,
//! fringe visibility against the 50% classical and 1/√2 Bell thresholds,
//! and cross-talk rejection.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_range, Error, Result};
use crate::experiments::{CrosstalkStats, ExperimentReport};

/// Best average fidelity reachable by measuring the qubit and resending the
/// outcome over a classical channel.
pub const CLASSICAL_FIDELITY_BOUND: f64 = 2.0 / 3.0;

/// Largest fringe visibility any classical correlation can show.
pub const CLASSICAL_VISIBILITY_BOUND: f64 = 0.5;

/// Visibility above which the correlations violate a Bell-type inequality
/// (1/√2, usually quoted as 71%).
pub const BELL_VISIBILITY_THRESHOLD: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Least-squares fit of rate(Θ) = offset · (1 + visibility · cos 2(Θ − phase)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub visibility: f64,
    /// Phase in radians; meaningless when `phase_defined` is false.
    pub phase: f64,
    pub offset: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// False for degenerate (constant) data, where the phase is undefined.
    pub phase_defined: bool,
}

/// Unweighted least-squares fringe fit (exact-mode rates).
pub fn fit_fringe(points: &[(f64, f64)]) -> Result<FringeFit> {
    let weights = alloc::vec![1.0; points.len()];
    fit_fringe_weighted(points, &weights)
}

/// Weighted least-squares fringe fit. Monte Carlo counts should pass Poisson
/// weights 1/max(count, 1).
pub fn fit_fringe_weighted(points: &[(f64, f64)], weights: &[f64]) -> Result<FringeFit> {
    if points.len() < 4 || points.len() != weights.len() {
        return Err(Error::InsufficientData("need at least 4 (theta, rate) points"));
    }
    let span = points
        .iter()
        .map(|p| p.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    if span.1 - span.0 < core::f64::consts::FRAC_PI_2 - 1e-9 {
        return Err(Error::InsufficientData("theta grid spans less than half a period"));
    }

    // Linear model rate = a + b cos2Θ + c sin2Θ; solve the 3x3 normal
    // equations by Gaussian elimination.
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (&(theta, rate), &w) in points.iter().zip(weights) {
        let row = [1.0, (2.0 * theta).cos(), (2.0 * theta).sin()];
        for r in 0..3 {
            for cc in 0..3 {
                ata[r][cc] += w * row[r] * row[cc];
            }
            aty[r] += w * row[r] * rate;
        }
    }
    let coeff = solve3(ata, aty).ok_or(Error::InsufficientData("singular fringe fit"))?;
    let (a, b, cc) = (coeff[0], coeff[1], coeff[2]);

    let mut sq_err = 0.0;
    for &(theta, rate) in points {
        let model = a + b * (2.0 * theta).cos() + cc * (2.0 * theta).sin();
        sq_err += (rate - model) * (rate - model);
    }
    let residual = (sq_err / points.len() as f64).sqrt();

    let amplitude = (b * b + cc * cc).sqrt();
    let scale = points.iter().map(|p| p.1.abs()).fold(0.0f64, f64::max).max(1e-300);
    if amplitude <= 1e-12 * scale || a <= 0.0 {
        return Ok(FringeFit {
            visibility: 0.0,
            phase: 0.0,
            offset: a.max(0.0),
            residual,
            phase_defined: false,
        });
    }
    Ok(FringeFit {
        visibility: (amplitude / a).clamp(0.0, 1.0),
        phase: cc.atan2(b) / 2.0,
        offset: a,
        residual,
        phase_defined: true,
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut y: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        y.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            y[row] -= f * y[col];
        }
    }
    Some([y[0] / m[0][0], y[1] / m[1][1], y[2] / m[2][2]])
}

/// Evaluates a fitted fringe at `theta` (for round trips and plotting).
pub fn fringe_model(fit: &FringeFit, theta: f64) -> f64 {
    fit.offset * (1.0 + fit.visibility * (2.0 * (theta - fit.phase)).cos())
}

/// Werner relation between fringe visibility and the fidelity of the
/// underlying conditional state: F = (1 + V)/2.
pub fn fidelity_from_visibility(v: f64) -> Result<f64> {
    Ok((1.0 + check_range("visibility", v, 0.0, 1.0)?) / 2.0)
}

/// The three criteria evaluated on one experiment report. Threshold
/// comparisons are strict; boundary equality does not count as surpassing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub fidelity: Option<f64>,
    pub beats_classical: bool,
    pub visibility: Option<f64>,
    pub beats_classical_visibility: bool,
    pub bell_violating: bool,
    pub crosstalk_rejection: f64,
    pub efficiency: Option<f64>,
}

pub fn assess(report: &ExperimentReport) -> Assessment {
    let fidelity = report.fidelity;
    let visibility = report.visibility;
    Assessment {
        fidelity,
        beats_classical: fidelity.is_some_and(|f| f > CLASSICAL_FIDELITY_BOUND),
        visibility,
        beats_classical_visibility: visibility.is_some_and(|v| v > CLASSICAL_VISIBILITY_BOUND),
        bell_violating: visibility.is_some_and(|v| v > BELL_VISIBILITY_THRESHOLD),
        crosstalk_rejection: crosstalk_rejection(&report.crosstalk),
        efficiency: report.efficiency,
    }
}

/// 1 − P(spurious triple also fires Bob's detectors)/P(spurious triple);
/// defined as 1 when no spurious triples occur at all.
pub fn crosstalk_rejection(stats: &CrosstalkStats) -> f64 {
    if stats.spurious_threefold_prob <= 0.0 {
        1.0
    } else {
        1.0 - stats.spurious_with_bob_click_prob / stats.spurious_threefold_prob
    }
}
