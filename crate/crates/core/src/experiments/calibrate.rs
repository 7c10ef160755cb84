//! Bisection of the mode overlap against a measured target.
//!
//! The experiments report fidelity and visibility; the overlap parameter `v`
//! is not directly observable. Both figures are strictly increasing in `v`
//! (F = 1/2 at v = 0 up to 1 at v = 1), so a scalar bisection bridges a
//! reported number back to the distinguishability that produces it.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::experiments::swap::{run_swap_exact, SwapConfig};
use crate::experiments::teleport::{run_teleport_exact, TeleportConfig};

/// Bisection stops when the achieved figure is within this of the target.
pub const CALIBRATION_TOL: f64 = 1e-4;

const MAX_ITERATIONS: u32 = 200;

/// A converged calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub overlap_v: f64,
    pub achieved: f64,
    pub iterations: u32,
}

fn bisect<F: FnMut(f64) -> Result<f64>>(mut eval: F, target: f64) -> Result<Calibration> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if target < f_lo - CALIBRATION_TOL || target > f_hi + CALIBRATION_TOL {
        return Err(Error::CalibrationOutOfReach { target, lo: f_lo, hi: f_hi });
    }
    let mut result = Calibration { overlap_v: 0.5, achieved: f64::NAN, iterations: 0 };
    for iteration in 1..=MAX_ITERATIONS {
        let mid = (lo + hi) / 2.0;
        let value = eval(mid)?;
        result = Calibration { overlap_v: mid, achieved: value, iterations: iteration };
        if (value - target).abs() <= CALIBRATION_TOL {
            return Ok(result);
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(result)
}

/// Finds the overlap whose exact teleportation run reports the target
/// fidelity.
pub fn calibrate_teleport_fidelity(cfg: &TeleportConfig, target: f64) -> Result<Calibration> {
    bisect(
        |v| {
            let run = cfg.clone().with_overlap(v)?;
            run_teleport_exact(&run)?
                .fidelity
                .ok_or(Error::InsufficientData("teleport run reported no fidelity"))
        },
        target,
    )
}

/// Finds the overlap whose exact swapping run shows the target fringe
/// visibility.
pub fn calibrate_swap_visibility(cfg: &SwapConfig, target: f64) -> Result<Calibration> {
    bisect(
        |v| {
            let run = cfg.clone().with_overlap(v)?;
            run_swap_exact(&run)?
                .visibility
                .ok_or(Error::InsufficientData("swap run reported no visibility"))
        },
        target,
    )
}
