//! Achievable rate as a function of UAV position, its path integrals and
//! the single-frame sum rate of the hover-then-fly pattern.

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, QUAD_MAX_DEPTH, QUAD_TOL};
use crate::precoder::{branch_at, check_sensing_feasible, mrt_snr, optimal_snr, target_mrt_snr};
use crate::scenario::ScenarioConfig;

/// Finite-difference step for rate slopes, m.
pub const DERIVATIVE_STEP: f64 = 1e-3;
/// Largest one-sided slope disagreement still treated as differentiable.
pub const KINK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    /// Pure data transmission with MRT toward the user.
    CommOnly,
    /// Sensing window with the optimal beam-gain-constrained precoder.
    Sensing,
}

/// A rate-versus-position function bound to a scenario.
#[derive(Debug, Clone, Copy)]
pub struct RateFunction<'a> {
    pub kind: RateKind,
    pub cfg: &'a ScenarioConfig,
}

impl RateFunction<'_> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.kind {
            RateKind::CommOnly => Ok(rate_comm(x, self.cfg)),
            RateKind::Sensing => rate_sense(x, self.cfg),
        }
    }
}

/// Communication-only rate `log2(1 + gamma0 M P / (x^2 + H^2))`.
///
/// With `literal_comm_rate` set the `M P` array gain is dropped.
pub fn rate_comm(x: f64, cfg: &ScenarioConfig) -> f64 {
    let snr = if cfg.literal_comm_rate { cfg.gamma0() / (x * x + cfg.h * cfg.h) } else { mrt_snr(x, cfg) };
    snr.ln_1p() / std::f64::consts::LN_2
}

/// Rate during a sensing window with the optimal precoder.
pub fn rate_sense(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    Ok(optimal_snr(x, cfg)?.ln_1p() / std::f64::consts::LN_2)
}

/// Rate during a sensing window that uses MRT toward the target.
pub fn rate_target_mrt(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    check_sensing_feasible(x, cfg)?;
    Ok(target_mrt_snr(x, cfg).ln_1p() / std::f64::consts::LN_2)
}

/// Slope of [`rate_sense`] by central differences.
///
/// Within two steps of a branch switch the one-sided slopes are compared and
/// a disagreement larger than [`KINK_TOL`] is reported as an error carrying
/// both values.
pub fn rate_sense_derivative(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    rate_sense_derivative_with_step(x, cfg, DERIVATIVE_STEP)
}

/// [`rate_sense_derivative`] with an explicit step `h`.
pub fn rate_sense_derivative_with_step(x: f64, cfg: &ScenarioConfig, h: f64) -> Result<f64> {
    let left = rate_sense(x - h, cfg)?;
    let mid = rate_sense(x, cfg)?;
    let right = rate_sense(x + h, cfg)?;
    let near_switch = {
        let b = branch_at(x, cfg);
        branch_at(x - 2.0 * h, cfg) != b || branch_at(x + 2.0 * h, cfg) != b
    };
    if near_switch {
        let l = (mid - left) / h;
        let r = (right - mid) / h;
        if (l - r).abs() > KINK_TOL {
            return Err(Error::NonDifferentiablePoint { x, left: l, right: r });
        }
    }
    Ok((right - left) / (2.0 * h))
}

/// Integral of any rate-like function over the interval spanned by `a`, `b`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    adaptive_simpson(f, lo, hi, QUAD_TOL, QUAD_MAX_DEPTH)
}

/// `integral of rate_comm dx` over `[min(a, b), max(a, b)]`.
pub fn integral_rate_over_path(x_a: f64, x_b: f64, cfg: &ScenarioConfig) -> f64 {
    integrate(|x| rate_comm(x, cfg), x_a, x_b)
}

/// Where the frame pattern that senses at `x_r` ends: `max(x_r - (T_f - tau0) V, 0)`.
pub fn frame_end_position(x_r: f64, cfg: &ScenarioConfig) -> f64 {
    (x_r - cfg.frame_travel()).max(0.0)
}

/// Sum rate of one frame that senses at `x_r` for `tau0`, flies toward the
/// user at full speed and hovers wherever the flight ends for the rest of the
/// frame.
pub fn frame_sum_rate(x_r: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let sense = cfg.tau0 * rate_sense(x_r, cfg)?;
    let x_end = frame_end_position(x_r, cfg);
    let travel = x_r - x_end;
    let (flight, flight_time) = if travel > 0.0 {
        (integral_rate_over_path(x_end, x_r, cfg) / cfg.v_max, travel / cfg.v_max)
    } else {
        (0.0, 0.0)
    };
    let hover_time = (cfg.t_frame - cfg.tau0 - flight_time).max(0.0);
    Ok(sense + flight + hover_time * rate_comm(x_end, cfg))
}
