//! The two comparison schemes: a UAV that senses at the start of every frame,
//! flies toward the user for the first half-frame and back toward the target
//! for the second, with either MRT toward the target or the optimal precoder
//! during sensing.

use std::fmt;

use crate::error::{Error, Result};
use crate::precoder::check_sensing_feasible;
use crate::scenario::ScenarioConfig;
use crate::trajectory::{Mode, Policy, Segment, Trajectory, POSITION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkScheme {
    /// MRT toward the target while sensing, MRT toward the user otherwise.
    TimeDivision,
    /// The optimal sensing precoder on the oscillating trajectory.
    PrecoderOnly,
}

impl BenchmarkScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkScheme::TimeDivision => "TIME_DIVISION",
            BenchmarkScheme::PrecoderOnly => "PRECODER_ONLY",
        }
    }

    fn sense_policy(self) -> Policy {
        match self {
            BenchmarkScheme::TimeDivision => Policy::MrtTarget,
            BenchmarkScheme::PrecoderOnly => Policy::Optimal,
        }
    }
}

impl fmt::Display for BenchmarkScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPlan {
    pub trajectory: Trajectory,
    /// The oscillation does not end at `x_F`; the endpoint constraint is not
    /// enforced for these baselines.
    pub ignores_final_location: bool,
}

/// Appends a leg that moves toward `goal` at full speed for `duration`,
/// hovering once the goal is reached.
fn leg(segments: &mut Vec<Segment>, t0: f64, x0: f64, goal: f64, duration: f64, cfg: &ScenarioConfig) -> f64 {
    if duration <= 0.0 {
        return x0;
    }
    let dist = (goal - x0).abs();
    let (fly_time, x1) = if cfg.v_max <= 0.0 {
        (0.0, x0)
    } else if dist <= cfg.v_max * duration {
        (dist / cfg.v_max, goal)
    } else {
        (duration, x0 + (goal - x0).signum() * cfg.v_max * duration)
    };
    if fly_time > 0.0 {
        segments.push(Segment {
            t_start: t0,
            t_end: t0 + fly_time,
            x_start: x0,
            x_end: x1,
            mode: Mode::Fly,
            policy: Policy::MrtUser,
        });
    }
    if duration - fly_time > 0.0 {
        segments.push(Segment {
            t_start: t0 + fly_time,
            t_end: t0 + duration,
            x_start: x1,
            x_end: x1,
            mode: Mode::Hover,
            policy: Policy::MrtUser,
        });
    }
    x1
}

/// Builds the oscillating baseline trajectory for `scheme`.
///
/// Every frame: sense for `tau0` wherever the UAV is, fly toward the user
/// until mid-frame, then toward the target until the frame ends. The UAV
/// pauses while sensing, as in the proposed scheme.
pub fn plan_benchmark(cfg: &ScenarioConfig, scheme: BenchmarkScheme) -> Result<BenchmarkPlan> {
    if !(0.0..=cfg.d).contains(&cfg.x_init) {
        return Err(Error::InvalidEndpoints(format!("x_I = {} m lies outside [0, {}]", cfg.x_init, cfg.d)));
    }
    let mut segments = Vec::new();
    let mut x = cfg.x_init;
    for l in 0..cfg.frame_count() {
        let t0 = l as f64 * cfg.t_frame;
        let mid = t0 + 0.5 * cfg.t_frame;
        let t1 = t0 + cfg.t_frame;
        check_sensing_feasible(x, cfg)?;
        segments.push(Segment {
            t_start: t0,
            t_end: t0 + cfg.tau0,
            x_start: x,
            x_end: x,
            mode: Mode::Sense,
            policy: scheme.sense_policy(),
        });
        let t_out = t0 + cfg.tau0;
        x = leg(&mut segments, t_out, x, 0.0, mid - t_out, cfg);
        let t_back = mid.max(t_out);
        x = leg(&mut segments, t_back, x, cfg.d, t1 - t_back, cfg);
        if let Some(last) = segments.last_mut() {
            last.t_end = t1;
        }
    }
    let ignores_final_location = (x - cfg.x_final).abs() > POSITION_TOL;
    Ok(BenchmarkPlan { trajectory: Trajectory { segments, cfg: *cfg }, ignores_final_location })
}
