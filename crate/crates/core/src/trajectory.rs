//! Trajectories made of fly/hover/sense segments: the optimal single-frame
//! pattern, its time-mirrored expansion over the mission, the planner that
//! honours the initial and final positions, evaluation and feasibility
//! checking.

use std::fmt;

use log::debug;

use crate::channel::{sensing_margin, sensing_region};
use crate::error::{Error, Result};
use crate::numeric::{grid_golden_max, Maximum, GOLDEN_TOL, SEARCH_STEP};
use crate::precoder::{branch_at, is_sensing_feasible, Branch};
use crate::rate::{
    frame_end_position, frame_sum_rate, integral_rate_over_path, integrate, rate_comm, rate_sense,
    rate_sense_derivative_with_step, rate_target_mrt, DERIVATIVE_STEP,
};
use crate::scenario::ScenarioConfig;

/// Position tolerance used by the checkers, m.
pub const POSITION_TOL: f64 = 1e-6;
/// Time tolerance used by the checkers, s.
pub const TIME_TOL: f64 = 1e-9;

/// Segments shorter than this are dropped while building trajectories.
const MIN_SEGMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Fly,
    Hover,
    Sense,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fly => "FLY",
            Mode::Hover => "HOVER",
            Mode::Sense => "SENSE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "FLY" => Some(Mode::Fly),
            "HOVER" => Some(Mode::Hover),
            "SENSE" => Some(Mode::Sense),
            _ => None,
        }
    }
}

/// Precoder used while a segment is flown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Beam-gain-constrained optimum during sensing, MRT to the user otherwise.
    Optimal,
    MrtUser,
    MrtTarget,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Optimal => "OPTIMAL",
            Policy::MrtUser => "MRT_USER",
            Policy::MrtTarget => "MRT_TARGET",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "OPTIMAL" => Some(Policy::Optimal),
            "MRT_USER" => Some(Policy::MrtUser),
            "MRT_TARGET" => Some(Policy::MrtTarget),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub mode: Mode,
    pub policy: Policy,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn position_at(&self, t: f64) -> f64 {
        let dur = self.duration();
        if dur <= 0.0 {
            return self.x_end;
        }
        let s = ((t - self.t_start) / dur).clamp(0.0, 1.0);
        self.x_start + s * (self.x_end - self.x_start)
    }

    /// The same segment played backwards inside the window
    /// `[origin, origin + span]`.
    fn mirrored(&self, origin: f64, span: f64) -> Segment {
        Segment {
            t_start: origin + (span - (self.t_end - origin)),
            t_end: origin + (span - (self.t_start - origin)),
            x_start: self.x_end,
            x_end: self.x_start,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub cfg: ScenarioConfig,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.t_start)
    }

    pub fn end_time(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t_end)
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Position at time `t`, clamped to the covered span.
    pub fn position_at(&self, t: f64) -> f64 {
        let segs = &self.segments;
        if segs.is_empty() {
            return f64::NAN;
        }
        let idx = segs.partition_point(|s| s.t_end < t).min(segs.len() - 1);
        segs[idx].position_at(t)
    }

    pub fn sensing_locations(&self) -> Vec<f64> {
        self.segments.iter().filter(|s| s.mode == Mode::Sense).map(|s| s.x_start).collect()
    }

    /// Serializes to the `t_start,t_end,x_start,x_end,mode,policy` CSV form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_start,t_end,x_start,x_end,mode,policy\n");
        for s in &self.segments {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{:.6},{},{}\n",
                s.t_start,
                s.t_end,
                s.x_start,
                s.x_end,
                s.mode.as_str(),
                s.policy.as_str()
            ));
        }
        out
    }

    pub fn from_csv(text: &str, cfg: ScenarioConfig) -> Result<Trajectory> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "t_start,t_end,x_start,x_end,mode,policy")) => {}
            _ => return Err(Error::Parse { line: 1, message: "missing trajectory header".into() }),
        }
        let mut segments = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse { line: idx + 1, message: m.to_string() };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(bad("expected 6 columns"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            segments.push(Segment {
                t_start: num(cols[0])?,
                t_end: num(cols[1])?,
                x_start: num(cols[2])?,
                x_end: num(cols[3])?,
                mode: Mode::parse(cols[4]).ok_or_else(|| bad("bad mode"))?,
                policy: Policy::parse(cols[5]).ok_or_else(|| bad("bad policy"))?,
            });
        }
        Ok(Trajectory { segments, cfg })
    }
}

/// Builder that appends time-contiguous segments and drops empty ones.
struct SegmentWriter {
    segments: Vec<Segment>,
    t: f64,
    x: f64,
}

impl SegmentWriter {
    fn new(t: f64, x: f64) -> Self {
        Self { segments: Vec::new(), t, x }
    }

    fn push(&mut self, mode: Mode, policy: Policy, duration: f64, x_to: f64) {
        if duration <= MIN_SEGMENT {
            self.x = x_to;
            return;
        }
        let seg = Segment { t_start: self.t, t_end: self.t + duration, x_start: self.x, x_end: x_to, mode, policy };
        self.t = seg.t_end;
        self.x = x_to;
        self.segments.push(seg);
    }

    fn fly(&mut self, to: f64, v: f64) {
        let dist = (to - self.x).abs();
        if dist <= MIN_SEGMENT {
            return;
        }
        self.push(Mode::Fly, Policy::MrtUser, dist / v, to);
    }

    fn hover(&mut self, duration: f64) {
        let x = self.x;
        self.push(Mode::Hover, Policy::MrtUser, duration, x);
    }

    fn sense(&mut self, duration: f64, policy: Policy) {
        let x = self.x;
        self.push(Mode::Sense, policy, duration, x);
    }

    /// Pins the final segment end to `t_end`, absorbing rounding.
    fn finish(mut self, t_end: f64) -> Vec<Segment> {
        if let Some(last) = self.segments.last_mut() {
            debug_assert!((last.t_end - t_end).abs() < 1e-6, "{} vs {}", last.t_end, t_end);
            last.t_end = t_end;
        }
        self.segments
    }
}

/// Sense at `x_r`, fly toward the user at full speed, hover for what is left.
fn hover_fly_segments(x_r: f64, t0: f64, cfg: &ScenarioConfig) -> Vec<Segment> {
    let mut w = SegmentWriter::new(t0, x_r);
    w.sense(cfg.tau0, Policy::Optimal);
    let x_end = frame_end_position(x_r, cfg);
    let fly_time = if cfg.v_max > 0.0 { (x_r - x_end) / cfg.v_max } else { 0.0 };
    w.fly(x_end, cfg.v_max);
    w.hover(cfg.t_frame - cfg.tau0 - fly_time);
    w.finish(t0 + cfg.t_frame)
}

fn mirror_frame(segments: &[Segment], origin: f64, span: f64) -> Vec<Segment> {
    segments.iter().rev().map(|s| s.mirrored(origin, span)).collect()
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct RatePerformance {
    /// Time-averaged achievable rate, bits/s/Hz.
    pub avg_rate: f64,
    /// Sum rate collected in each frame, bits/Hz.
    pub per_frame: Vec<f64>,
    pub sensing_locations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Check segment invariants before integrating.
    pub validate: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { validate: true }
    }
}

pub fn evaluate(traj: &Trajectory) -> Result<RatePerformance> {
    evaluate_with(traj, EvalOptions::default())
}

/// Rate of a SENSE segment's precoder at `x`; `None` when the beam-gain threshold cannot be met.
fn sensing_rate(policy: Policy, x: f64, cfg: &ScenarioConfig) -> Option<f64> {
    match policy {
        Policy::Optimal => rate_sense(x, cfg).ok(),
        Policy::MrtTarget => rate_target_mrt(x, cfg).ok(),
        Policy::MrtUser => {
            (is_sensing_feasible(x, cfg) && branch_at(x, cfg) == Branch::MrtUser).then(|| rate_comm(x, cfg))
        }
    }
}

fn moving_rate(policy: Policy, x: f64, cfg: &ScenarioConfig) -> f64 {
    match policy {
        Policy::MrtTarget => crate::precoder::target_mrt_snr(x, cfg).ln_1p() / std::f64::consts::LN_2,
        Policy::Optimal | Policy::MrtUser => rate_comm(x, cfg),
    }
}

/// Rate collected over a constant-velocity piece from `(t0, x0)` to `(t1, x1)`.
fn piece_sum(policy: Policy, t0: f64, t1: f64, x0: f64, x1: f64, cfg: &ScenarioConfig) -> f64 {
    let dt = t1 - t0;
    if dt <= 0.0 {
        return 0.0;
    }
    let dx = (x1 - x0).abs();
    if dx <= MIN_SEGMENT {
        return dt * moving_rate(policy, x0, cfg);
    }
    let speed = dx / dt;
    if policy == Policy::MrtTarget {
        integrate(|x| moving_rate(policy, x, cfg), x0, x1) / speed
    } else {
        integral_rate_over_path(x0, x1, cfg) / speed
    }
}

fn segment_invariants(traj: &Trajectory) -> Result<()> {
    let cfg = &traj.cfg;
    for (i, s) in traj.segments.iter().enumerate() {
        let bad = |m: String| Err(Error::InvariantViolation { index: i, message: m });
        if s.duration() < -TIME_TOL || !s.duration().is_finite() {
            return bad(format!("negative duration {}", s.duration()));
        }
        if i > 0 {
            let prev = &traj.segments[i - 1];
            if (prev.t_end - s.t_start).abs() > TIME_TOL {
                return bad(format!("time gap {} -> {}", prev.t_end, s.t_start));
            }
            if (prev.x_end - s.x_start).abs() > POSITION_TOL {
                return bad(format!("position jump {} -> {}", prev.x_end, s.x_start));
            }
        }
        let dist = (s.x_end - s.x_start).abs();
        if dist > cfg.v_max * s.duration() + 1e-9 + 1e-12 * dist {
            return bad(format!("speed {} m/s exceeds {}", dist / s.duration(), cfg.v_max));
        }
        if s.mode != Mode::Fly && dist > POSITION_TOL {
            return bad(format!("{} segment moves {dist} m", s.mode.as_str()));
        }
        if s.mode == Mode::Sense && (s.duration() - cfg.tau0).abs() > TIME_TOL {
            return bad(format!("sensing lasts {} s, expected {}", s.duration(), cfg.tau0));
        }
    }
    Ok(())
}

/// Integrates the user's rate along the trajectory.
///
/// SENSE segments use the rate of their tagged precoder; FLY and HOVER
/// segments use MRT toward the user (or toward the target when tagged so).
/// `per_frame` splits the total at multiples of `T_f` from the start time.
pub fn evaluate_with(traj: &Trajectory, opts: EvalOptions) -> Result<RatePerformance> {
    let cfg = &traj.cfg;
    if opts.validate {
        segment_invariants(traj)?;
    }
    let origin = traj.start_time();
    let frames = ((traj.duration() / cfg.t_frame) - 1e-9).ceil().max(1.0) as usize;
    let mut per_frame = vec![0.0; frames];

    for (i, s) in traj.segments.iter().enumerate() {
        if s.mode == Mode::Sense {
            let rate = match sensing_rate(s.policy, s.x_start, cfg) {
                Some(r) => r,
                None if opts.validate => return Err(Error::SensingConstraintViolation { index: i }),
                None => 0.0,
            };
            let k = frame_of(s.t_start + 0.5 * s.duration(), origin, cfg.t_frame, frames);
            per_frame[k] += rate * s.duration();
            continue;
        }
        // Split moving segments at frame boundaries.
        let mut t = s.t_start;
        while t < s.t_end - MIN_SEGMENT {
            let k = frame_of(t + MIN_SEGMENT, origin, cfg.t_frame, frames);
            let boundary = origin + (k + 1) as f64 * cfg.t_frame;
            let t_next = if k + 1 == frames { s.t_end } else { boundary.min(s.t_end) };
            per_frame[k] += piece_sum(s.policy, t, t_next, s.position_at(t), s.position_at(t_next), cfg);
            t = t_next;
        }
    }
    let total: f64 = per_frame.iter().sum();
    let dur = traj.duration();
    Ok(RatePerformance {
        avg_rate: if dur > 0.0 { total / dur } else { 0.0 },
        per_frame,
        sensing_locations: traj.sensing_locations(),
    })
}

fn frame_of(t: f64, origin: f64, t_frame: f64, frames: usize) -> usize {
    (((t - origin) / t_frame).floor().max(0.0) as usize).min(frames - 1)
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Horizon { start: f64, end: f64 },
    TimeGap { index: usize },
    Discontinuity { index: usize },
    Speed { index: usize, speed: f64 },
    MovingWhileStationary { index: usize },
    SenseDuration { index: usize, duration: f64 },
    SenseInfeasible { index: usize },
    SenseStraddlesFrame { index: usize },
    MissingSense { frame: usize },
    ExtraSense { frame: usize, count: usize },
    StartPosition { x: f64 },
    EndPosition { x: f64 },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::Horizon { .. } => "HORIZON",
            Violation::TimeGap { .. } => "TIME_GAP",
            Violation::Discontinuity { .. } => "DISCONTINUITY",
            Violation::Speed { .. } => "SPEED",
            Violation::MovingWhileStationary { .. } => "MOVING_WHILE_STATIONARY",
            Violation::SenseDuration { .. } => "SENSE_DURATION",
            Violation::SenseInfeasible { .. } => "SENSE_INFEASIBLE",
            Violation::SenseStraddlesFrame { .. } => "SENSE_STRADDLES_FRAME",
            Violation::MissingSense { .. } => "MISSING_SENSE",
            Violation::ExtraSense { .. } => "EXTRA_SENSE",
            Violation::StartPosition { .. } => "START_POSITION",
            Violation::EndPosition { .. } => "END_POSITION",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.code(), self)
    }
}

/// Lists every way `traj` fails the mission constraints: tiling of `[0, T]`,
/// continuity, speed, stationary sensing of length `tau0` at a feasible
/// position, one sensing window per frame and the endpoint positions.
pub fn check_feasible(traj: &Trajectory) -> Vec<Violation> {
    let cfg = &traj.cfg;
    let mut out = Vec::new();
    if traj.segments.is_empty() {
        out.push(Violation::Horizon { start: 0.0, end: 0.0 });
        for frame in 1..=cfg.frame_count() {
            out.push(Violation::MissingSense { frame });
        }
        return out;
    }
    if traj.start_time().abs() > TIME_TOL || (traj.end_time() - cfg.t_total).abs() > TIME_TOL {
        out.push(Violation::Horizon { start: traj.start_time(), end: traj.end_time() });
    }
    let frames = cfg.frame_count();
    let mut sense_count = vec![0usize; frames];
    for (i, s) in traj.segments.iter().enumerate() {
        if i > 0 {
            let prev = &traj.segments[i - 1];
            if (prev.t_end - s.t_start).abs() > TIME_TOL {
                out.push(Violation::TimeGap { index: i });
            }
            if (prev.x_end - s.x_start).abs() > POSITION_TOL {
                out.push(Violation::Discontinuity { index: i });
            }
        }
        if s.duration() < -TIME_TOL {
            out.push(Violation::TimeGap { index: i });
        }
        let dist = (s.x_end - s.x_start).abs();
        if dist > cfg.v_max * s.duration().max(0.0) + POSITION_TOL {
            let speed = if s.duration() > 0.0 { dist / s.duration() } else { f64::INFINITY };
            out.push(Violation::Speed { index: i, speed });
        }
        if s.mode != Mode::Fly && dist > POSITION_TOL {
            out.push(Violation::MovingWhileStationary { index: i });
        }
        if s.mode == Mode::Sense {
            if (s.duration() - cfg.tau0).abs() > TIME_TOL {
                out.push(Violation::SenseDuration { index: i, duration: s.duration() });
            }
            if sensing_rate(s.policy, s.x_start, cfg).is_none() {
                out.push(Violation::SenseInfeasible { index: i });
            }
            let k = ((s.t_start + TIME_TOL) / cfg.t_frame).floor();
            let frame_end = (k + 1.0) * cfg.t_frame;
            if k < 0.0 || k as usize >= frames || s.t_end > frame_end + TIME_TOL {
                out.push(Violation::SenseStraddlesFrame { index: i });
            } else {
                sense_count[k as usize] += 1;
            }
        }
    }
    for (k, &n) in sense_count.iter().enumerate() {
        match n {
            0 => out.push(Violation::MissingSense { frame: k + 1 }),
            1 => {}
            _ => out.push(Violation::ExtraSense { frame: k + 1, count: n }),
        }
    }
    let first = traj.segments[0].x_start;
    if (first - cfg.x_init).abs() > POSITION_TOL {
        out.push(Violation::StartPosition { x: first });
    }
    let last = traj.segments.last().map(|s| s.x_end).unwrap_or(f64::NAN);
    if (last - cfg.x_final).abs() > POSITION_TOL {
        out.push(Violation::EndPosition { x: last });
    }
    out
}

// ---------------------------------------------------------------------------
// Unconstrained optimum and its expansion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct UnconstrainedSolution {
    /// Optimal sensing location.
    pub x_r: f64,
    /// The optimal frame over `[0, T_f]`.
    pub frame: Trajectory,
    /// Sum rate of that frame, bits/Hz.
    pub frame_rate: f64,
    /// `tau0 V g'(x_r) - [f(x'_r) - f(x_r)]`; vanishes at interior optima.
    pub stationarity_residual: f64,
    /// Whether `x_r` lies strictly inside the searchable sensing range.
    pub interior: bool,
    /// Other local maxima seen on the search grid, best first.
    pub secondary: Vec<Maximum>,
}

/// Relative size of the finite-difference step against the distance to the
/// sensing-region edge, where the sensing rate has a square-root singularity.
const EDGE_STEP_FRACTION: f64 = 1e-2;

/// Slope of the sensing rate for the stationarity condition, with the step
/// shrunk near the region edge so the stencil stays on the smooth side.
fn sense_slope(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let margin = sensing_margin(x, cfg).unwrap_or(0.0);
    let h = DERIVATIVE_STEP.min(EDGE_STEP_FRACTION * margin);
    if h <= 0.0 {
        return Err(Error::NonDifferentiablePoint { x, left: f64::NAN, right: f64::NAN });
    }
    match rate_sense_derivative_with_step(x, cfg, h) {
        Ok(d) => Ok(d),
        // Rate is C1 across the branch switch; the mean of the one-sided
        // slopes is the central difference.
        Err(Error::NonDifferentiablePoint { left, right, .. }) => Ok(0.5 * (left + right)),
        Err(e) => Err(e),
    }
}

/// `tau0 V g'(x) - [f(x') - f(x)]`: `V` times the slope of the frame sum
/// rate in the sensing location.
fn stationarity_residual(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let x_end = frame_end_position(x, cfg);
    Ok(cfg.tau0 * cfg.v_max * sense_slope(x, cfg)? - (rate_comm(x_end, cfg) - rate_comm(x, cfg)))
}

/// Bisects the stationarity condition inside `[a, b]` when it changes sign
/// there; returns the root if it does not lower the frame rate.
fn polish_stationary(best: Maximum, a: f64, b: f64, cfg: &ScenarioConfig) -> Maximum {
    let (Ok(ra), Ok(rb)) = (stationarity_residual(a, cfg), stationarity_residual(b, cfg)) else {
        return best;
    };
    if !(ra > 0.0 && rb < 0.0) {
        return best;
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match stationarity_residual(mid, cfg) {
            Ok(r) if r > 0.0 => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => return best,
        }
    }
    let x = 0.5 * (lo + hi);
    match frame_sum_rate(x, cfg) {
        Ok(v) if v >= best.value => Maximum { x, value: v },
        _ => best,
    }
}

/// Maximizes the single-frame sum rate over the sensing location and returns
/// the resulting sense-fly-hover frame.
pub fn solve_unconstrained(cfg: &ScenarioConfig) -> Result<UnconstrainedSolution> {
    let (lo, hi) = sensing_region(cfg)
        .ok_or_else(|| Error::InfeasibleScenario("no position meets the beam-gain threshold".into()))?;
    let (best, secondary) = grid_golden_max(|x| frame_sum_rate(x, cfg).ok(), lo, hi, SEARCH_STEP, GOLDEN_TOL)
        .ok_or_else(|| Error::InfeasibleScenario("sensing range has no feasible point".into()))?;
    if let Some(second) = secondary.first() {
        debug!("secondary frame-rate maximum at x = {:.3} m ({:.6} vs {:.6})", second.x, second.value, best.value);
    }
    let margin = 2.0 * DERIVATIVE_STEP;
    let mut best = best;
    if best.x - lo > margin && hi - best.x > margin && cfg.v_max > 0.0 {
        // Golden-section stops at GOLDEN_TOL; near the region edge the rate
        // is steep enough that the first-order condition needs more digits.
        let a = (best.x - SEARCH_STEP).max(lo + 0.5 * margin);
        let b = (best.x + SEARCH_STEP).min(hi - 0.5 * margin);
        best = polish_stationary(best, a, b, cfg);
    }
    let x_r = best.x;
    let interior = x_r - lo > margin && hi - x_r > margin;
    let stationarity_residual = if interior { stationarity_residual(x_r, cfg)? } else { f64::NAN };
    let frame = Trajectory { segments: hover_fly_segments(x_r, 0.0, cfg), cfg: *cfg };
    Ok(UnconstrainedSolution { x_r, frame, frame_rate: best.value, stationarity_residual, interior, secondary })
}

/// Tiles `[0, T]` with the frame: odd frames replay it, even frames play it
/// backwards, so that `x(t1) = x(t2)` whenever `t1 + t2` is an even multiple
/// of `T_f`.
pub fn expand_symmetric(frame: &Trajectory, cfg: &ScenarioConfig) -> Trajectory {
    let origin = frame.start_time();
    let local: Vec<Segment> =
        frame.segments.iter().map(|s| Segment { t_start: s.t_start - origin, t_end: s.t_end - origin, ..*s }).collect();
    let mirrored = mirror_frame(&local, 0.0, cfg.t_frame);
    let mut segments = Vec::with_capacity(local.len() * cfg.frame_count());
    for l in 0..cfg.frame_count() {
        let shift = l as f64 * cfg.t_frame;
        let src = if l % 2 == 0 { &local } else { &mirrored };
        segments.extend(src.iter().map(|s| Segment { t_start: s.t_start + shift, t_end: s.t_end + shift, ..*s }));
    }
    Trajectory { segments, cfg: *cfg }
}

/// The upper-bound trajectory: unconstrained frame expanded over the mission.
pub fn plan_upper_bound(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let sol = solve_unconstrained(cfg)?;
    Ok(expand_symmetric(&sol.frame, cfg))
}

// ---------------------------------------------------------------------------
// Location-constrained planner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

const SET_TOL: f64 = 1e-9;

impl Interval {
    fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else if lo - hi <= SET_TOL {
            let mid = 0.5 * (lo + hi);
            Some(Interval::point(mid))
        } else {
            None
        }
    }

    fn clamp(self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn contains(self, x: f64) -> bool {
        x >= self.lo - SET_TOL && x <= self.hi + SET_TOL
    }
}

/// Frame-end positions reachable from any start in `from` within one frame,
/// given the frame must contain a sensing stop somewhere in `feas`.
fn reach(from: Interval, feas: Interval, budget: f64, domain: Interval) -> Option<Interval> {
    let out = if let Some(common) = from.intersect(feas) {
        Interval { lo: common.lo - budget, hi: common.hi + budget }
    } else {
        // Detour to the nearest feasible point first.
        let (anchor, gap) = if from.hi < feas.lo { (feas.lo, feas.lo - from.hi) } else { (feas.hi, from.lo - feas.hi) };
        let left = budget - gap;
        if left < -SET_TOL {
            return None;
        }
        let left = left.max(0.0);
        Interval { lo: anchor - left, hi: anchor + left }
    };
    out.intersect(domain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DipAt {
    Start,
    AfterSense,
    End,
}

/// Layout of one frame that starts at `p0`, senses at `q` and ends at `p1`.
/// Spare time goes to an out-and-back excursion toward the user from the
/// lowest point visited.
#[derive(Debug, Clone, Copy)]
struct FrameLayout {
    p0: f64,
    q: f64,
    p1: f64,
    depth: f64,
    hover: f64,
    dip_at: DipAt,
}

fn frame_layout(p0: f64, q: f64, p1: f64, cfg: &ScenarioConfig) -> FrameLayout {
    let v = cfg.v_max;
    let travel = (p0 - q).abs() + (q - p1).abs();
    let travel_time = if v > 0.0 { travel / v } else { 0.0 };
    let slack = (cfg.t_frame - cfg.tau0 - travel_time).max(0.0);
    let low = p0.min(q).min(p1);
    let dip_at = if q == low {
        DipAt::AfterSense
    } else if p0 == low {
        DipAt::Start
    } else {
        DipAt::End
    };
    let depth = if v > 0.0 { (0.5 * slack * v).min(low) } else { 0.0 };
    let hover = if v > 0.0 { (slack - 2.0 * depth / v).max(0.0) } else { slack };
    FrameLayout { p0, q, p1, depth, hover, dip_at }
}

impl FrameLayout {
    fn low(&self) -> f64 {
        self.p0.min(self.q).min(self.p1)
    }

    /// Sum rate of the frame, bits/Hz.
    fn value(&self, cfg: &ScenarioConfig) -> Result<f64> {
        let v = cfg.v_max;
        let mut total = cfg.tau0 * rate_sense(self.q, cfg)?;
        let low = self.low();
        if v > 0.0 {
            total +=
                (integral_rate_over_path(self.p0, self.q, cfg) + integral_rate_over_path(self.q, self.p1, cfg)) / v;
            total += 2.0 * integral_rate_over_path(low - self.depth, low, cfg) / v;
        }
        total += self.hover * rate_comm(low - self.depth, cfg);
        Ok(total)
    }

    fn segments(&self, t0: f64, cfg: &ScenarioConfig) -> Vec<Segment> {
        let v = cfg.v_max;
        let mut w = SegmentWriter::new(t0, self.p0);
        let dip = |w: &mut SegmentWriter| {
            let top = w.x;
            w.fly(top - self.depth, v);
            w.hover(self.hover);
            w.fly(top, v);
        };
        if self.dip_at == DipAt::Start {
            dip(&mut w);
        }
        w.fly(self.q, v);
        w.sense(cfg.tau0, Policy::Optimal);
        if self.dip_at == DipAt::AfterSense {
            dip(&mut w);
        }
        w.fly(self.p1, v);
        if self.dip_at == DipAt::End {
            dip(&mut w);
        }
        w.finish(t0 + cfg.t_frame)
    }
}

/// Best sensing stop for a frame from `p0` to `p1`, searched over the
/// feasible positions the frame can visit.
fn best_frame(p0: f64, p1: f64, feas: Interval, cfg: &ScenarioConfig) -> Result<(FrameLayout, f64)> {
    let budget = cfg.frame_travel();
    let lo = p0.min(p1);
    let hi = p0.max(p1);
    let spare = (0.5 * (budget - (hi - lo))).max(0.0);
    let candidates = Interval { lo: (lo - spare).max(0.0), hi: hi + spare }
        .intersect(feas)
        .ok_or_else(|| Error::InfeasibleScenario(format!("no sensing position between {p0} m and {p1} m")))?;
    let (best, secondary) = grid_golden_max(
        |q| frame_layout(p0, q, p1, cfg).value(cfg).ok(),
        candidates.lo,
        candidates.hi,
        SEARCH_STEP,
        GOLDEN_TOL,
    )
    .ok_or_else(|| Error::InfeasibleScenario(format!("no sensing position between {p0} m and {p1} m")))?;
    if let Some(second) = secondary.first() {
        debug!("frame {p0:.2}->{p1:.2}: secondary sensing maximum at {:.3} m", second.x);
    }
    Ok((frame_layout(p0, best.x, p1, cfg), best.value))
}

/// Plans a full mission from `x_I` to `x_F`.
///
/// Frame-boundary positions are steered toward the optimal pattern (sensing
/// location `x_r*` on every other boundary, the pattern's far end on the
/// rest) as fast as the per-frame travel budget allows, while staying inside
/// the set from which `x_F` can still be reached with one feasible sensing
/// stop per frame. Frames that match the pattern reuse the optimal frame;
/// the others pick their sensing stop by one-dimensional search. Both
/// alignments of the pattern are tried and the better plan is kept.
pub fn plan_constrained(cfg: &ScenarioConfig) -> Result<Trajectory> {
    for (name, x) in [("x_I", cfg.x_init), ("x_F", cfg.x_final)] {
        if !(0.0..=cfg.d).contains(&x) {
            return Err(Error::InvalidEndpoints(format!("{name} = {x} m lies outside [0, {}]", cfg.d)));
        }
    }
    let (f_lo, f_hi) = sensing_region(cfg)
        .ok_or_else(|| Error::InfeasibleScenario("no position meets the beam-gain threshold".into()))?;
    let feas = Interval { lo: f_lo, hi: f_hi };
    let domain = Interval { lo: 0.0, hi: cfg.d };
    let budget = cfg.frame_travel();
    let frames = cfg.frame_count();

    // back[k]: boundary-k positions from which x_F stays reachable.
    let mut back = vec![Interval::point(cfg.x_final); frames + 1];
    for k in (0..frames).rev() {
        back[k] = reach(back[k + 1], feas, budget, domain).ok_or_else(|| {
            Error::InfeasibleScenario(format!("x_F = {} m cannot be reached with sensing in every frame", cfg.x_final))
        })?;
    }
    if !back[0].contains(cfg.x_init) {
        return Err(Error::InfeasibleScenario(format!(
            "x_F = {} m is not reachable from x_I = {} m with sensing in every frame",
            cfg.x_final, cfg.x_init
        )));
    }

    let sol = solve_unconstrained(cfg)?;
    let pattern = PatternTargets { sense: sol.x_r, turn: frame_end_position(sol.x_r, cfg) };

    let mut best: Option<(f64, Trajectory)> = None;
    for phase in 0..2 {
        let traj = plan_with_phase(cfg, &pattern, phase, &back, feas, domain)?;
        let rate = evaluate(&traj)?.avg_rate;
        debug!("plan phase {phase}: avg rate {rate:.9}");
        if best.as_ref().is_none_or(|(r, _)| rate > *r) {
            best = Some((rate, traj));
        }
    }
    Ok(best.expect("two phases evaluated").1)
}

struct PatternTargets {
    sense: f64,
    turn: f64,
}

fn plan_with_phase(
    cfg: &ScenarioConfig,
    pattern: &PatternTargets,
    phase: usize,
    back: &[Interval],
    feas: Interval,
    domain: Interval,
) -> Result<Trajectory> {
    let frames = cfg.frame_count();
    let budget = cfg.frame_travel();
    let mut bounds = Vec::with_capacity(frames + 1);
    bounds.push(cfg.x_init);
    for (k, allowed_back) in back.iter().enumerate().skip(1) {
        let prev = bounds[k - 1];
        let target = if (k + phase).is_multiple_of(2) { pattern.sense } else { pattern.turn };
        let allowed = reach(Interval::point(prev), feas, budget, domain)
            .and_then(|r| r.intersect(*allowed_back))
            .ok_or_else(|| Error::InfeasibleScenario(format!("frame {k} has no feasible continuation")))?;
        bounds.push(if k == frames { cfg.x_final } else { allowed.clamp(target) });
    }

    let template = hover_fly_segments(pattern.sense, 0.0, cfg);
    let template_rev = mirror_frame(&template, 0.0, cfg.t_frame);
    let close = |a: f64, b: f64| (a - b).abs() <= SET_TOL;
    let mut segments = Vec::new();
    for k in 1..=frames {
        let t0 = (k - 1) as f64 * cfg.t_frame;
        let (p0, p1) = (bounds[k - 1], bounds[k]);
        let shift = |s: &Segment| Segment { t_start: s.t_start + t0, t_end: s.t_end + t0, ..*s };
        if close(p0, pattern.sense) && close(p1, pattern.turn) {
            segments.extend(template.iter().map(shift));
        } else if close(p0, pattern.turn) && close(p1, pattern.sense) {
            segments.extend(template_rev.iter().map(shift));
        } else {
            let (layout, _) = best_frame(p0, p1, feas, cfg)?;
            segments.extend(layout.segments(t0, cfg));
        }
    }
    if let Some(last) = segments.last_mut() {
        last.t_end = cfg.t_total;
    }
    Ok(Trajectory { segments, cfg: *cfg })
}
