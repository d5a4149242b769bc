//! Precoder, sensing-instant and trajectory optimization for a UAV that
//! serves a ground user while sensing a ground target once per frame.
//!
//! The crate is organised bottom-up: [`scenario`] holds the parameters,
//! [`channel`] the line-of-sight geometry, [`precoder`] the closed-form
//! beam-gain-constrained precoder, [`rate`] the achievable-rate functions,
//! [`trajectory`] the planners and evaluator, [`benchmarks`] the comparison
//! schemes and [`experiment`] the sweep harness.

pub mod benchmarks;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod numeric;
pub mod precoder;
pub mod rate;
pub mod scenario;
pub mod trajectory;

pub use benchmarks::{plan_benchmark, BenchmarkPlan, BenchmarkScheme};
pub use error::{Error, Result};
pub use experiment::{plan_scheme, run_sweep, Flag, Scheme, SweepParam, SweepRow, SweepSpec, SweepTable};
pub use precoder::{Branch, PrecoderSolution};
pub use scenario::{load_config, ScenarioConfig};
pub use trajectory::{
    check_feasible, evaluate, expand_symmetric, plan_constrained, plan_upper_bound, solve_unconstrained, Mode, Policy,
    RatePerformance, Segment, Trajectory, UnconstrainedSolution, Violation,
};
