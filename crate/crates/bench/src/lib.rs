//! Scenarios shared by the solver benchmarks.

use ipsac_core::ScenarioConfig;

/// Named scenarios spanning short and long frames and a tight threshold.
pub fn scenarios() -> Vec<(&'static str, ScenarioConfig)> {
    let base = ScenarioConfig::default();
    vec![
        ("defaults", base),
        ("short_frames", ScenarioConfig { t_frame: 1.0, ..base }),
        ("long_frames", ScenarioConfig { t_frame: 25.0, ..base }),
        ("tight_threshold", ScenarioConfig { gamma_thr: 2e-4, ..base }),
    ]
}

/// Evenly spaced sensing-feasible positions under `cfg`.
pub fn feasible_positions(cfg: &ScenarioConfig, n: usize) -> Vec<f64> {
    let (lo, hi) = ipsac_core::channel::sensing_region(cfg).expect("scenario has a sensing region");
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}
