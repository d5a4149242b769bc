//! Structural properties of the planners over randomized scenarios.

use ipsac_core::channel::sensing_region;
use ipsac_core::trajectory::Mode;
use ipsac_core::{check_feasible, evaluate, expand_symmetric, plan_constrained, plan_upper_bound, solve_unconstrained};
use ipsac_core::{plan_benchmark, BenchmarkScheme, ScenarioConfig};
use proptest::prelude::*;

/// Mirrored instants `2 l T_f - t` are rounded in floating point, so equal
/// positions agree to roundoff rather than bitwise.
const SYMMETRY_TOL: f64 = 1e-9;

/// Frame lengths that divide a 100 s mission.
const FRAMES: [f64; 6] = [1.0, 2.0, 4.0, 5.0, 10.0, 20.0];

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (0usize..FRAMES.len(), 2e-5f64..3e-4, 5.0f64..50.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(k, g, v, a, b)| {
        let base = ScenarioConfig { t_total: 100.0, t_frame: FRAMES[k], gamma_thr: g, v_max: v, ..Default::default() };
        let (lo, hi) = sensing_region(&base).unwrap();
        ScenarioConfig { x_init: lo + a * (hi - lo), x_final: lo + b * (hi - lo), ..base }
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn constrained_plan_is_feasible_and_bounded(cfg in scenario()) {
        let plan = plan_constrained(&cfg).unwrap();
        let v = check_feasible(&plan);
        prop_assert!(v.is_empty(), "{:?}", v);
        let pr = evaluate(&plan).unwrap().avg_rate;
        let ub = evaluate(&plan_upper_bound(&cfg).unwrap()).unwrap().avg_rate;
        prop_assert!(pr <= ub + 1e-9, "{} > {}", pr, ub);
    }

    #[test]
    fn frame_is_unidirectional_and_expansion_symmetric(cfg in scenario()) {
        let sol = solve_unconstrained(&cfg).unwrap();
        let f = &sol.frame;
        for s in f.segments.iter().filter(|s| s.t_start >= cfg.tau0 - 1e-12) {
            prop_assert!(s.x_end <= s.x_start);
        }
        let full = expand_symmetric(f, &cfg);
        let n = (cfg.t_total / 0.01).round() as usize;
        let frames = cfg.frame_count();
        for i in 0..=n {
            let t = i as f64 * 0.01;
            for l in 1..=frames / 2 {
                let mirror = 2.0 * l as f64 * cfg.t_frame - t;
                if (0.0..=cfg.t_total).contains(&mirror) {
                    let (a, b) = (full.position_at(t), full.position_at(mirror));
                    prop_assert!((a - b).abs() <= SYMMETRY_TOL, "t={} {} vs {}", t, a, b);
                }
            }
        }
    }

    #[test]
    fn precoder_only_dominates_time_division(cfg in scenario()) {
        let cfg = ScenarioConfig { x_init: cfg.d, ..cfg };
        let po = plan_benchmark(&cfg, BenchmarkScheme::PrecoderOnly).unwrap().trajectory;
        let td = plan_benchmark(&cfg, BenchmarkScheme::TimeDivision).unwrap().trajectory;
        let (a, b) = (evaluate(&po).unwrap().avg_rate, evaluate(&td).unwrap().avg_rate);
        prop_assert!(a >= b - 1e-12);
        for (s, t) in po.segments.iter().zip(&td.segments) {
            prop_assert_eq!((s.x_start, s.x_end, s.mode), (t.x_start, t.x_end, t.mode));
        }
        prop_assert!(po.segments.iter().filter(|s| s.mode == Mode::Sense).count() == cfg.frame_count());
    }
}
