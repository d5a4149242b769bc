//! Sweep tables: golden CSV files, SVG structure and reproducibility.

use std::path::PathBuf;

use ipsac_core::experiment::{
    emit_plot, preset, render_svg, table_to_csv, write_csv, Flag, Scheme, SweepParam, SweepRow, SweepSpec, SweepTable,
    CSV_HEADER,
};
use ipsac_core::{evaluate, plan_constrained, run_sweep, ScenarioConfig};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "{name} differs from golden file");
}

fn single_row_table() -> SweepTable {
    SweepTable {
        param: SweepParam::MaxSpeed,
        rows: vec![SweepRow {
            scheme: Scheme::PrecoderOnly,
            param: SweepParam::MaxSpeed,
            value: 30.0,
            avg_rate: Some(6.221434771234),
            gap_to_ub: Some(0.1938363981),
            flags: vec![Flag::EndpointIgnored],
        }],
    }
}

fn fig3a_first() -> SweepTable {
    let p = preset("fig3a", &ScenarioConfig::default()).unwrap();
    run_sweep(&p[0].spec).unwrap()
}

#[test]
fn golden_empty_table() {
    let t = SweepTable { param: SweepParam::FrameLength, rows: Vec::new() };
    let csv = table_to_csv(&t);
    assert_eq!(csv, format!("{CSV_HEADER}\n"));
    check_golden("empty.csv", &csv);
}

#[test]
fn golden_single_row() {
    check_golden("single_row.csv", &table_to_csv(&single_row_table()));
}

#[test]
fn golden_fig3a_table() {
    let csv = table_to_csv(&fig3a_first());
    assert!(!csv.contains('\r'));
    check_golden("fig3a_gamma_thr_6e-05.csv", &csv);
}

#[test]
fn write_csv_matches_string_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    write_csv(&single_row_table(), &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), table_to_csv(&single_row_table()));
    assert!(write_csv(&single_row_table(), &dir.path().join("missing/t.csv")).is_err());
}

fn svg_counts(svg: &str) -> (usize, usize) {
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    let polylines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
    let markers = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
    (polylines, markers)
}

#[test]
fn svg_single_point_is_a_marker() {
    let svg = render_svg(&single_row_table()).unwrap();
    assert_eq!(svg_counts(&svg), (0, 1));
    assert!(svg.contains("Achievable rate (bits/s/Hz)"));
    assert!(svg.contains(">V_max<"));
}

#[test]
fn svg_fig3a_has_four_series() {
    let t = fig3a_first();
    let svg = render_svg(&t).unwrap();
    assert_eq!(svg_counts(&svg), (4, 0));
    assert!(svg.contains(">T_f<"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.svg");
    emit_plot(&t, &path).unwrap();
    assert_eq!(std::fs::read_to_string(path).unwrap(), svg);
}

#[test]
fn infeasible_points_are_flagged_not_dropped() {
    let spec = SweepSpec {
        param: SweepParam::GammaThreshold,
        values: vec![6e-5, 5e-4],
        schemes: Scheme::ALL.to_vec(),
        base: ScenarioConfig::default(),
    };
    let t = run_sweep(&spec).unwrap();
    assert_eq!(t.rows.len(), 8);
    for r in t.rows.iter().filter(|r| r.value == 5e-4) {
        assert_eq!(r.flags, vec![Flag::Infeasible]);
        assert!(r.avg_rate.is_none());
    }
    let csv = table_to_csv(&t);
    assert!(csv.contains("PROPOSED,gamma_thr,0.0005,,,INFEASIBLE\n"));
    // Still plottable: the feasible points become markers.
    assert_eq!(svg_counts(&render_svg(&t).unwrap()), (0, 4));
}

#[test]
fn single_value_sweep_matches_direct_solve() {
    let base = ScenarioConfig::default();
    let spec =
        SweepSpec { param: SweepParam::MaxSpeed, values: vec![base.v_max], schemes: vec![Scheme::Proposed], base };
    let t = run_sweep(&spec).unwrap();
    assert_eq!(t.rows.len(), 1);
    let direct = evaluate(&plan_constrained(&base).unwrap()).unwrap().avg_rate;
    assert_eq!(t.rows[0].avg_rate, Some(direct));
}

#[test]
fn upper_bound_dominates_every_row() {
    let base = ScenarioConfig::default();
    for sub in preset("fig4", &base).unwrap().into_iter().chain(preset("fig3c", &base).unwrap()) {
        let t = run_sweep(&sub.spec).unwrap();
        for v in t.values() {
            let ub = t.rate(Scheme::UpperBound, v).unwrap();
            for s in Scheme::ALL {
                if let Some(r) = t.rate(s, v) {
                    assert!(r <= ub + 1e-9, "{}: {s} at {v}: {r} > {ub}", sub.label);
                }
            }
        }
    }
}

#[test]
fn reproducible_across_worker_counts() {
    let p = preset("fig4", &ScenarioConfig::default()).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| table_to_csv(&run_sweep(&p[0].spec).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
}
