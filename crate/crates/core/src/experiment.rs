//! Parameter sweeps over the four schemes, their CSV tables and SVG charts,
//! and the named figure presets.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;
use rayon::prelude::*;

use crate::benchmarks::{plan_benchmark, BenchmarkScheme};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::trajectory::{evaluate, plan_constrained, plan_upper_bound, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    UpperBound,
    Proposed,
    PrecoderOnly,
    TimeDivision,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::UpperBound, Scheme::Proposed, Scheme::PrecoderOnly, Scheme::TimeDivision];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::UpperBound => "UPPER_BOUND",
            Scheme::Proposed => "PROPOSED",
            Scheme::PrecoderOnly => "PRECODER_ONLY",
            Scheme::TimeDivision => "TIME_DIVISION",
        }
    }

    /// Accepts `UPPER_BOUND` as well as `upper-bound` style names.
    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Scheme::ALL.into_iter().find(|k| k.as_str() == norm)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    /// The scheme has no valid plan at this point; the rate is blank.
    Infeasible,
    /// The trajectory does not end at `x_F`.
    EndpointIgnored,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Infeasible => "INFEASIBLE",
            Flag::EndpointIgnored => "ENDPOINT_IGNORED",
        }
    }
}

/// A planned trajectory together with the metadata flags of its scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePlan {
    pub trajectory: Trajectory,
    pub flags: Vec<Flag>,
}

/// Runs the planner that belongs to `scheme`.
pub fn plan_scheme(scheme: Scheme, cfg: &ScenarioConfig) -> Result<SchemePlan> {
    let bench = |kind| {
        plan_benchmark(cfg, kind).map(|p| SchemePlan {
            flags: if p.ignores_final_location { vec![Flag::EndpointIgnored] } else { Vec::new() },
            trajectory: p.trajectory,
        })
    };
    match scheme {
        Scheme::UpperBound => Ok(SchemePlan { trajectory: plan_upper_bound(cfg)?, flags: Vec::new() }),
        Scheme::Proposed => Ok(SchemePlan { trajectory: plan_constrained(cfg)?, flags: Vec::new() }),
        Scheme::PrecoderOnly => bench(BenchmarkScheme::PrecoderOnly),
        Scheme::TimeDivision => bench(BenchmarkScheme::TimeDivision),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    FrameLength,
    GammaThreshold,
    TargetDistance,
    MaxSpeed,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::FrameLength => "T_f",
            SweepParam::GammaThreshold => "gamma_thr",
            SweepParam::TargetDistance => "D",
            SweepParam::MaxSpeed => "V_max",
        }
    }

    /// `base` with this parameter set to `value`. When the target distance
    /// moves, endpoints that sat at the old target move with it.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut cfg = *base;
        match self {
            SweepParam::FrameLength => cfg.t_frame = value,
            SweepParam::GammaThreshold => cfg.gamma_thr = value,
            SweepParam::MaxSpeed => cfg.v_max = value,
            SweepParam::TargetDistance => {
                cfg.d = value;
                if base.x_init == base.d {
                    cfg.x_init = value;
                }
                if base.x_final == base.d {
                    cfg.x_final = value;
                }
            }
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub base: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub param: SweepParam,
    pub value: f64,
    pub avg_rate: Option<f64>,
    /// `(UB - rate) / UB` against the upper-bound row at the same value.
    pub gap_to_ub: Option<f64>,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn rate(&self, scheme: Scheme, value: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.scheme == scheme && r.value == value).and_then(|r| r.avg_rate)
    }

    /// Distinct swept values in table order.
    pub fn values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.value) {
                out.push(r.value);
            }
        }
        out
    }
}

/// Runs every scheme at every admissible value.
///
/// Values that do not give a valid scenario are skipped with a warning;
/// scheme failures become `INFEASIBLE` rows. Points run in parallel and the
/// table is assembled in spec order, so the output does not depend on the
/// worker count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation { key: "values", message: "sweep values must be strictly increasing".into() });
    }
    let configs: Vec<(f64, ScenarioConfig)> = spec
        .values
        .iter()
        .filter_map(|&v| {
            let cfg = spec.param.apply(&spec.base, v);
            match cfg.validate() {
                Ok(()) => Some((v, cfg)),
                Err(e) => {
                    warn!("skipping {} = {v}: {e}", spec.param.name());
                    None
                }
            }
        })
        .collect();

    let mut schemes = spec.schemes.clone();
    if !schemes.contains(&Scheme::UpperBound) {
        // The gap column needs the bound even when its row is not requested.
        schemes.insert(0, Scheme::UpperBound);
    }
    let jobs: Vec<(usize, Scheme)> = (0..configs.len()).flat_map(|i| schemes.iter().map(move |&s| (i, s))).collect();
    let results: Vec<std::result::Result<(f64, Vec<Flag>), Error>> = jobs
        .par_iter()
        .map(|&(i, scheme)| {
            let plan = plan_scheme(scheme, &configs[i].1)?;
            Ok((evaluate(&plan.trajectory)?.avg_rate, plan.flags))
        })
        .collect();

    let mut rows = Vec::with_capacity(jobs.len());
    let mut any_ok = false;
    for (i, (value, _)) in configs.iter().enumerate() {
        let at = |s: Scheme| {
            let k = schemes.iter().position(|&x| x == s).expect("scheme scheduled");
            &results[i * schemes.len() + k]
        };
        let ub = at(Scheme::UpperBound).as_ref().ok().map(|r| r.0);
        for &scheme in &spec.schemes {
            let row = match at(scheme) {
                Ok((rate, flags)) => {
                    any_ok = true;
                    SweepRow {
                        scheme,
                        param: spec.param,
                        value: *value,
                        avg_rate: Some(*rate),
                        gap_to_ub: ub.map(|u| (u - rate) / u),
                        flags: flags.clone(),
                    }
                }
                Err(e) => {
                    warn!("{scheme} infeasible at {} = {value}: {e}", spec.param.name());
                    SweepRow {
                        scheme,
                        param: spec.param,
                        value: *value,
                        avg_rate: None,
                        gap_to_ub: None,
                        flags: vec![Flag::Infeasible],
                    }
                }
            };
            rows.push(row);
        }
    }
    if !any_ok {
        return Err(Error::InfeasibleScenario(format!("every point of the {} sweep failed", spec.param.name())));
    }
    Ok(SweepTable { param: spec.param, rows })
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

pub const PRESETS: [&str; 4] = ["fig3a", "fig3b", "fig3c", "fig4"];

/// A labelled sub-sweep of a preset; the label names the output files.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetSweep {
    pub label: String,
    pub spec: SweepSpec,
}

fn sub(label: String, param: SweepParam, values: &[f64], base: ScenarioConfig) -> PresetSweep {
    PresetSweep { label, spec: SweepSpec { param, values: values.to_vec(), schemes: Scheme::ALL.to_vec(), base } }
}

/// Threshold pair used by the presets that draw one curve per threshold.
const PRESET_GAMMAS: [f64; 2] = [6e-5, 1e-4];

/// The sweeps behind a named figure preset, built around `base`.
///
/// * `fig3a`: frame length `{1, 2, 4, 5, 10, 20, 25}` s, one sweep per threshold.
/// * `fig3b`: threshold `1e-5 ..= 5e-4`, one sweep per frame length `{1, 5}` s.
/// * `fig3c`: target distance `{50, ..., 600}` m, one sweep per threshold.
/// * `fig4`: maximum speed `{5, ..., 50}` m/s.
pub fn preset(name: &str, base: &ScenarioConfig) -> Option<Vec<PresetSweep>> {
    let per_gamma = |fig: &str, param: SweepParam, values: &[f64]| -> Vec<PresetSweep> {
        PRESET_GAMMAS
            .iter()
            .map(|&g| {
                sub(
                    format!("{fig}_gamma_thr_{}", format_g9(g)),
                    param,
                    values,
                    ScenarioConfig { gamma_thr: g, ..*base },
                )
            })
            .collect()
    };
    let sweeps = match name {
        "fig3a" => per_gamma("fig3a", SweepParam::FrameLength, &[1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0]),
        "fig3b" => [1.0, 5.0]
            .iter()
            .map(|&tf| {
                sub(
                    format!("fig3b_T_f_{}", format_g9(tf)),
                    SweepParam::GammaThreshold,
                    &[1e-5, 2e-5, 4e-5, 6e-5, 8e-5, 1e-4, 1.5e-4, 2e-4, 3e-4, 5e-4],
                    ScenarioConfig { t_frame: tf, ..*base },
                )
            })
            .collect(),
        "fig3c" => {
            per_gamma("fig3c", SweepParam::TargetDistance, &[50.0, 100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 600.0])
        }
        "fig4" => {
            vec![sub("fig4".to_string(), SweepParam::MaxSpeed, &[5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0], *base)]
        }
        _ => return None,
    };
    Some(sweeps)
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "scheme,param,value,avg_rate_bpshz,gap_to_ub,flags";

/// Formats like C's `%.9g`.
pub fn format_g9(v: f64) -> String {
    const P: i32 = 9;
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn table_to_csv(table: &SweepTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let opt = |v: Option<f64>| v.map(format_g9).unwrap_or_default();
        let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scheme.as_str(),
            r.param.name(),
            format_g9(r.value),
            opt(r.avg_rate),
            opt(r.gap_to_ub),
            flags.join("|")
        );
    }
    out
}

pub fn write_csv(table: &SweepTable, path: &Path) -> Result<()> {
    std::fs::write(path, table_to_csv(table))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 190.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const TICKS: usize = 5;

fn scheme_color(s: Scheme) -> &'static str {
    match s {
        Scheme::UpperBound => "#1f77b4",
        Scheme::Proposed => "#d62728",
        Scheme::PrecoderOnly => "#2ca02c",
        Scheme::TimeDivision => "#9467bd",
    }
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Renders the table as a standalone SVG line chart, one series per scheme.
/// Single-point series are drawn as a marker; blank rates are left out.
pub fn render_svg(table: &SweepTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut series: Vec<(Scheme, Vec<(f64, f64)>)> = Vec::new();
    for r in &table.rows {
        let idx = match series.iter().position(|(s, _)| *s == r.scheme) {
            Some(i) => i,
            None => {
                series.push((r.scheme, Vec::new()));
                series.len() - 1
            }
        };
        if let Some(y) = r.avg_rate {
            series[idx].1.push((r.value, y));
        }
    }
    let xs = table.rows.iter().map(|r| r.value);
    let (x_lo, x_hi) = span(xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let ys: Vec<f64> = table.rows.iter().filter_map(|r| r.avg_rate).collect();
    let (y_lo, y_hi) = if ys.is_empty() {
        (0.0, 1.0)
    } else {
        span(ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let plot_h = SVG_H - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let (gx, gy) = (px(xv), py(yv));
        let bottom = MARGIN_T + plot_h;
        let _ =
            writeln!(s, r#"<line x1="{gx:.2}" y1="{bottom}" x2="{gx:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 5.0);
        let _ =
            writeln!(s, r#"<text x="{gx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bottom + 20.0, tick_label(xv));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{gy:.2}" x2="{MARGIN_L}" y2="{gy:.2}" stroke="black"/>"#,
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 8.0,
            gy + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + 0.5 * plot_w,
        SVG_H - 15.0,
        table.param.name()
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Achievable rate (bits/s/Hz)</text>"#,
        MARGIN_T + 0.5 * plot_h,
        MARGIN_T + 0.5 * plot_h
    );
    for (k, (scheme, pts)) in series.iter().enumerate() {
        let color = scheme_color(*scheme);
        match pts.len() {
            0 => {}
            1 => {
                let _ = writeln!(
                    s,
                    r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                    px(pts[0].0),
                    py(pts[0].1)
                );
            }
            _ => {
                let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    coords.join(" ")
                );
            }
        }
        let ly = MARGIN_T + 20.0 + 20.0 * k as f64;
        let lx = SVG_W - MARGIN_R + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 32.0, ly + 4.0, scheme.as_str());
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick_label(v: f64) -> String {
    let r = format!("{:.3e}", v);
    let parsed: f64 = r.parse().unwrap_or(v);
    if parsed != 0.0 && (parsed.abs() < 1e-2 || parsed.abs() >= 1e5) {
        format!("{:.2e}", parsed)
    } else {
        trim_zeros(&format!("{:.3}", parsed)).to_string()
    }
}

pub fn emit_plot(table: &SweepTable, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(table)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (400.0, "400"),
            (6e-5, "6e-05"),
            (1.5e-4, "0.00015"),
            (0.0001, "0.0001"),
            (7.717335123456, "7.71733512"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (-2.5, "-2.5"),
            (0.1 + 0.2, "0.3"),
            (9.9999999999, "10"),
            (1e100, "1e+100"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g9(v), want, "{v}");
        }
    }

    #[test]
    fn scheme_names() {
        assert_eq!(Scheme::parse("upper-bound"), Some(Scheme::UpperBound));
        assert_eq!(Scheme::parse("TIME_DIVISION"), Some(Scheme::TimeDivision));
        assert_eq!(Scheme::parse("bogus"), None);
    }

    #[test]
    fn sweeping_distance_moves_endpoints_at_target() {
        let base = ScenarioConfig::default();
        let c = SweepParam::TargetDistance.apply(&base, 150.0);
        assert_eq!((c.d, c.x_init, c.x_final), (150.0, 150.0, 150.0));
        let other = ScenarioConfig { x_init: 10.0, ..base };
        assert_eq!(SweepParam::TargetDistance.apply(&other, 150.0).x_init, 10.0);
    }

    #[test]
    fn invalid_values_are_skipped() {
        let spec = SweepSpec {
            param: SweepParam::FrameLength,
            values: vec![5.0, 7.0],
            schemes: vec![Scheme::Proposed],
            base: ScenarioConfig::default(),
        };
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.values(), vec![5.0]);
        let bad = SweepSpec { values: vec![5.0, 5.0], ..spec };
        assert!(run_sweep(&bad).is_err());
    }

    #[test]
    fn all_points_failing_is_an_error() {
        let spec = SweepSpec {
            param: SweepParam::GammaThreshold,
            values: vec![5e-4, 1e-3],
            schemes: Scheme::ALL.to_vec(),
            base: ScenarioConfig::default(),
        };
        assert!(matches!(run_sweep(&spec), Err(Error::InfeasibleScenario(_))));
    }

    #[test]
    fn presets_known() {
        let base = ScenarioConfig::default();
        for name in PRESETS {
            let p = preset(name, &base).unwrap();
            assert!(!p.is_empty());
            for s in &p {
                assert!(s.spec.values.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert!(preset("fig9", &base).is_none());
        assert_eq!(preset("fig3a", &base).unwrap()[0].label, "fig3a_gamma_thr_6e-05");
    }

    #[test]
    fn svg_requires_rows() {
        let t = SweepTable { param: SweepParam::MaxSpeed, rows: Vec::new() };
        assert!(matches!(render_svg(&t), Err(Error::EmptyTable)));
    }
}
