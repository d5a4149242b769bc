//! One-dimensional numerics: adaptive Simpson quadrature and a dense-grid
//! maximizer with golden-section polishing.

/// Absolute tolerance for path integrals of the rate.
pub const QUAD_TOL: f64 = 1e-9;
pub const QUAD_MAX_DEPTH: u32 = 40;
/// Levels always subdivided before the error estimate is trusted.
const QUAD_MIN_DEPTH: u32 = 6;

/// Grid spacing for every one-dimensional position search, m.
pub const SEARCH_STEP: f64 = 0.05;
/// Golden-section termination width, m.
pub const GOLDEN_TOL: f64 = 1e-4;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, max_depth, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    level: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (level >= QUAD_MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, level + 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, level + 1)
}

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Maximum {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        Maximum { x: c, value: fc }
    } else {
        Maximum { x: d, value: fd }
    }
}

/// Evenly spaced grid over `[lo, hi]` with spacing at most `step`, endpoints
/// included.
pub fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let span = (hi - lo).max(0.0);
    let n = if span == 0.0 { 0 } else { (span / step).ceil() as usize };
    (0..=n).map(move |i| if i == n { hi } else { lo + span * i as f64 / n.max(1) as f64 })
}

/// Maximizes `f` on `[lo, hi]`: exhaustive grid first, then golden-section
/// polishing inside the bracket around the best grid point. Points where `f`
/// returns `None` are skipped. Returns `None` when no point is admissible.
///
/// Also returns the remaining strict local maxima of the grid, best first,
/// so callers can report competing optima.
pub fn grid_golden_max<F: FnMut(f64) -> Option<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> Option<(Maximum, Vec<Maximum>)> {
    let samples: Vec<(f64, Option<f64>)> = grid(lo, hi, step).map(|x| (x, f(x))).collect();
    let (best_idx, best) = samples
        .iter()
        .enumerate()
        .filter_map(|(i, (x, v))| v.map(|v| (i, Maximum { x: *x, value: v })))
        .fold(None::<(usize, Maximum)>, |acc, (i, m)| match acc {
            Some((_, b)) if b.value >= m.value => acc,
            _ => Some((i, m)),
        })?;

    let mut secondary: Vec<Maximum> = Vec::new();
    for i in 0..samples.len() {
        if i == best_idx {
            continue;
        }
        let Some(v) = samples[i].1 else { continue };
        let left = if i > 0 { samples[i - 1].1 } else { None };
        let right = samples.get(i + 1).and_then(|s| s.1);
        if left.is_none_or(|l| v > l) && right.is_none_or(|r| v > r) {
            secondary.push(Maximum { x: samples[i].0, value: v });
        }
    }
    secondary.sort_by(|a, b| b.value.total_cmp(&a.value));

    let a = if best_idx > 0 { samples[best_idx - 1].0 } else { best.x };
    let b = samples.get(best_idx + 1).map_or(best.x, |s| s.0);
    let mut refined = best;
    if b - a > tol {
        let polished = golden_section_max(|x| f(x).unwrap_or(f64::NEG_INFINITY), a, b, tol);
        if polished.value > refined.value {
            refined = polished;
        }
    }
    Some((refined, secondary))
}
