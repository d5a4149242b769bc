//! Free-space line-of-sight geometry: path gain, ULA steering vectors,
//! the user channel, the normalized target response and the user/target
//! steering correlation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::scenario::ScenarioConfig;

/// Array response of the ULA toward a ground point. Entry `m` is
/// `exp(-j 2 pi (d/lambda) m sin(theta))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.entries
    }
}

/// Baseband user channel `h_c` together with its power gain.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub entries: Vec<Complex64>,
    pub gain: f64,
}

/// `a^H b` for column vectors `a`, `b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Channel power gain `beta0 / (H^2 + x^2)`.
pub fn path_gain(x: f64, cfg: &ScenarioConfig) -> f64 {
    cfg.beta0 / (cfg.h * cfg.h + x * x)
}

/// Sine of the elevation angle from the UAV at `x` to a ground point.
pub fn elevation_sine(x: f64, point_x: f64, cfg: &ScenarioConfig) -> f64 {
    let dx = x - point_x;
    cfg.h / (dx * dx + cfg.h * cfg.h).sqrt()
}

pub fn steering_vector(x: f64, point_x: f64, cfg: &ScenarioConfig) -> SteeringVector {
    let phase_step = -2.0 * PI * cfg.spacing_ratio * elevation_sine(x, point_x, cfg);
    let entries = (0..cfg.m).map(|m| Complex64::from_polar(1.0, phase_step * m as f64)).collect();
    SteeringVector { entries }
}

/// User channel with the global carrier phase fixed to 1; every downstream
/// quantity depends on `|h_c^H w|` only.
pub fn user_channel(x: f64, cfg: &ScenarioConfig) -> UserChannel {
    let gain = path_gain(x, cfg);
    let amp = gain.sqrt();
    let entries = steering_vector(x, 0.0, cfg).into_inner().into_iter().map(|z| z * amp).collect();
    UserChannel { entries, gain }
}

/// Squared UAV-target distance `(D - x)^2 + H^2`.
pub fn target_distance_sqr(x: f64, cfg: &ScenarioConfig) -> f64 {
    let dx = cfg.d - x;
    dx * dx + cfg.h * cfg.h
}

/// Target steering vector scaled by the inverse UAV-target distance.
pub fn target_response(x: f64, cfg: &ScenarioConfig) -> Vec<Complex64> {
    let scale = 1.0 / target_distance_sqr(x, cfg).sqrt();
    steering_vector(x, cfg.d, cfg).into_inner().into_iter().map(|z| z * scale).collect()
}

/// `|a(x,u)^H a(x,v)| / M`, by direct summation.
pub fn correlation_rho(x: f64, cfg: &ScenarioConfig) -> f64 {
    let a_u = steering_vector(x, 0.0, cfg);
    let a_v = steering_vector(x, cfg.d, cfg);
    (inner(a_u.entries(), a_v.entries()).norm() / cfg.m as f64).min(1.0)
}

/// Closed-form Dirichlet-kernel evaluation of [`correlation_rho`].
pub fn correlation_rho_dirichlet(x: f64, cfg: &ScenarioConfig) -> f64 {
    let delta = elevation_sine(x, 0.0, cfg) - elevation_sine(x, cfg.d, cfg);
    let half = PI * cfg.spacing_ratio * delta;
    let m = cfg.m as f64;
    let den = m * half.sin();
    if den.abs() < 1e-12 {
        // Removable singularity; the limit of |sin(M t)/(M sin t)| at t = k*pi.
        return 1.0;
    }
    ((m * half).sin() / den).abs().min(1.0)
}

/// Horizontal positions in `[0, D]` from which full transmit power toward the
/// target meets the beam-gain threshold, i.e. `(D - x)^2 + H^2 <= M P / gamma`.
pub fn sensing_region(cfg: &ScenarioConfig) -> Option<(f64, f64)> {
    let reach = cfg.m as f64 * cfg.p_max / cfg.gamma_thr - cfg.h * cfg.h;
    if reach < 0.0 {
        return None;
    }
    let half_width = reach.sqrt();
    let lo = (cfg.d - half_width).max(0.0);
    Some((lo, cfg.d))
}

/// Signed distance from `x` to the nearest edge of the full-power sensing
/// disc around the target: positive inside, `None` when the disc is empty.
pub fn sensing_margin(x: f64, cfg: &ScenarioConfig) -> Option<f64> {
    let reach = cfg.m as f64 * cfg.p_max / cfg.gamma_thr - cfg.h * cfg.h;
    (reach >= 0.0).then(|| reach.sqrt() - (cfg.d - x).abs())
}
