//! Per-location transmit precoding.
//!
//! Outside sensing windows the optimal precoder is maximum ratio transmission
//! toward the user. During sensing the user SNR is maximized subject to the
//! beam-pattern-gain constraint toward the target. The optimum lies in the
//! two-dimensional span of the user and target directions, which yields a
//! closed form: either MRT already satisfies the constraint, or the minimum
//! required amplitude goes along the target direction and the remaining power
//! along the orthogonal residual of the user direction.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{inner, norm_sqr, steering_vector, target_distance_sqr, user_channel};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Absolute slack on the sensing feasibility inequality.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Which branch of the optimal-SNR expression is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// MRT toward the user already meets the beam-gain threshold.
    MrtUser,
    /// The beam-gain constraint is active.
    Constrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSolution {
    pub weights: Vec<Complex64>,
    pub snr: f64,
    pub beam_gain: f64,
    pub branch: Branch,
}

/// `sqrt(P_max) * h / |h|`.
pub fn mrt_precoder(h: &[Complex64], cfg: &ScenarioConfig) -> Result<Vec<Complex64>> {
    let norm = norm_sqr(h).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let scale = cfg.p_max.sqrt() / norm;
    Ok(h.iter().map(|z| z * scale).collect())
}

/// Beam pattern gain `|a(x,v)^H w|^2` toward the target.
pub fn beam_gain(w: &[Complex64], x: f64, cfg: &ScenarioConfig) -> f64 {
    inner(steering_vector(x, cfg.d, cfg).entries(), w).norm_sqr()
}

/// User SNR `|h_c^H w|^2 / sigma2` achieved by `w` at `x`.
pub fn user_snr(w: &[Complex64], x: f64, cfg: &ScenarioConfig) -> f64 {
    inner(&user_channel(x, cfg).entries, w).norm_sqr() / cfg.sigma2
}

/// Beam gain the constraint demands at `x`: `d(x,v)^2 * gamma`.
pub fn required_beam_gain(x: f64, cfg: &ScenarioConfig) -> f64 {
    target_distance_sqr(x, cfg) * cfg.gamma_thr
}

/// Errors unless full power toward the target meets the threshold at `x`.
pub fn check_sensing_feasible(x: f64, cfg: &ScenarioConfig) -> Result<()> {
    let available = cfg.m as f64 * cfg.p_max / target_distance_sqr(x, cfg);
    if available + FEASIBILITY_SLACK >= cfg.gamma_thr {
        Ok(())
    } else {
        Err(Error::InfeasibleSensing { x, available, required: cfg.gamma_thr })
    }
}

pub fn is_sensing_feasible(x: f64, cfg: &ScenarioConfig) -> bool {
    check_sensing_feasible(x, cfg).is_ok()
}

/// SNR of MRT toward the user: `beta0 P M / ((x^2 + H^2) sigma2)`.
pub fn mrt_snr(x: f64, cfg: &ScenarioConfig) -> f64 {
    cfg.gamma0() * cfg.p_max * cfg.m as f64 / (x * x + cfg.h * cfg.h)
}

/// User SNR when the sensing window uses MRT toward the target instead.
pub fn target_mrt_snr(x: f64, cfg: &ScenarioConfig) -> f64 {
    let rho = crate::channel::correlation_rho(x, cfg);
    mrt_snr(x, cfg) * rho * rho
}

/// Branch selector: true when `M P rho^2 / d_r^2 >= gamma`.
fn mrt_meets_threshold(rho: f64, dr2: f64, cfg: &ScenarioConfig) -> bool {
    cfg.m as f64 * cfg.p_max * rho * rho / dr2 >= cfg.gamma_thr
}

/// SNR of the constrained branch,
/// `gamma0 d_r^2 (rho sqrt(G) + sqrt(1 - rho^2) sqrt(M P / d_r^2 - G))^2 / (x^2 + H^2)`.
pub fn constrained_snr(x: f64, rho: f64, cfg: &ScenarioConfig) -> f64 {
    let dr2 = target_distance_sqr(x, cfg);
    let spare = (cfg.m as f64 * cfg.p_max / dr2 - cfg.gamma_thr).max(0.0);
    let amp = rho * cfg.gamma_thr.sqrt() + (1.0 - rho * rho).max(0.0).sqrt() * spare.sqrt();
    cfg.gamma0() * dr2 * amp * amp / (x * x + cfg.h * cfg.h)
}

/// Optimal user SNR during sensing at `x`.
pub fn optimal_snr(x: f64, cfg: &ScenarioConfig) -> Result<f64> {
    check_sensing_feasible(x, cfg)?;
    let rho = crate::channel::correlation_rho(x, cfg);
    let dr2 = target_distance_sqr(x, cfg);
    if mrt_meets_threshold(rho, dr2, cfg) {
        Ok(mrt_snr(x, cfg))
    } else {
        Ok(constrained_snr(x, rho, cfg))
    }
}

pub fn branch_at(x: f64, cfg: &ScenarioConfig) -> Branch {
    let rho = crate::channel::correlation_rho(x, cfg);
    if mrt_meets_threshold(rho, target_distance_sqr(x, cfg), cfg) {
        Branch::MrtUser
    } else {
        Branch::Constrained
    }
}

/// Orthonormal basis of span{target, user}: `e_r`, the unit user direction
/// `e_c`, the coefficient `z = e_r^H e_c` and the residual `e_perp` (`None`
/// when `|z| = 1`).
struct SubspaceBasis {
    e_r: Vec<Complex64>,
    z: Complex64,
    e_perp: Option<Vec<Complex64>>,
}

fn subspace_basis(x: f64, cfg: &ScenarioConfig) -> SubspaceBasis {
    let sqrt_m = (cfg.m as f64).sqrt();
    let e_r: Vec<Complex64> = steering_vector(x, cfg.d, cfg).into_inner().into_iter().map(|v| v / sqrt_m).collect();
    let e_c: Vec<Complex64> = steering_vector(x, 0.0, cfg).into_inner().into_iter().map(|v| v / sqrt_m).collect();
    let z = inner(&e_r, &e_c);
    let e_perp = if (1.0 - z.norm()).abs() <= 1e-12 {
        None
    } else {
        let resid: Vec<Complex64> = e_c.iter().zip(&e_r).map(|(c, r)| c - z * r).collect();
        let n = norm_sqr(&resid).sqrt();
        Some(resid.into_iter().map(|v| v / n).collect())
    };
    SubspaceBasis { e_r, z, e_perp }
}

/// Rotates `w` so its first entry is real and non-negative.
fn normalize_phase(mut w: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(first) = w.first().copied() {
        let mag = first.norm();
        if mag > 0.0 {
            let rot = first.conj() / mag;
            for v in &mut w {
                *v *= rot;
            }
            w[0] = Complex64::new(mag, 0.0);
        }
    }
    w
}

/// Solves the sensing-window precoder problem at `x`.
///
/// On the constrained branch the weights are
/// `c e^{j theta} e_r + sqrt(P - c^2) e_perp` with `c = sqrt(G d_r^2 / M)` and
/// `e^{j theta}` the phase of `e_r^H e_c`; the user SNR is then exactly the
/// constrained formula. When the user and target directions coincide there is
/// no residual direction and the limiting solution `c e^{j theta} e_r` is
/// returned.
pub fn solve_sensing_precoder(x: f64, cfg: &ScenarioConfig) -> Result<PrecoderSolution> {
    check_sensing_feasible(x, cfg)?;
    let dr2 = target_distance_sqr(x, cfg);
    let basis = subspace_basis(x, cfg);
    let rho = basis.z.norm().min(1.0);

    let (weights, branch) = if mrt_meets_threshold(rho, dr2, cfg) {
        (mrt_precoder(&user_channel(x, cfg).entries, cfg)?, Branch::MrtUser)
    } else {
        let c2 = (cfg.gamma_thr * dr2 / cfg.m as f64).min(cfg.p_max);
        let c = c2.sqrt();
        let phase = if rho > 0.0 { basis.z / rho } else { Complex64::new(1.0, 0.0) };
        let along = phase * c;
        let w = match &basis.e_perp {
            Some(e_perp) => {
                let rest = (cfg.p_max - c2).max(0.0).sqrt();
                basis.e_r.iter().zip(e_perp).map(|(r, p)| r * along + p * rest).collect()
            }
            None => basis.e_r.iter().map(|r| r * along).collect(),
        };
        (w, Branch::Constrained)
    };
    let weights = normalize_phase(weights);
    Ok(PrecoderSolution { snr: user_snr(&weights, x, cfg), beam_gain: beam_gain(&weights, x, cfg), weights, branch })
}

/// Brute-force maximum of the user SNR over the power-limited, beam-gain
/// feasible precoders inside span{target, user}.
///
/// Precoders are `sqrt(P) (cos(phi) e^{j psi} e_r + sin(phi) e_perp)`. Their
/// beam gain is `M P cos^2(phi)`, so the feasible set is `phi in [0, phi_max]`;
/// both axes carry `grid_n` points and the `phi` axis includes `phi_max`.
pub fn oracle_snr(x: f64, cfg: &ScenarioConfig, grid_n: usize) -> Result<f64> {
    check_sensing_feasible(x, cfg)?;
    let grid_n = grid_n.max(2);
    let basis = subspace_basis(x, cfg);
    let h = user_channel(x, cfg).entries;
    // Projections of the user channel onto the basis.
    let h_r = inner(&h, &basis.e_r);
    let h_p = basis.e_perp.as_ref().map_or(Complex64::new(0.0, 0.0), |e| inner(&h, e));

    let m_p = cfg.m as f64 * cfg.p_max;
    let need = required_beam_gain(x, cfg);
    let cos_min = (need / m_p).min(1.0).sqrt();
    let phi_max = cos_min.acos();

    let psi: Vec<Complex64> =
        (0..grid_n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid_n as f64)).collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..grid_n {
        let phi = phi_max * i as f64 / (grid_n - 1) as f64;
        let (s, c) = phi.sin_cos();
        if m_p * c * c < need * (1.0 - 1e-12) {
            continue;
        }
        let perp_term = h_p * s;
        let along = h_r * c;
        for e in &psi {
            let v = (along * e + perp_term).norm_sqr();
            if v > best {
                best = v;
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::EmptyOracleGrid);
    }
    Ok(best * cfg.p_max / cfg.sigma2)
}
