//! Scenario parameters and the flat `key = value` config format.
//!
//! All quantities are stored in linear units. The config loader accepts
//! `beta0_db` and `sigma2_db` as conveniences and converts them on ingestion.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Every physical and mission parameter of one scenario.
///
/// The UAV flies at altitude `h` over the segment joining the user (at
/// `x = 0`) and the sensing target (at `x = d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Altitude, m.
    pub h: f64,
    /// Horizontal user-target distance, m.
    pub d: f64,
    /// Antenna count of the uniform linear array.
    pub m: usize,
    /// Transmit power budget, W.
    pub p_max: f64,
    /// Channel power at the 1 m reference distance, linear.
    pub beta0: f64,
    /// Receiver noise power, W.
    pub sigma2: f64,
    /// Beam-pattern-gain threshold, linear.
    pub gamma_thr: f64,
    /// Mission duration, s.
    pub t_total: f64,
    /// ISAC frame length, s.
    pub t_frame: f64,
    /// Sensing window length, s.
    pub tau0: f64,
    /// Maximum speed, m/s.
    pub v_max: f64,
    /// Initial horizontal position, m.
    pub x_init: f64,
    /// Final horizontal position, m.
    pub x_final: f64,
    /// Antenna spacing over carrier wavelength.
    pub spacing_ratio: f64,
    /// Drop the `M * P_max` array gain from the communication-only rate.
    pub literal_comm_rate: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            h: 50.0,
            d: 400.0,
            m: 10,
            p_max: 0.1,
            beta0: db_to_linear(-30.0),
            sigma2: db_to_linear(-100.0),
            gamma_thr: 6e-5,
            t_total: 500.0,
            t_frame: 5.0,
            tau0: 0.1,
            v_max: 30.0,
            x_init: 400.0,
            x_final: 400.0,
            spacing_ratio: 0.5,
            literal_comm_rate: false,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Keys accepted by [`load_config`], in canonical order.
pub const KNOWN_KEYS: &[&str] = &[
    "H",
    "D",
    "M",
    "P_max",
    "beta0",
    "beta0_db",
    "sigma2",
    "sigma2_db",
    "gamma_thr",
    "T",
    "T_f",
    "tau0",
    "V_max",
    "x_I",
    "x_F",
    "antenna_spacing_ratio",
    "literal_comm_rate",
];

impl ScenarioConfig {
    /// Signal-to-noise scale `beta0 / sigma2`.
    pub fn gamma0(&self) -> f64 {
        self.beta0 / self.sigma2
    }

    /// Number of frames `T / T_f`. Only meaningful on a validated config.
    pub fn frame_count(&self) -> usize {
        (self.t_total / self.t_frame).round() as usize
    }

    /// Distance one frame's non-sensing time covers at full speed.
    pub fn frame_travel(&self) -> f64 {
        (self.t_frame - self.tau0) * self.v_max
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation { key, message: format!("must be finite and > 0, got {v}") })
            }
        }
        fn non_negative(key: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Validation { key, message: format!("must be finite and >= 0, got {v}") })
            }
        }
        positive("H", self.h)?;
        non_negative("D", self.d)?;
        if self.m == 0 {
            return Err(Error::Validation { key: "M", message: "must be >= 1".into() });
        }
        positive("P_max", self.p_max)?;
        positive("beta0", self.beta0)?;
        positive("sigma2", self.sigma2)?;
        positive("gamma_thr", self.gamma_thr)?;
        positive("T", self.t_total)?;
        positive("T_f", self.t_frame)?;
        positive("tau0", self.tau0)?;
        non_negative("V_max", self.v_max)?;
        non_negative("x_I", self.x_init)?;
        non_negative("x_F", self.x_final)?;
        positive("antenna_spacing_ratio", self.spacing_ratio)?;
        if self.tau0 > self.t_frame {
            return Err(Error::Validation {
                key: "tau0",
                message: format!("sensing window {} s exceeds frame length {} s", self.tau0, self.t_frame),
            });
        }
        let ratio = self.t_total / self.t_frame;
        let frames = ratio.round();
        if frames < 1.0 || (frames * self.t_frame - self.t_total).abs() > 1e-9 * self.t_total {
            return Err(Error::Validation {
                key: "T_f",
                message: format!("T / T_f = {ratio} is not a positive integer"),
            });
        }
        Ok(())
    }
}

/// Frame count of a validated config.
pub fn frame_count(cfg: &ScenarioConfig) -> usize {
    cfg.frame_count()
}

/// Parses a flat `key = value` document. Unset keys keep their defaults.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: line_no, message: format!("expected `key = value`, got `{line}`") })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Parse { line: line_no, message: format!("unknown key `{key}`") });
        }
        if value.is_empty() {
            return Err(Error::Parse { line: line_no, message: format!("missing value for `{key}`") });
        }
        if entries.insert(key, (line_no, value)).is_some() {
            return Err(Error::Parse { line: line_no, message: format!("duplicate key `{key}`") });
        }
    }
    for (lin, db) in [("beta0", "beta0_db"), ("sigma2", "sigma2_db")] {
        if entries.contains_key(lin) && entries.contains_key(db) {
            let (line, _) = entries[db];
            return Err(Error::Parse { line, message: format!("`{lin}` and `{db}` are mutually exclusive") });
        }
    }

    let mut cfg = ScenarioConfig::default();
    for (&key, &(line, value)) in &entries {
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Parse { line, message: format!("`{key}`: `{value}` is not a number") })
        };
        match key {
            "H" => cfg.h = num()?,
            "D" => cfg.d = num()?,
            "M" => {
                cfg.m = value.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`M`: `{value}` is not a non-negative integer"),
                })?
            }
            "P_max" => cfg.p_max = num()?,
            "beta0" => cfg.beta0 = num()?,
            "beta0_db" => cfg.beta0 = db_to_linear(num()?),
            "sigma2" => cfg.sigma2 = num()?,
            "sigma2_db" => cfg.sigma2 = db_to_linear(num()?),
            "gamma_thr" => cfg.gamma_thr = num()?,
            "T" => cfg.t_total = num()?,
            "T_f" => cfg.t_frame = num()?,
            "tau0" => cfg.tau0 = num()?,
            "V_max" => cfg.v_max = num()?,
            "x_I" => cfg.x_init = num()?,
            "x_F" => cfg.x_final = num()?,
            "antenna_spacing_ratio" => cfg.spacing_ratio = num()?,
            "literal_comm_rate" => {
                cfg.literal_comm_rate = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: format!("`literal_comm_rate`: `{value}` is not a boolean"),
                        })
                    }
                }
            }
            _ => unreachable!("key list checked above"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Renders a config in the format [`load_config`] reads.
pub fn to_config_text(cfg: &ScenarioConfig) -> String {
    format!(
        "H = {}\nD = {}\nM = {}\nP_max = {}\nbeta0 = {:e}\nsigma2 = {:e}\ngamma_thr = {:e}\nT = {}\nT_f = {}\ntau0 = {}\nV_max = {}\nx_I = {}\nx_F = {}\nantenna_spacing_ratio = {}\nliteral_comm_rate = {}\n",
        cfg.h,
        cfg.d,
        cfg.m,
        cfg.p_max,
        cfg.beta0,
        cfg.sigma2,
        cfg.gamma_thr,
        cfg.t_total,
        cfg.t_frame,
        cfg.tau0,
        cfg.v_max,
        cfg.x_init,
        cfg.x_final,
        cfg.spacing_ratio,
        cfg.literal_comm_rate,
    )
}
