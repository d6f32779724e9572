//! Scenario parameters in one internal unit system (meters, watts, hertz,
//! per-m2 densities) plus the quantities derived from them.
//!
//! Conversions from the field units quoted in configs (dBm, per-km2, MHz,
//! Mbps, dBi) happen exactly once, at ingestion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// All model parameters, already normalized to SI / linear units.
///
/// `eta_over_pu` carries the safety limit as the single ratio eta/P_u
/// (per m2); the per-slot battery unit P_u never needs an absolute value
/// anywhere else. Battery capacity is fixed at 3 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// tier-1 (macro) BS density, per m2
    pub lambda_macro: f64,
    /// tier-2 (small cell) BS density, per m2
    pub lambda_small: f64,
    /// user density, per m2
    pub lambda_user: f64,
    /// macro transmit power, W
    pub p_macro: f64,
    /// small-cell transmit power, W
    pub p_small: f64,
    /// information path-loss exponent (> 2)
    pub alpha: f64,
    /// charging path-loss exponent (> 2)
    pub beta: f64,
    /// bandwidth, Hz
    pub bandwidth: f64,
    /// target rate, bit/s
    pub rate_threshold: f64,
    /// download probability at battery level L1
    pub u_low: f64,
    /// download probability at levels L2 and L3
    pub u_high: f64,
    /// maximum spatial-attraction distance, m
    pub r_hat_a: f64,
    /// main-lobe gain, linear
    pub g_main: f64,
    /// charging beam width, rad
    pub beam_width: f64,
    /// safety limit eta / P_u, per m2
    pub eta_over_pu: f64,
    /// battery capacity in units of P_u; must be 3
    pub battery_capacity_units: u32,
    /// fold the main-lobe gain into the charging range: r_c = (G_m p_tc)^(1/beta)
    pub fold_gain_into_rc: bool,
    /// battery consumption only on a download that clears the rate threshold
    pub consume_on_success: bool,
    /// start the cell-load sum at n = 1 instead of n = 0
    pub load_sum_from_one: bool,
}

pub fn dbm_to_watts(x: f64) -> f64 {
    10f64.powf((x - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x * 1e-6
}

pub fn per_m2_to_per_km2(x: f64) -> f64 {
    x * 1e6
}

pub fn dbi_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

impl ScenarioConfig {
    /// Checks every invariant, returning the config unchanged if all hold.
    /// The error names each violated invariant.
    pub fn validate(self) -> Result<Self, ParamsError> {
        let mut errs = Vec::new();
        if !(self.lambda_macro > 0.0) {
            errs.push("lambda_macro must be positive".into());
        }
        if !(self.lambda_small > 0.0) {
            errs.push("lambda_small must be positive".into());
        }
        if !(self.lambda_user > 0.0) {
            errs.push("lambda_user must be positive".into());
        }
        if !(self.p_small > 0.0) {
            errs.push("p_small must be positive".into());
        }
        if !(self.p_macro >= self.p_small) {
            errs.push("p_macro must be >= p_small".into());
        }
        if !(self.alpha > 2.0) {
            errs.push("alpha must exceed 2".into());
        }
        if !(self.beta > 2.0) {
            errs.push("beta must exceed 2".into());
        }
        if !(self.bandwidth > 0.0) {
            errs.push("bandwidth must be positive".into());
        }
        if !(self.rate_threshold >= 0.0) {
            errs.push("rate_threshold must be nonnegative".into());
        }
        if !(self.u_low >= 0.0) {
            errs.push("u_low must be nonnegative".into());
        }
        if !(self.u_high >= self.u_low) {
            errs.push("u_high must be >= u_low".into());
        }
        if !(self.u_high <= 1.0) {
            errs.push("u_high must not exceed 1".into());
        }
        if !(self.r_hat_a >= 0.0) {
            errs.push("r_hat_a must be nonnegative".into());
        }
        if !(self.g_main > 0.0) {
            errs.push("g_main must be positive".into());
        }
        if !(self.beam_width > 0.0 && self.beam_width < std::f64::consts::PI) {
            errs.push("beam_width must lie in (0, pi)".into());
        }
        if !(self.eta_over_pu > 0.0) {
            errs.push("eta_over_pu must be positive".into());
        }
        if self.battery_capacity_units != 3 {
            errs.push("battery_capacity_units is fixed at 3".into());
        }
        if errs.is_empty() {
            Ok(self)
        } else {
            Err(ParamsError::Validation(errs))
        }
    }

    /// Maximum charging range r_c = p_tc^(1/beta) in meters, for the
    /// charging transmit power normalized by P_u (so p_tc >= 1).
    /// With `fold_gain_into_rc` the gain enters: r_c = (G_m p_tc)^(1/beta).
    pub fn charging_range(&self, p_tc: f64) -> Result<f64, ParamsError> {
        if !(p_tc >= 1.0) {
            return Err(ParamsError::Domain(format!(
                "normalized charging power must be >= 1, got {p_tc}"
            )));
        }
        let effective = if self.fold_gain_into_rc {
            self.g_main * p_tc
        } else {
            p_tc
        };
        Ok(effective.powf(1.0 / self.beta))
    }

    /// SIR threshold tau = e^(theta/W) - 1.
    pub fn sir_threshold(&self) -> f64 {
        (self.rate_threshold / self.bandwidth).exp_m1()
    }

    pub fn power_ratio(&self) -> f64 {
        self.p_macro / self.p_small
    }
}

/// Quantities computed from a config and a charging power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// maximum charging range, m
    pub r_c: f64,
    /// attraction-extended radius r_c + r_hat_a, m
    pub r_s: f64,
    /// tau = e^(theta/W) - 1
    pub sir_threshold: f64,
    /// P1 / P2
    pub power_ratio: f64,
}

impl DerivedQuantities {
    pub fn new(cfg: &ScenarioConfig, p_tc: f64) -> Result<Self, ParamsError> {
        let r_c = cfg.charging_range(p_tc)?;
        Ok(Self {
            r_c,
            r_s: r_c + cfg.r_hat_a,
            sir_threshold: cfg.sir_threshold(),
            power_ratio: cfg.power_ratio(),
        })
    }
}

/// Named parameter sets used throughout the docs and tests.
///
/// Values a scenario description leaves open (u_low, u_high, beam_width,
/// eta_over_pu) are project defaults, documented in the README.
pub mod presets {
    use super::*;

    /// Sparse small cells, moderate user density.
    pub fn fig3a() -> ScenarioConfig {
        ScenarioConfig {
            lambda_macro: per_km2_to_per_m2(10.0),
            lambda_small: per_km2_to_per_m2(300.0),
            lambda_user: per_km2_to_per_m2(2.0e4),
            p_macro: dbm_to_watts(43.0),
            p_small: dbm_to_watts(23.0),
            alpha: 4.0,
            beta: 5.0,
            bandwidth: 10.0e6,
            rate_threshold: 1.0e6,
            u_low: 0.3,
            u_high: 0.3,
            r_hat_a: 2.0,
            g_main: dbi_to_linear(20.0),
            beam_width: 0.35,
            eta_over_pu: 1.5e4,
            battery_capacity_units: 3,
            fold_gain_into_rc: false,
            consume_on_success: false,
            load_sum_from_one: false,
        }
    }

    /// Dense small cells, very high user density.
    pub fn fig3b() -> ScenarioConfig {
        ScenarioConfig {
            lambda_small: per_km2_to_per_m2(3.0e3),
            lambda_user: per_km2_to_per_m2(1.0e7),
            ..fig3a()
        }
    }

    /// Density/usage-ratio sweeps: lower gain and user density.
    pub fn fig4() -> ScenarioConfig {
        ScenarioConfig {
            lambda_user: per_km2_to_per_m2(1.0e4),
            g_main: dbi_to_linear(10.0),
            ..fig3a()
        }
    }

    pub fn by_name(name: &str) -> Option<ScenarioConfig> {
        match name {
            "fig3a" => Some(fig3a()),
            "fig3b" => Some(fig3b()),
            "fig4" => Some(fig4()),
            _ => None,
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        presets::fig3a()
    }
}

/// Parses the `key = value [unit]` config format. Unknown keys and malformed
/// lines are errors; fields not mentioned keep their `base` value.
///
/// Recognized unit suffixes: dBm, dBi, per_km2, per_m2, Hz/kHz/MHz/GHz,
/// bps/kbps/Mbps/Gbps, m, cm, rad.
pub fn parse_config_str(text: &str, base: ScenarioConfig) -> Result<ScenarioConfig, ParamsError> {
    let mut cfg = base;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ParamsError::Parse(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let mut parts = value.trim().split_whitespace();
        let num_str = parts
            .next()
            .ok_or_else(|| ParamsError::Parse(format!("line {}: missing value", lineno + 1)))?;
        let unit = parts.next().unwrap_or("");
        if parts.next().is_some() {
            return Err(ParamsError::Parse(format!(
                "line {}: trailing tokens after unit",
                lineno + 1
            )));
        }

        if matches!(
            key,
            "fold_gain_into_rc" | "consume_on_success" | "load_sum_from_one"
        ) {
            let b = match num_str {
                "true" | "1" => true,
                "false" | "0" => false,
                other => {
                    return Err(ParamsError::Parse(format!(
                        "line {}: expected boolean, got `{other}`",
                        lineno + 1
                    )))
                }
            };
            match key {
                "fold_gain_into_rc" => cfg.fold_gain_into_rc = b,
                "consume_on_success" => cfg.consume_on_success = b,
                _ => cfg.load_sum_from_one = b,
            }
            continue;
        }

        let x: f64 = num_str.parse().map_err(|_| {
            ParamsError::Parse(format!("line {}: `{num_str}` is not a number", lineno + 1))
        })?;
        let converted = match unit {
            "" | "rad" | "W" | "m2" => x,
            "dBm" => dbm_to_watts(x),
            "dBi" => dbi_to_linear(x),
            "per_km2" => per_km2_to_per_m2(x),
            "per_m2" => x,
            "Hz" => x,
            "kHz" => x * 1e3,
            "MHz" => x * 1e6,
            "GHz" => x * 1e9,
            "bps" => x,
            "kbps" => x * 1e3,
            "Mbps" => x * 1e6,
            "Gbps" => x * 1e9,
            "m" => x,
            "cm" => x * 1e-2,
            other => {
                return Err(ParamsError::Parse(format!(
                    "line {}: unknown unit `{other}`",
                    lineno + 1
                )))
            }
        };

        match key {
            "lambda_macro" => cfg.lambda_macro = converted,
            "lambda_small" => cfg.lambda_small = converted,
            "lambda_user" => cfg.lambda_user = converted,
            "p_macro" => cfg.p_macro = converted,
            "p_small" => cfg.p_small = converted,
            "alpha" => cfg.alpha = converted,
            "beta" => cfg.beta = converted,
            "bandwidth" => cfg.bandwidth = converted,
            "rate_threshold" => cfg.rate_threshold = converted,
            "u_low" => cfg.u_low = converted,
            "u_high" => cfg.u_high = converted,
            "r_hat_a" => cfg.r_hat_a = converted,
            "g_main" => cfg.g_main = converted,
            "beam_width" => cfg.beam_width = converted,
            "eta_over_pu" => cfg.eta_over_pu = converted,
            "battery_capacity_units" => cfg.battery_capacity_units = converted as u32,
            other => {
                return Err(ParamsError::Parse(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    cfg.validate()
}
