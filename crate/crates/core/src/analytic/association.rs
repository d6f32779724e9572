//! Per-tier association probabilities for high- and low-battery users.
//!
//! High-battery users associate by maximum average received power. Low
//! (battery-depleting) users additionally associate with the nearest small
//! cell whenever it lies within the attraction-extended radius r_s.

use super::{exp_diff, AnalyticError, Tier};
use crate::params::{DerivedQuantities, ScenarioConfig};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssociationModel {
    /// [A1_high, A2_high]
    pub a_high: [f64; 2],
    /// [A1_low, A2_low]
    pub a_low: [f64; 2],
    /// maximum charging range, m
    pub r_c: f64,
    /// r_c + r_hat_a, m
    pub r_s: f64,
    /// M = r_s (P1/P2)^(1/alpha): the equal-received-power macro distance
    /// matching a small cell at r_s
    pub m_distance: f64,
    /// (lambda2/lambda1) (P2/P1)^(2/alpha)
    pub lambda_tilde: f64,
}

/// lambda_k / A_k_high for both tiers: the effective density that governs
/// power-based association distances.
pub(crate) fn effective_densities(cfg: &ScenarioConfig) -> [f64; 2] {
    let ratio = cfg.p_macro / cfg.p_small;
    let s1 = cfg.lambda_macro + cfg.lambda_small * ratio.powf(-2.0 / cfg.alpha);
    let s2 = cfg.lambda_macro * ratio.powf(2.0 / cfg.alpha) + cfg.lambda_small;
    [s1, s2]
}

/// A_k_high = [lambda_k^-1 sum_i lambda_i (P_i/P_k)^(2/alpha)]^-1.
pub fn assoc_prob_high(cfg: &ScenarioConfig, tier: Tier) -> f64 {
    let s = effective_densities(cfg);
    match tier {
        Tier::Macro => cfg.lambda_macro / s[0],
        Tier::Small => cfg.lambda_small / s[1],
    }
}

/// A_k_low = (-1)^k (A2h e^{-pi (lambda2/A2h) r_s^2} - e^{-pi lambda2 r_s^2}) + (k-1).
pub fn assoc_prob_low(cfg: &ScenarioConfig, p_tc: f64, tier: Tier) -> Result<f64, AnalyticError> {
    let d = DerivedQuantities::new(cfg, p_tc)?;
    let s = effective_densities(cfg);
    let a2h = cfg.lambda_small / s[1];
    let a = std::f64::consts::PI * cfg.lambda_small * d.r_s * d.r_s;
    let b = std::f64::consts::PI * s[1] * d.r_s * d.r_s;
    Ok(match tier {
        // e^{-a} - A2h e^{-b}, with b >= a; factored to avoid cancellation
        Tier::Macro => {
            let a1h = cfg.lambda_macro / s[0];
            (-a).exp() * (a1h + a2h * (-(-(b - a)).exp_m1()))
        }
        Tier::Small => 1.0 - (-a).exp() + a2h * (-b).exp(),
    })
}

pub fn association_model(cfg: &ScenarioConfig, p_tc: f64) -> Result<AssociationModel, AnalyticError> {
    let d = DerivedQuantities::new(cfg, p_tc)?;
    let ratio = cfg.p_macro / cfg.p_small;
    Ok(AssociationModel {
        a_high: [
            assoc_prob_high(cfg, Tier::Macro),
            assoc_prob_high(cfg, Tier::Small),
        ],
        a_low: [
            assoc_prob_low(cfg, p_tc, Tier::Macro)?,
            assoc_prob_low(cfg, p_tc, Tier::Small)?,
        ],
        r_c: d.r_c,
        r_s: d.r_s,
        m_distance: d.r_s * ratio.powf(1.0 / cfg.alpha),
        lambda_tilde: cfg.lambda_small / cfg.lambda_macro * ratio.powf(-2.0 / cfg.alpha),
    })
}

// used by the battery module for the charge-band probabilities
pub(crate) fn void_probability(lambda: f64, radius_sq: f64) -> f64 {
    (-std::f64::consts::PI * lambda * radius_sq).exp()
}

/// P(annulus) = e^{-pi lambda r_in^2} - e^{-pi lambda r_out^2}, stable form.
pub(crate) fn annulus_probability(lambda: f64, r_in_sq: f64, r_out_sq: f64) -> f64 {
    let pi = std::f64::consts::PI;
    exp_diff(pi * lambda * r_in_sq, pi * lambda * r_out_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;

    #[test]
    fn high_assoc_matches_direct_formula() {
        // lambda1 = 10, lambda2 = 300 per km2, P1/P2 = 100, alpha = 4
        let cfg = presets::fig3a();
        let a1 = assoc_prob_high(&cfg, Tier::Macro);
        let a2 = assoc_prob_high(&cfg, Tier::Small);
        assert!((a1 - 0.25).abs() < 1e-9, "A1h = {a1}");
        assert!((a2 - 0.75).abs() < 1e-9, "A2h = {a2}");
    }

    #[test]
    fn high_assoc_single_tier_limit() {
        let cfg = ScenarioConfig {
            lambda_small: 1e-30,
            ..presets::fig3a()
        };
        assert!((assoc_prob_high(&cfg, Tier::Macro) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn high_assoc_symmetry() {
        let base = presets::fig3a();
        let cfg = ScenarioConfig {
            p_macro: base.p_small,
            lambda_macro: base.lambda_small,
            ..base
        };
        assert!((assoc_prob_high(&cfg, Tier::Macro) - 0.5).abs() < 1e-12);
        assert!((assoc_prob_high(&cfg, Tier::Small) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn low_assoc_reduces_to_high_without_attraction() {
        // r_s -> 0 limit: shrink both r_c (p_tc -> 1) and r_hat_a, with a
        // tiny lambda_small scale so pi lambda2 r_s^2 -> 0
        let cfg = ScenarioConfig {
            r_hat_a: 0.0,
            lambda_small: 1e-12,
            ..presets::fig3a()
        };
        for tier in Tier::BOTH {
            let low = assoc_prob_low(&cfg, 1.0, tier).unwrap();
            let high = assoc_prob_high(&cfg, tier);
            assert!((low - high).abs() < 1e-6, "{tier:?}: {low} vs {high}");
        }
    }

    #[test]
    fn low_assoc_saturates_for_huge_attraction() {
        let cfg = ScenarioConfig {
            r_hat_a: 1.0e4,
            ..presets::fig3a()
        };
        let a2 = assoc_prob_low(&cfg, 32.0, Tier::Small).unwrap();
        let a1 = assoc_prob_low(&cfg, 32.0, Tier::Macro).unwrap();
        assert!(a2 > 1.0 - 1e-12);
        assert!(a1 < 1e-12);
    }

    #[test]
    fn assoc_probs_sum_to_one_across_randomized_configs() {
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let cfg = ScenarioConfig {
                lambda_macro: (1.0 + 99.0 * next()) * 1e-6,
                lambda_small: (10.0 + 5000.0 * next()) * 1e-6,
                alpha: 2.5 + 3.0 * next(),
                beta: 2.5 + 4.0 * next(),
                r_hat_a: 5.0 * next(),
                ..presets::fig3a()
            }
            .validate()
            .unwrap();
            let p_tc = 1.0 + 500.0 * next();
            let m = association_model(&cfg, p_tc).unwrap();
            assert!((m.a_high[0] + m.a_high[1] - 1.0).abs() < 1e-9);
            assert!((m.a_low[0] + m.a_low[1] - 1.0).abs() < 1e-9);
            for v in m.a_high.iter().chain(m.a_low.iter()) {
                assert!((0.0..=1.0).contains(v));
            }
            // attraction never reduces small-cell association of low users
            assert!(m.a_low[1] >= m.a_high[1] - 1e-12);
        }
    }

    #[test]
    fn small_cell_low_assoc_monotone_in_power_and_attraction() {
        let cfg = presets::fig3a();
        let mut prev = 0.0;
        for p in [1.0, 4.0, 32.0, 256.0, 2048.0] {
            let v = assoc_prob_low(&cfg, p, Tier::Small).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        let mut prev = 0.0;
        for ra in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let c = ScenarioConfig {
                r_hat_a: ra,
                ..cfg
            };
            let v = assoc_prob_low(&c, 32.0, Tier::Small).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
