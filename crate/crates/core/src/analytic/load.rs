//! Cell-load distributions: the number of other downloading users sharing
//! the typical user's base station, split by battery class.
//!
//! Each class follows the 3.5-shaped Voronoi-cell load form with mean
//! parameter lambda_u P_class A_k / lambda_k; the total is their discrete
//! convolution.

use super::{AnalyticError, AssociationModel, BatteryChain, Tier};
use crate::numerics::ln_gamma;
use crate::params::ScenarioConfig;
use serde::Serialize;

const SHAPE: f64 = 3.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadPmf {
    pub tier: Tier,
    /// P(N_high = n) for n = 0..=truncation
    pub pmf_high: Vec<f64>,
    /// P(N_low = n)
    pub pmf_low: Vec<f64>,
    /// convolution P(N = n)
    pub pmf_total: Vec<f64>,
    pub truncation: usize,
}

impl LoadPmf {
    /// sum_{n >= n0} P(N = n)/(n + 1)
    pub fn harmonic_share(&self, start_at: usize) -> f64 {
        self.pmf_total
            .iter()
            .enumerate()
            .skip(start_at)
            .map(|(n, p)| p / (n + 1) as f64)
            .sum()
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.pmf_total.iter().sum::<f64>()).max(0.0)
    }
}

/// ln P(N = n) for mean parameter m, in the 3.5-shape load form:
/// P(n) = 3.5^3.5 Gamma(n + 4.5) / (n! Gamma(3.5)) m^n (3.5 + m)^-(n+4.5)
fn class_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    let mut pmf = vec![0.0; n_max + 1];
    if mean <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    let ln_m = mean.ln();
    let ln_sm = (SHAPE + mean).ln();
    let base = SHAPE * SHAPE.ln() - ln_gamma(SHAPE);
    for (n, slot) in pmf.iter_mut().enumerate() {
        let nf = n as f64;
        let ln_p = base + ln_gamma(nf + SHAPE + 1.0) - ln_gamma(nf + 1.0) + nf * ln_m
            - (nf + SHAPE + 1.0) * ln_sm;
        *slot = ln_p.exp();
    }
    pmf
}

/// Index window [lo, hi] outside which the pmf carries less than `eps`
/// mass on each side.
fn support_window(pmf: &[f64], eps: f64) -> (usize, usize) {
    let mut lo = 0;
    let mut acc = 0.0;
    while lo + 1 < pmf.len() && acc + pmf[lo] < eps {
        acc += pmf[lo];
        lo += 1;
    }
    let mut hi = pmf.len() - 1;
    let mut acc = 0.0;
    while hi > lo && acc + pmf[hi] < eps {
        acc += pmf[hi];
        hi -= 1;
    }
    (lo, hi)
}

pub fn mean_parameters(
    cfg: &ScenarioConfig,
    chain: &BatteryChain,
    assoc: &AssociationModel,
    tier: Tier,
) -> (f64, f64) {
    let lambda_k = match tier {
        Tier::Macro => cfg.lambda_macro,
        Tier::Small => cfg.lambda_small,
    };
    let k = tier.idx();
    (
        cfg.lambda_user * chain.p_high * assoc.a_high[k] / lambda_k,
        cfg.lambda_user * chain.p_low * assoc.a_low[k] / lambda_k,
    )
}

pub fn load_pmf(
    cfg: &ScenarioConfig,
    chain: &BatteryChain,
    assoc: &AssociationModel,
    tier: Tier,
    n_max: usize,
) -> Result<LoadPmf, AnalyticError> {
    let (m_high, m_low) = mean_parameters(cfg, chain, assoc, tier);
    let pmf_high = class_pmf(m_high, n_max);
    let pmf_low = class_pmf(m_low, n_max);

    // windowed convolution: both factors are sharply concentrated
    let (hl, hh) = support_window(&pmf_high, 1e-12);
    let (ll, lh) = support_window(&pmf_low, 1e-12);
    let mut pmf_total = vec![0.0f64; n_max + 1];
    for i in hl..=hh {
        let ph = pmf_high[i];
        if ph == 0.0 {
            continue;
        }
        let top = lh.min(n_max - i);
        for j in ll..=top {
            pmf_total[i + j] += ph * pmf_low[j];
        }
    }

    let out = LoadPmf {
        tier,
        pmf_high,
        pmf_low,
        pmf_total,
        truncation: n_max,
    };
    let tail = out.tail_mass();
    if tail > 1e-6 {
        return Err(AnalyticError::Truncation { tail, n_max });
    }
    Ok(out)
}

/// Doubles n_max from 512 until the truncated tail drops below 1e-6.
pub fn load_pmf_auto(
    cfg: &ScenarioConfig,
    chain: &BatteryChain,
    assoc: &AssociationModel,
    tier: Tier,
) -> Result<LoadPmf, AnalyticError> {
    let mut n_max = 512;
    loop {
        match load_pmf(cfg, chain, assoc, tier, n_max) {
            Ok(pmf) => return Ok(pmf),
            Err(AnalyticError::Truncation { .. }) if n_max < (1 << 20) => n_max *= 2,
            Err(e) => return Err(e),
        }
    }
}
