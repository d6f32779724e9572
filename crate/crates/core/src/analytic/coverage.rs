//! Conditional and composed rate coverages.
//!
//! The interference weight rho(theta, x) drives everything: for a user
//! served from distance x, the Laplace transform of each interfering
//! tier contributes an exponent proportional to rho evaluated at the
//! tier's exclusion boundary.

use super::load::load_pmf_auto;
use super::{AnalyticError, EvalContext, Tier};
use crate::numerics::{integrate, integrate_to_infinity, Quadrature};
use crate::params::ScenarioConfig;
use serde::Serialize;

/// rho(theta, x) = tau^(2/alpha) * int_{(M/x)^2 tau^(-2/alpha)}^inf
/// du / (1 + u^(alpha/2)), with tau = e^(theta/W) - 1.
pub fn rho(
    cfg: &ScenarioConfig,
    m_distance: f64,
    x: f64,
    quad: &Quadrature,
) -> Result<f64, AnalyticError> {
    let tau = cfg.sir_threshold();
    if tau == 0.0 {
        return Ok(0.0);
    }
    let scale = tau.powf(2.0 / cfg.alpha);
    let ratio = m_distance / x;
    let lower = ratio * ratio / scale;
    let half_alpha = cfg.alpha / 2.0;
    let integral = integrate_to_infinity(quad, |u| 1.0 / (1.0 + u.powf(half_alpha)), lower)?;
    Ok(scale * integral)
}

/// rho at x = M, where the lower limit reduces to tau^(-2/alpha).
pub fn rho_at_m(cfg: &ScenarioConfig, quad: &Quadrature) -> Result<f64, AnalyticError> {
    // any positive x works since only M/x enters; use x = M = 1
    rho(cfg, 1.0, 1.0, quad)
}

/// A conditional coverage with its sub-terms exposed and any numerical
/// range excursions recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondCoverage {
    pub value: f64,
    pub terms: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

fn clamp_unit(label: &str, v: f64, warnings: &mut Vec<String>) -> f64 {
    if v < -1e-6 || v > 1.0 + 1e-6 {
        warnings.push(format!("{label} = {v:.6e} left [0, 1]; clamped"));
    }
    v.clamp(0.0, 1.0)
}

/// Low-battery conditional rate coverage for one tier.
///
/// Tier 1 sums the far (power-associated) branch and the near branch whose
/// small-cell interferers are excluded beyond r_s; tier 2 sums the far
/// branch, the in-range branch, and the rim atom.
pub fn cond_rate_cov_low(ctx: &EvalContext, tier: Tier) -> Result<CondCoverage, AnalyticError> {
    let cfg = &ctx.cfg;
    let pi = std::f64::consts::PI;
    let assoc = &ctx.assoc;
    let rho_m = ctx.rho_m;
    let (l1, l2) = (cfg.lambda_macro, cfg.lambda_small);
    let (a1h, a2h) = (assoc.a_high[0], assoc.a_high[1]);
    let cap_l1 = (1.0 + rho_m) / a1h;
    let cap_l2 = (1.0 + rho_m) / a2h;
    let r_s = assoc.r_s;
    let r_c = assoc.r_c;
    let m = assoc.m_distance;
    let a = pi * l2 * r_s * r_s;

    let mut warnings = Vec::new();
    let mut terms = Vec::new();

    let value = match tier {
        Tier::Macro => {
            let a1l = assoc.a_low[0];
            let far = (-a * cap_l2).exp() / (cap_l1 * a1l);
            // near branch: serving macro at r < M, small cells pushed past r_s
            let lambda_tilde = assoc.lambda_tilde;
            let mut inner_err: Option<AnalyticError> = None;
            let integrand = |r: f64| {
                if r <= 0.0 {
                    return 0.0;
                }
                match rho(cfg, m, r, &ctx.quad) {
                    Ok(rr) => {
                        2.0 * pi
                            * l1
                            * r
                            * (-pi * l1 * r * r * (1.0 + rho_m + lambda_tilde * rr)).exp()
                    }
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        0.0
                    }
                }
            };
            let integral = integrate(&ctx.quad, integrand, 0.0, m)?;
            if let Some(e) = inner_err {
                return Err(e);
            }
            let near = (-a).exp() / a1l * integral;
            let far = clamp_unit("R1_low far term", far, &mut warnings);
            let near = clamp_unit("R1_low near term", near, &mut warnings);
            terms.push(("far".to_string(), far));
            terms.push(("near".to_string(), near));
            far + near
        }
        Tier::Small => {
            let a2l = assoc.a_low[1];
            let far = (-a * cap_l2).exp() / (cap_l2 * a2l);
            let in_range_exponent = pi * l2 * r_c * r_c * (1.0 + rho_m / a2h);
            let in_range =
                a2h * (-(-in_range_exponent).exp_m1()) / (a2l * (a2h + rho_m));
            let rim = ((-in_range_exponent).exp()
                - (-(pi * l2 * r_c * r_c * rho_m / a2h + a)).exp())
                / a2l;
            let far = clamp_unit("R2_low far term", far, &mut warnings);
            let in_range = clamp_unit("R2_low in-range term", in_range, &mut warnings);
            let rim = clamp_unit("R2_low rim term", rim, &mut warnings);
            terms.push(("far".to_string(), far));
            terms.push(("in_range".to_string(), in_range));
            terms.push(("rim".to_string(), rim));
            far + in_range + rim
        }
    };
    let value = clamp_unit("conditional coverage", value, &mut warnings);
    Ok(CondCoverage {
        value,
        terms,
        warnings,
    })
}

/// Rate coverage with the per-tier, per-class pieces it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCoverageBreakdown {
    /// composed network rate coverage
    pub r_total: f64,
    /// conditional coverages [tier][class]: [[R1h, R1l], [R2h, R2l]]
    pub r_cond: [[f64; 2]; 2],
    /// load-and-association weighted components, same layout
    pub components: [[f64; 2]; 2],
    /// per-tier harmonic load factors E[1/(N_k + 1)]
    pub load_share: [f64; 2],
    pub warnings: Vec<String>,
}

pub fn rate_coverage(ctx: &EvalContext) -> Result<RateCoverageBreakdown, AnalyticError> {
    let start_at = usize::from(ctx.cfg.load_sum_from_one);
    let r_high = ctx.cond_rate_cov_high();
    let mut r_cond = [[0.0; 2]; 2];
    let mut components = [[0.0; 2]; 2];
    let mut load_share = [0.0; 2];
    let mut warnings = Vec::new();
    let mut total = 0.0;

    for tier in Tier::BOTH {
        let k = tier.idx();
        let low = cond_rate_cov_low(ctx, tier)?;
        warnings.extend(low.warnings.iter().cloned());
        let pmf = load_pmf_auto(&ctx.cfg, &ctx.chain, &ctx.assoc, tier)?;
        let share = pmf.harmonic_share(start_at);
        let high_part = ctx.chain.p_high * ctx.assoc.a_high[k] * r_high;
        let low_part = ctx.chain.p_low * ctx.assoc.a_low[k] * low.value;
        r_cond[k] = [r_high, low.value];
        components[k] = [share * high_part, share * low_part];
        load_share[k] = share;
        total += share * (high_part + low_part);
    }

    Ok(RateCoverageBreakdown {
        r_total: total.clamp(0.0, 1.0),
        r_cond,
        components,
        load_share,
        warnings,
    })
}
