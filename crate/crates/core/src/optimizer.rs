//! Charging-power optimization: the mean-load objective, the safety and
//! Voronoi-inradius power caps, a deterministic grid search over the
//! feasible range, and the asymptotic closed forms for dense-user regimes.

use crate::analytic::{AnalyticError, EvalContext, Tier};
use crate::numerics::{exponential_integral_ei, grid_maximize, NumericsError};
use crate::params::{ParamsError, ScenarioConfig};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("no feasible charging power: caps give an upper bound {0} below 1")]
    EmptyFeasible(f64),
    #[error("closed form has a nonpositive base ({0}); fall back to grid search")]
    NegativeBase(f64),
}

/// Upper bounds on the charging power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCaps {
    /// from the received-power-density safety limit
    pub cap_safety: f64,
    /// from the mean small-cell Voronoi inradius
    pub cap_voronoi: f64,
    /// which cap (if any) clips the optimum
    pub binding: Binding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Binding {
    None,
    Safety,
    Voronoi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    GridSearch,
    ClosedFormBranch1,
    ClosedFormBranch2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub p_tc_star: f64,
    pub objective_at_star: f64,
    pub method: Method,
    pub caps: PowerCaps,
    pub search_trace: Vec<(f64, f64)>,
}

/// Mean number of other downloading users in a tier-k cell:
/// 1.28 (lambda_u / lambda_k) (P_H A_k_high + P_L A_k_low).
pub fn mean_load(cfg: &ScenarioConfig, ctx: &EvalContext, tier: Tier) -> f64 {
    let k = tier.idx();
    let lambda_k = match tier {
        Tier::Macro => cfg.lambda_macro,
        Tier::Small => cfg.lambda_small,
    };
    1.28 * cfg.lambda_user / lambda_k
        * (ctx.chain.p_high * ctx.assoc.a_high[k] + ctx.chain.p_low * ctx.assoc.a_low[k])
}

/// The rate-coverage objective with each tier's load replaced by its mean.
pub fn mean_load_objective(cfg: &ScenarioConfig, p_tc: f64) -> Result<f64, OptimizerError> {
    let ctx = EvalContext::new(cfg, p_tc)?;
    let r_high = ctx.cond_rate_cov_high();
    let mut total = 0.0;
    for tier in Tier::BOTH {
        let k = tier.idx();
        let r_low = ctx.cond_rate_cov_low(tier)?.value;
        let numerator = ctx.chain.p_high * ctx.assoc.a_high[k] * r_high
            + ctx.chain.p_low * ctx.assoc.a_low[k] * r_low;
        total += numerator / (1.0 + mean_load(cfg, &ctx, tier));
    }
    Ok(total)
}

/// Average received charging-power density per unit P_u, at charging power
/// p_tc (normalized by P_u). Linear in p_tc.
///
/// Closed form of (2 G_m lambda2 p_tc / tan^2(t_m/2)) *
/// [int_0^1 r e^{-pi lambda2 r^2} dr + int_1^inf e^{-pi lambda2 r^2}/r dr],
/// the bracket being (1 - e^{-pi lambda2} - pi lambda2 Ei(-pi lambda2)) /
/// (2 pi lambda2).
pub fn avg_power_density(cfg: &ScenarioConfig, p_tc: f64) -> Result<f64, OptimizerError> {
    let pi = std::f64::consts::PI;
    let x = pi * cfg.lambda_small;
    let bracket = 1.0 - (-x).exp() - x * exponential_integral_ei(-x)?;
    let half_tan = (cfg.beam_width / 2.0).tan();
    Ok(cfg.g_main * p_tc / (pi * half_tan * half_tan) * bracket)
}

/// Largest p_tc whose average received power density stays within the
/// configured eta / P_u limit. Inverts `avg_power_density` exactly.
pub fn safety_cap(cfg: &ScenarioConfig) -> Result<f64, OptimizerError> {
    Ok(cfg.eta_over_pu / avg_power_density(cfg, 1.0)?)
}

/// Mean inradius of a small-cell association region: nothing may out-power
/// the cell before the boundary, so a peer within 2r or a macro within
/// (1 + (P1/P2)^(1/alpha)) r shrinks the inradius below r.
pub fn mean_inradius(cfg: &ScenarioConfig) -> f64 {
    let w = (cfg.p_macro / cfg.p_small).powf(1.0 / cfg.alpha);
    (16.0 * cfg.lambda_small + 4.0 * (1.0 + w) * (1.0 + w) * cfg.lambda_macro).powf(-0.5)
}

/// Charging power at which the gain-inclusive charging range reaches the
/// mean inradius: E[nu]^beta / G_m.
pub fn voronoi_cap(cfg: &ScenarioConfig) -> Result<f64, OptimizerError> {
    Ok(mean_inradius(cfg).powf(cfg.beta) / cfg.g_main)
}

pub fn power_caps(cfg: &ScenarioConfig) -> Result<PowerCaps, OptimizerError> {
    Ok(PowerCaps {
        cap_safety: safety_cap(cfg)?,
        cap_voronoi: voronoi_cap(cfg)?,
        binding: Binding::None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub grid_points: usize,
    pub refine_rounds: usize,
    /// record (p_tc, objective) pairs
    pub trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_points: 256,
            refine_rounds: 4,
            trace: false,
        }
    }
}

fn binding_for(p_star: f64, caps: &PowerCaps, resolution: f64) -> Binding {
    let hi = caps.cap_safety.min(caps.cap_voronoi);
    if p_star < hi - resolution {
        Binding::None
    } else if caps.cap_safety <= caps.cap_voronoi {
        Binding::Safety
    } else {
        Binding::Voronoi
    }
}

/// Grid-maximizes the mean-load objective over p_tc in [1, min(caps)],
/// log-spaced, refining around the incumbent.
pub fn optimal_power(
    cfg: &ScenarioConfig,
    opts: &SearchOptions,
) -> Result<OptimizationResult, OptimizerError> {
    let mut caps = power_caps(cfg)?;
    let hi = caps.cap_safety.min(caps.cap_voronoi);
    if hi < 1.0 {
        return Err(OptimizerError::EmptyFeasible(hi));
    }

    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut first_err: Option<OptimizerError> = None;
    // comparisons run on mantissa-truncated values so that an objective
    // that is flat up to round-off resolves ties toward the smallest power
    let quantize = |v: f64| f64::from_bits(v.to_bits() & !0xFFF);
    let objective = |y: f64| -> f64 {
        let p = y.exp();
        match mean_load_objective(cfg, p.clamp(1.0, hi)) {
            Ok(v) => {
                if opts.trace {
                    trace.push((p, v));
                }
                quantize(v)
            }
            Err(e) => {
                first_err.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };

    // degenerate feasible set: caps pin the power at exactly 1
    if hi == 1.0 {
        let v = mean_load_objective(cfg, 1.0)?;
        return Ok(OptimizationResult {
            p_tc_star: 1.0,
            objective_at_star: v,
            method: Method::GridSearch,
            caps: PowerCaps {
                binding: binding_for(1.0, &caps, 0.0),
                ..caps
            },
            search_trace: if opts.trace { vec![(1.0, v)] } else { vec![] },
        });
    }

    let (y_star, _) = grid_maximize(objective, 0.0, hi.ln(), opts.grid_points, opts.refine_rounds)?;
    if let Some(e) = first_err {
        return Err(e);
    }
    let p_star = y_star.exp().clamp(1.0, hi);
    let v_star = mean_load_objective(cfg, p_star)?;
    let resolution = (hi.ln() / (opts.grid_points - 1) as f64).exp_m1() * p_star;
    caps.binding = binding_for(p_star, &caps, resolution.abs());
    Ok(OptimizationResult {
        p_tc_star: p_star,
        objective_at_star: v_star,
        method: Method::GridSearch,
        caps,
        search_trace: trace,
    })
}

/// Dense-user closed forms. Branch 1 applies when macros are much sparser
/// than small cells (threshold on lambda2/lambda1, default 10); branch 2
/// otherwise. The result is clipped to [1, min(caps)].
pub fn closed_form_optimal(
    cfg: &ScenarioConfig,
    branch_threshold: f64,
) -> Result<OptimizationResult, OptimizerError> {
    let rho_m = crate::analytic::rho_at_threshold(cfg)?;
    let w2 = (cfg.p_macro / cfg.p_small).powf(2.0 / cfg.alpha);
    let dens = cfg.lambda_macro * w2 + cfg.lambda_small;
    let pi = std::f64::consts::PI;
    let ra = cfg.r_hat_a;

    let branch1 = cfg.lambda_small / cfg.lambda_macro > branch_threshold;
    let (base, method) = if branch1 {
        let inner = (1.0 + rho_m) / (6.0 * pi * dens) - ra * ra / 12.0;
        if inner <= 0.0 {
            return Err(OptimizerError::NegativeBase(inner));
        }
        (inner.sqrt() - 0.5 * ra, Method::ClosedFormBranch1)
    } else {
        let inner = 27.0 * pi * rho_m * dens;
        ((inner).powf(-0.5) - 1.5 * ra, Method::ClosedFormBranch2)
    };
    if base <= 0.0 {
        return Err(OptimizerError::NegativeBase(base));
    }

    let mut caps = power_caps(cfg)?;
    let hi = caps.cap_safety.min(caps.cap_voronoi);
    if hi < 1.0 {
        return Err(OptimizerError::EmptyFeasible(hi));
    }
    let unclipped = base.powf(cfg.beta) / cfg.g_main;
    let p_star = unclipped.clamp(1.0, hi);
    caps.binding = binding_for(p_star, &caps, 0.0);
    let objective_at_star = mean_load_objective(cfg, p_star)?;
    Ok(OptimizationResult {
        p_tc_star: p_star,
        objective_at_star,
        method,
        caps,
        search_trace: Vec::new(),
    })
}
