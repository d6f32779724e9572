//! Closed-form model quantities: association probabilities, charging and
//! battery-chain statistics, cell-load distributions, conditional rate
//! coverages, and their composition into the network rate coverage.
//!
//! All evaluations for one (config, charging power) pair go through
//! [`EvalContext`], which caches the shared constants. Contexts are
//! immutable after construction and safe to share across threads.

mod association;
mod battery;
mod coverage;
mod distance;
mod load;

pub use association::{assoc_prob_high, assoc_prob_low, association_model, AssociationModel};
pub use battery::{battery_chain, charge_probs, BatteryChain, ChargeProbs};
pub use coverage::{CondCoverage, RateCoverageBreakdown};
pub use distance::AssocDistanceDistribution;
pub use load::LoadPmf;

use crate::numerics::{NumericsError, Quadrature};
use crate::params::{DerivedQuantities, ParamsError, ScenarioConfig};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("load pmf truncation: tail mass {tail:.3e} above 1e-6 at n_max = {n_max}")]
    Truncation { tail: f64, n_max: usize },
}

/// Base-station tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Tier {
    Macro,
    Small,
}

impl Tier {
    pub const BOTH: [Tier; 2] = [Tier::Macro, Tier::Small];

    /// 0-based index (macro first).
    pub fn idx(self) -> usize {
        match self {
            Tier::Macro => 0,
            Tier::Small => 1,
        }
    }
}

/// Battery class of a user: high = levels 2..3, low = levels 0..1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BatteryClass {
    High,
    Low,
}

/// e^{-small} - e^{-large} for 0 <= small <= large, without cancellation.
pub(crate) fn exp_diff(small: f64, large: f64) -> f64 {
    debug_assert!(small <= large + 1e-15);
    (-small).exp() * (-(-(large - small).max(0.0)).exp_m1())
}

/// Everything derived from one (config, p_tc) pair.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub cfg: ScenarioConfig,
    pub p_tc: f64,
    pub derived: DerivedQuantities,
    pub assoc: AssociationModel,
    pub charge: ChargeProbs,
    pub chain: BatteryChain,
    pub quad: Quadrature,
    /// rho evaluated at x = M: the factor shared by all coverage terms
    pub rho_m: f64,
}

impl EvalContext {
    pub fn new(cfg: &ScenarioConfig, p_tc: f64) -> Result<Self, AnalyticError> {
        Self::with_quadrature(cfg, p_tc, Quadrature::default())
    }

    pub fn with_quadrature(
        cfg: &ScenarioConfig,
        p_tc: f64,
        quad: Quadrature,
    ) -> Result<Self, AnalyticError> {
        let derived = DerivedQuantities::new(cfg, p_tc)?;
        let assoc = association_model(cfg, p_tc)?;
        let charge = charge_probs(cfg, p_tc)?;
        let chain = battery_chain(cfg, p_tc)?;
        let rho_m = coverage::rho_at_m(cfg, &quad)?;
        Ok(Self {
            cfg: *cfg,
            p_tc,
            derived,
            assoc,
            charge,
            chain,
            quad,
            rho_m,
        })
    }

    /// rho(theta, x): the interference weight seen from association
    /// distance x, given the serving-power normalization constant M.
    pub fn rho(&self, x: f64) -> Result<f64, AnalyticError> {
        coverage::rho(&self.cfg, self.assoc.m_distance, x, &self.quad)
    }

    /// Conditional rate coverage of a high-battery user (tier independent).
    pub fn cond_rate_cov_high(&self) -> f64 {
        1.0 / (1.0 + self.rho_m)
    }

    /// Conditional rate coverage of a low-battery user on the given tier.
    pub fn cond_rate_cov_low(&self, tier: Tier) -> Result<CondCoverage, AnalyticError> {
        coverage::cond_rate_cov_low(self, tier)
    }

    /// Cell-load distribution for one tier, with automatic n_max doubling
    /// from 512 until the tail mass drops below 1e-6.
    pub fn load_pmf_auto(&self, tier: Tier) -> Result<LoadPmf, AnalyticError> {
        load::load_pmf_auto(&self.cfg, &self.chain, &self.assoc, tier)
    }

    pub fn load_pmf(&self, tier: Tier, n_max: usize) -> Result<LoadPmf, AnalyticError> {
        load::load_pmf(&self.cfg, &self.chain, &self.assoc, tier, n_max)
    }

    /// Network rate coverage with the per-tier, per-class breakdown.
    pub fn rate_coverage(&self) -> Result<RateCoverageBreakdown, AnalyticError> {
        coverage::rate_coverage(self)
    }

    /// Association-distance distribution for one tier and battery class.
    pub fn assoc_distance_pdf(&self, tier: Tier, class: BatteryClass) -> AssocDistanceDistribution {
        distance::assoc_distance_pdf(self, tier, class)
    }
}

/// rho evaluated through a fresh context-free call (convenience wrapper).
pub fn rho(cfg: &ScenarioConfig, p_tc: f64, x: f64) -> Result<f64, AnalyticError> {
    let assoc = association_model(cfg, p_tc)?;
    coverage::rho(cfg, assoc.m_distance, x, &Quadrature::default())
}

/// rho at the serving-power exclusion boundary (x = M), which depends on
/// the config only through tau and alpha.
pub fn rho_at_threshold(cfg: &ScenarioConfig) -> Result<f64, AnalyticError> {
    coverage::rho_at_m(cfg, &Quadrature::default())
}

/// Rate coverage at one charging power (convenience wrapper).
pub fn rate_coverage(cfg: &ScenarioConfig, p_tc: f64) -> Result<RateCoverageBreakdown, AnalyticError> {
    EvalContext::new(cfg, p_tc)?.rate_coverage()
}
