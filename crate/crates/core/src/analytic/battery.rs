//! Per-slot charge probabilities and the four-level residual-energy
//! Markov chain (states L0..L3, one unit of energy per download).

use super::association::{annulus_probability, void_probability};
use super::AnalyticError;
use crate::numerics::stationary_distribution;
use crate::params::{DerivedQuantities, ScenarioConfig};
use serde::Serialize;

/// Probabilities of gaining battery units in one slot.
///
/// `c_low[i-1]` is the probability that a battery-depleting (attracted)
/// user gains exactly i units; `c_high` is the probability that a
/// non-attracted user gains any charge at all (it sits within r_c of the
/// nearest small cell).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeProbs {
    pub c_low: [f64; 3],
    pub c_high: f64,
}

/// Gain bands: a user at distance d from the nearest small cell gains at
/// least i units iff d <= i^(-1/beta) r_c; attraction extends the
/// one-unit band out to r_s = r_c + r_hat_a.
pub fn charge_probs(cfg: &ScenarioConfig, p_tc: f64) -> Result<ChargeProbs, AnalyticError> {
    let d = DerivedQuantities::new(cfg, p_tc)?;
    let rc2 = d.r_c * d.r_c;
    let band2 = 2f64.powf(-2.0 / cfg.beta) * rc2;
    let band3 = 3f64.powf(-2.0 / cfg.beta) * rc2;
    let l2 = cfg.lambda_small;
    Ok(ChargeProbs {
        c_low: [
            annulus_probability(l2, band2, d.r_s * d.r_s),
            annulus_probability(l2, band3, band2),
            1.0 - void_probability(l2, band3),
        ],
        c_high: 1.0 - void_probability(l2, rc2),
    })
}

/// The battery chain: transition matrix, steady state, and the derived
/// probabilities that a random user is a downloading high/low-battery user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryChain {
    pub c_low: [f64; 3],
    pub c_high: f64,
    /// row-stochastic over (L0, L1, L2, L3)
    pub transition: [[f64; 4]; 4],
    pub steady: [f64; 4],
    /// P_H = (q2 + q3) u_high
    pub p_high: f64,
    /// P_L = q1 u_low
    pub p_low: f64,
}

/// Assembles the transition matrix row for row — attraction-boosted gain
/// bands drive the upward transitions out of L0 and L1, the plain download
/// probabilities drive the downward ones — and solves q T = q.
pub fn battery_chain(cfg: &ScenarioConfig, p_tc: f64) -> Result<BatteryChain, AnalyticError> {
    let cp = charge_probs(cfg, p_tc)?;
    let [c1, c2, c3] = cp.c_low;
    let (ul, uh) = (cfg.u_low, cfg.u_high);

    let transition = [
        [1.0 - (c1 + c2 + c3), c1, c2, c3],
        [ul, 1.0 - ul - (c1 + c2), c1, c2],
        [0.0, ul, 1.0 - ul - c1, c1],
        [0.0, 0.0, uh, 1.0 - uh],
    ];

    let rows: Vec<Vec<f64>> = transition.iter().map(|r| r.to_vec()).collect();
    let q = stationary_distribution(&rows)?;
    let steady = [q[0], q[1], q[2], q[3]];
    Ok(BatteryChain {
        c_low: cp.c_low,
        c_high: cp.c_high,
        transition,
        steady,
        p_high: (steady[2] + steady[3]) * uh,
        p_low: steady[1] * ul,
    })
}
