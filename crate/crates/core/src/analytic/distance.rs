//! Association-distance distributions per tier and battery class.
//!
//! Low-battery users associated with a small cell have a hybrid law: a
//! density inside the charging range, an atom on the charging rim where
//! attracted users accumulate, and a power-association tail beyond r_s.

use super::association::effective_densities;
use super::{BatteryClass, EvalContext, Tier};
use serde::Serialize;

/// Piecewise density + optional point mass, with a closed-form CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssocDistanceDistribution {
    pub tier: Tier,
    pub class: BatteryClass,
    lambda: f64,
    /// effective association density lambda_k / A_k_high
    eff: f64,
    /// normalizing association probability for the class
    norm: f64,
    r_c: f64,
    r_s: f64,
    /// branch split for the macro/low case
    m_distance: f64,
    /// e^{-pi lambda2 r_s^2}
    void_rs: f64,
}

impl AssocDistanceDistribution {
    /// Density at r (the atom, if any, is excluded).
    pub fn pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let pi = std::f64::consts::PI;
        match (self.tier, self.class) {
            (_, BatteryClass::High) => 2.0 * pi * self.eff * r * (-pi * self.eff * r * r).exp(),
            (Tier::Macro, BatteryClass::Low) => {
                if r < self.m_distance {
                    2.0 * pi * self.lambda / self.norm
                        * self.void_rs
                        * r
                        * (-pi * self.lambda * r * r).exp()
                } else {
                    2.0 * pi * self.lambda / self.norm * r * (-pi * self.eff * r * r).exp()
                }
            }
            (Tier::Small, BatteryClass::Low) => {
                if r < self.r_c {
                    2.0 * pi * self.lambda / self.norm * r * (-pi * self.lambda * r * r).exp()
                } else if r < self.r_s {
                    0.0
                } else {
                    2.0 * pi * self.lambda / self.norm * r * (-pi * self.eff * r * r).exp()
                }
            }
        }
    }

    /// Location and mass of the rim atom, when present.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match (self.tier, self.class) {
            (Tier::Small, BatteryClass::Low) => {
                let pi = std::f64::consts::PI;
                let mass = ((-pi * self.lambda * self.r_c * self.r_c).exp() - self.void_rs)
                    / self.norm;
                Some((self.r_c, mass))
            }
            _ => None,
        }
    }

    /// Right-continuous CDF (includes the atom at its location).
    pub fn cdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let pi = std::f64::consts::PI;
        let v = match (self.tier, self.class) {
            (_, BatteryClass::High) => 1.0 - (-pi * self.eff * r * r).exp(),
            (Tier::Macro, BatteryClass::Low) => {
                let m = self.m_distance;
                if r <= m {
                    self.void_rs * (1.0 - (-pi * self.lambda * r * r).exp()) / self.norm
                } else {
                    (self.void_rs * (1.0 - (-pi * self.lambda * m * m).exp())
                        + self.lambda / self.eff
                            * ((-pi * self.eff * m * m).exp() - (-pi * self.eff * r * r).exp()))
                        / self.norm
                }
            }
            (Tier::Small, BatteryClass::Low) => {
                if r < self.r_c {
                    (1.0 - (-pi * self.lambda * r * r).exp()) / self.norm
                } else if r < self.r_s {
                    (1.0 - self.void_rs) / self.norm
                } else {
                    (1.0 - self.void_rs
                        + self.lambda / self.eff
                            * ((-pi * self.eff * self.r_s * self.r_s).exp()
                                - (-pi * self.eff * r * r).exp()))
                        / self.norm
                }
            }
        };
        v.clamp(0.0, 1.0)
    }
}

pub fn assoc_distance_pdf(
    ctx: &EvalContext,
    tier: Tier,
    class: BatteryClass,
) -> AssocDistanceDistribution {
    let cfg = &ctx.cfg;
    let s = effective_densities(cfg);
    let k = tier.idx();
    let lambda = match tier {
        Tier::Macro => cfg.lambda_macro,
        Tier::Small => cfg.lambda_small,
    };
    let norm = match class {
        BatteryClass::High => ctx.assoc.a_high[k],
        BatteryClass::Low => ctx.assoc.a_low[k],
    };
    let pi = std::f64::consts::PI;
    AssocDistanceDistribution {
        tier,
        class,
        lambda,
        eff: s[k],
        norm,
        r_c: ctx.assoc.r_c,
        r_s: ctx.assoc.r_s,
        m_distance: ctx.assoc.m_distance,
        void_rs: (-pi * cfg.lambda_small * ctx.assoc.r_s * ctx.assoc.r_s).exp(),
    }
}
