//! The reproducible experiment harness: independent realizations of
//! (deployment, user population), sequential slots within each, and
//! aggregation into estimates with standard errors taken across
//! realizations.
//!
//! Seeding rule: realization i runs on a ChaCha8 stream keyed by the
//! master seed with stream id i + 1, so reports are bit-reproducible and
//! realizations are independent regardless of execution order.

use super::deployment::{sample_deployment_with_rng, Deployment, Metric};
use super::engine::{
    self, associate_all, downloader_census, draw_downloads, mobility_step, redraw_positions,
    UserRoster,
};
use crate::params::{ParamsError, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid experiment arguments: {0}")]
    InvalidArgs(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentOptions {
    /// window side = window_factor / sqrt(lambda_small), unless overridden
    pub window_factor: f64,
    pub window_override: Option<f64>,
    /// slots discarded before accumulation; None = slots / 5
    pub burn_in: Option<usize>,
    /// users measured for SIR per slot (round-robin over the roster)
    pub measurement_cap: usize,
    /// association-distance samples kept per realization per (tier, class)
    pub distance_cap: usize,
    /// cell-load histogram length
    pub load_hist_cap: usize,
    pub metric: Metric,
    /// fix all fading gains to 1 (validation runs)
    pub unit_fading: bool,
    /// run the cell-range-expansion baseline at this association bias:
    /// battery levels pinned high, no attraction, no charging
    pub cre_bias: Option<f64>,
    /// constant download probability for the baseline; None = u_high.
    /// Matching it to the attraction network's P_H + P_L makes the two
    /// carry the same traffic.
    pub cre_activity: Option<f64>,
    /// measure only users in the central third of the window (plain-metric
    /// edge-effect studies)
    pub inner_third_measurement: bool,
    pub collect_distances: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            window_factor: 20.0,
            window_override: None,
            burn_in: None,
            measurement_cap: 2048,
            distance_cap: 4096,
            load_hist_cap: 4096,
            metric: Metric::Torus,
            unit_fading: false,
            cre_bias: None,
            cre_activity: None,
            inner_third_measurement: false,
            collect_distances: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

pub fn mean_se(values: &[f64]) -> Estimate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Estimate { mean, se: f64::NAN };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Estimate {
        mean,
        se: (var / n as f64).sqrt(),
    }
}

/// Per-realization scalars, exported as CSV rows by the CLI.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RealizationSummary {
    pub realization: usize,
    pub n_users: usize,
    pub n_macro: usize,
    pub n_small: usize,
    pub rate_coverage: f64,
    pub assoc_high: [f64; 2],
    pub assoc_low: [f64; 2],
    pub occupancy: [f64; 4],
    pub charge_low: [f64; 3],
    pub charge_high: f64,
    pub mean_load: [f64; 2],
    pub rim_atom_fraction: f64,
    /// empirical P(SIR > tau) by [tier][class], class 0 = high
    pub cond_coverage: [[f64; 2]; 2],
}

/// Pooled association-distance samples, per [tier][class] with
/// class 0 = high, class 1 = low. Sorted ascending.
#[derive(Debug, Clone, Default)]
pub struct DistancePool {
    pub samples: [[Vec<f64>; 2]; 2],
    pub rim_atom_count: usize,
    /// low-class small-cell users seen while sampling (atom + continuous)
    pub low_small_total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub p_tc: f64,
    pub seed: u64,
    pub realizations: usize,
    pub slots: usize,
    pub burn_in: usize,
    pub window: f64,
    pub mean_user_count: f64,
    pub rate_coverage: Estimate,
    pub assoc_high: [Estimate; 2],
    pub assoc_low: [Estimate; 2],
    pub occupancy: [Estimate; 4],
    pub charge_low: [Estimate; 3],
    pub charge_high: Estimate,
    pub mean_load: [Estimate; 2],
    pub rim_atom_fraction: Estimate,
    /// empirical conditional coverage by [tier][class]
    pub cond_coverage: [[Estimate; 2]; 2],
    /// pooled empirical cell-load pmf per tier
    pub load_pmf: [Vec<f64>; 2],
    pub per_realization: Vec<RealizationSummary>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub distances: DistancePool,
}

struct RealizationAccum {
    slots_measured: usize,
    rate_sum: f64,
    occupancy: [u64; 4],
    assoc: [[u64; 2]; 2], // [class][tier], class 0 = high
    band_low: [u64; 3],
    low_slots: u64,
    band_high: u64,
    high_slots: u64,
    load_hist: [Vec<u64>; 2],
    distances: DistancePool,
    low_small_seen: usize,
    cov_success: [[u64; 2]; 2],
    cov_trials: [[u64; 2]; 2],
}

pub fn run_experiment(
    cfg: &ScenarioConfig,
    p_tc: f64,
    realizations: usize,
    slots: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<MonteCarloReport, SimError> {
    if realizations < 1 {
        return Err(SimError::InvalidArgs("realizations must be >= 1".into()));
    }
    if slots < 1 {
        return Err(SimError::InvalidArgs("slots must be >= 1".into()));
    }
    let burn_in = opts.burn_in.unwrap_or(slots / 5);
    if burn_in >= slots {
        return Err(SimError::InvalidArgs(format!(
            "burn_in {burn_in} must be below slots {slots}"
        )));
    }
    let r_c = cfg.charging_range(p_tc)?;
    let r_s = r_c + cfg.r_hat_a;
    let window = opts
        .window_override
        .unwrap_or(opts.window_factor / cfg.lambda_small.sqrt());

    let mut warnings = Vec::new();
    for (name, lambda) in [("macro", cfg.lambda_macro), ("small", cfg.lambda_small)] {
        let expected = lambda * window * window;
        if expected < 50.0 {
            warnings.push(format!(
                "expected {name} BS count {expected:.2} is below 50; window may be too small"
            ));
        }
    }

    let bias = opts.cre_bias.unwrap_or(1.0);
    let cre = opts.cre_bias.is_some();
    // the baseline runs with a flat download probability and frozen levels
    let cfg = &if cre {
        let act = opts.cre_activity.unwrap_or(cfg.u_high).clamp(0.0, 1.0);
        ScenarioConfig {
            u_low: act,
            u_high: act,
            ..*cfg
        }
    } else {
        *cfg
    };
    let band3 = 3f64.powf(-1.0 / cfg.beta) * r_c;
    let band2 = 2f64.powf(-1.0 / cfg.beta) * r_c;

    let mut accums: Vec<RealizationAccum> = Vec::with_capacity(realizations);
    let mut summaries: Vec<RealizationSummary> = Vec::with_capacity(realizations);
    let mut user_counts: Vec<f64> = Vec::with_capacity(realizations);

    for real in 0..realizations {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(real as u64 + 1);
        let deployment = sample_deployment_with_rng(cfg, window, seed, opts.metric, &mut rng);
        let mean_users = cfg.lambda_user * window * window;
        let n_users = Poisson::new(mean_users)
            .map(|d| d.sample(&mut rng) as usize)
            .unwrap_or(0)
            .max(1);
        user_counts.push(n_users as f64);

        let mut roster = UserRoster::new(n_users, 3);
        let mut acc = RealizationAccum {
            slots_measured: 0,
            rate_sum: 0.0,
            occupancy: [0; 4],
            assoc: [[0; 2]; 2],
            band_low: [0; 3],
            low_slots: 0,
            band_high: 0,
            high_slots: 0,
            load_hist: [
                vec![0u64; opts.load_hist_cap],
                vec![0u64; opts.load_hist_cap],
            ],
            distances: DistancePool::default(),
            low_small_seen: 0,
            cov_success: [[0; 2]; 2],
            cov_trials: [[0; 2]; 2],
        };

        for slot in 0..slots {
            redraw_positions(&deployment, &mut roster, &mut rng);
            mobility_step(cfg, &deployment, &mut roster, p_tc)?;
            associate_all(cfg, &deployment, &mut roster, bias);
            draw_downloads(cfg, &mut roster, &mut rng);

            if slot >= burn_in {
                measure_slot(
                    cfg,
                    &deployment,
                    &roster,
                    &mut acc,
                    opts,
                    slot,
                    r_c,
                    r_s,
                    band2,
                    band3,
                    &mut rng,
                );
            }

            if !cre {
                if cfg.consume_on_success {
                    let tau = cfg.sir_threshold();
                    let flags: Vec<bool> = roster
                        .users
                        .iter()
                        .map(|u| {
                            u.downloading && {
                                let mut fade = || engine::exp_fading(&mut rng);
                                engine::compute_sir(cfg, &deployment, u, &mut fade) > tau
                            }
                        })
                        .collect();
                    let mut it = flags.into_iter();
                    engine::apply_battery_transitions(cfg, &mut roster, r_c, move |_| {
                        it.next().unwrap_or(false)
                    });
                } else {
                    engine::apply_battery_transitions(cfg, &mut roster, r_c, |_| true);
                }
            }
        }

        summaries.push(summarize(real, &deployment, n_users, &acc));
        accums.push(acc);
    }

    // aggregation order is fixed by realization index
    let agg = |f: &dyn Fn(&RealizationSummary) -> f64| -> Estimate {
        mean_se(&summaries.iter().map(|s| f(s)).collect::<Vec<_>>())
    };

    let mut load_pmf = [Vec::new(), Vec::new()];
    for tier in 0..2 {
        let mut pooled = vec![0u64; opts.load_hist_cap];
        for acc in &accums {
            for (slot, v) in pooled.iter_mut().zip(acc.load_hist[tier].iter()) {
                *slot += v;
            }
        }
        let total: u64 = pooled.iter().sum();
        let trim = pooled.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
        load_pmf[tier] = pooled[..trim]
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect();
    }

    let mut distances = DistancePool::default();
    for acc in accums.iter_mut() {
        for t in 0..2 {
            for c in 0..2 {
                distances.samples[t][c].append(&mut acc.distances.samples[t][c]);
            }
        }
        distances.rim_atom_count += acc.distances.rim_atom_count;
        distances.low_small_total += acc.distances.low_small_total;
    }
    for t in 0..2 {
        for c in 0..2 {
            distances.samples[t][c].sort_by(f64::total_cmp);
        }
    }

    Ok(MonteCarloReport {
        p_tc,
        seed,
        realizations,
        slots,
        burn_in,
        window,
        mean_user_count: user_counts.iter().sum::<f64>() / realizations as f64,
        rate_coverage: agg(&|s| s.rate_coverage),
        assoc_high: [agg(&|s| s.assoc_high[0]), agg(&|s| s.assoc_high[1])],
        assoc_low: [agg(&|s| s.assoc_low[0]), agg(&|s| s.assoc_low[1])],
        occupancy: [
            agg(&|s| s.occupancy[0]),
            agg(&|s| s.occupancy[1]),
            agg(&|s| s.occupancy[2]),
            agg(&|s| s.occupancy[3]),
        ],
        charge_low: [
            agg(&|s| s.charge_low[0]),
            agg(&|s| s.charge_low[1]),
            agg(&|s| s.charge_low[2]),
        ],
        charge_high: agg(&|s| s.charge_high),
        mean_load: [agg(&|s| s.mean_load[0]), agg(&|s| s.mean_load[1])],
        rim_atom_fraction: agg(&|s| s.rim_atom_fraction),
        cond_coverage: [
            [
                agg(&|s| s.cond_coverage[0][0]),
                agg(&|s| s.cond_coverage[0][1]),
            ],
            [
                agg(&|s| s.cond_coverage[1][0]),
                agg(&|s| s.cond_coverage[1][1]),
            ],
        ],
        load_pmf,
        per_realization: summaries,
        warnings,
        distances,
    })
}

#[allow(clippy::too_many_arguments)]
fn measure_slot(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    roster: &UserRoster,
    acc: &mut RealizationAccum,
    opts: &ExperimentOptions,
    slot: usize,
    r_c: f64,
    r_s: f64,
    band2: f64,
    band3: f64,
    rng: &mut ChaCha8Rng,
) {
    let n = roster.users.len();
    let census = downloader_census(deployment, roster);

    for u in roster.users.iter() {
        let class = usize::from(u.slot_level <= 1); // 0 high, 1 low
        acc.occupancy[u.slot_level as usize] += 1;
        acc.assoc[class][u.tier as usize] += 1;

        if class == 1 {
            acc.low_slots += 1;
            // gain bands over the pre-attraction distance
            if u.d_small_pre <= band3 {
                acc.band_low[2] += 1;
            } else if u.d_small_pre <= band2 {
                acc.band_low[1] += 1;
            } else if u.d_small_pre <= r_s {
                acc.band_low[0] += 1;
            }
        } else {
            acc.high_slots += 1;
            if u.d_small_pre <= r_c {
                acc.band_high += 1;
            }
        }

        let others = (census[u.bs as usize] - u32::from(u.downloading)) as usize;
        let hist = &mut acc.load_hist[u.tier as usize];
        let idx = others.min(hist.len() - 1);
        hist[idx] += 1;

        if opts.collect_distances {
            let tier = u.tier as usize;
            if tier == 1 && class == 1 {
                if acc.low_small_seen < opts.distance_cap {
                    acc.low_small_seen += 1;
                    acc.distances.low_small_total += 1;
                    let on_rim = u.moved && u.bs == deployment.small_global_index(u.small_idx);
                    if on_rim {
                        acc.distances.rim_atom_count += 1;
                    } else {
                        acc.distances.samples[1][1].push(u.d_serving2.sqrt());
                    }
                }
            } else {
                let bucket = &mut acc.distances.samples[tier][class];
                if bucket.len() < opts.distance_cap {
                    bucket.push(u.d_serving2.sqrt());
                }
            }
        }
    }

    // round-robin SIR measurement subset
    let cap = opts.measurement_cap.min(n).max(1);
    let start = (slot.wrapping_mul(opts.measurement_cap)) % n;
    let indices: Vec<usize> = if opts.inner_third_measurement {
        let lo = deployment.window / 3.0;
        let hi = 2.0 * deployment.window / 3.0;
        let inner: Vec<usize> = (0..n)
            .filter(|&i| {
                let p = roster.users[i].post_sa;
                p[0] >= lo && p[0] < hi && p[1] >= lo && p[1] < hi
            })
            .collect();
        if inner.is_empty() {
            return;
        }
        let cap = opts.measurement_cap.min(inner.len());
        let start = (slot.wrapping_mul(opts.measurement_cap)) % inner.len();
        (0..cap).map(|j| inner[(start + j) % inner.len()]).collect()
    } else {
        (0..cap).map(|j| (start + j) % n).collect()
    };

    // the estimator loop also tallies conditional coverage by tier/class
    let tau = cfg.sir_threshold();
    let mut sum = 0.0;
    let measured = indices.len();
    for i in indices {
        let u = &roster.users[i];
        let weight = engine::download_probability(cfg, u.slot_level);
        if weight == 0.0 {
            continue;
        }
        let success = if opts.unit_fading {
            let mut unit = || 1.0;
            engine::compute_sir(cfg, deployment, u, &mut unit) > tau
        } else {
            let mut fade = || engine::exp_fading(rng);
            engine::compute_sir(cfg, deployment, u, &mut fade) > tau
        };
        let class = usize::from(u.slot_level <= 1);
        acc.cov_trials[u.tier as usize][class] += 1;
        acc.cov_success[u.tier as usize][class] += u64::from(success);
        if success {
            let others = census[u.bs as usize] - u32::from(u.downloading);
            sum += weight / (others + 1) as f64;
        }
    }
    acc.rate_sum += if measured == 0 { 0.0 } else { sum / measured as f64 };
    acc.slots_measured += 1;
}

fn summarize(
    real: usize,
    deployment: &Deployment,
    n_users: usize,
    acc: &RealizationAccum,
) -> RealizationSummary {
    let occ_total: u64 = acc.occupancy.iter().sum();
    let occ = |i: usize| acc.occupancy[i] as f64 / occ_total.max(1) as f64;
    let class_totals = [
        acc.assoc[0][0] + acc.assoc[0][1],
        acc.assoc[1][0] + acc.assoc[1][1],
    ];
    let assoc = |class: usize, tier: usize| {
        acc.assoc[class][tier] as f64 / class_totals[class].max(1) as f64
    };
    let mean_load = |tier: usize| {
        let h = &acc.load_hist[tier];
        let total: u64 = h.iter().sum();
        if total == 0 {
            return 0.0;
        }
        h.iter().enumerate().map(|(n, &c)| n as f64 * c as f64).sum::<f64>() / total as f64
    };
    RealizationSummary {
        realization: real,
        n_users,
        n_macro: deployment.macro_points.len(),
        n_small: deployment.small_points.len(),
        rate_coverage: acc.rate_sum / acc.slots_measured.max(1) as f64,
        assoc_high: [assoc(0, 0), assoc(0, 1)],
        assoc_low: [assoc(1, 0), assoc(1, 1)],
        occupancy: [occ(0), occ(1), occ(2), occ(3)],
        charge_low: [
            acc.band_low[0] as f64 / acc.low_slots.max(1) as f64,
            acc.band_low[1] as f64 / acc.low_slots.max(1) as f64,
            acc.band_low[2] as f64 / acc.low_slots.max(1) as f64,
        ],
        charge_high: acc.band_high as f64 / acc.high_slots.max(1) as f64,
        mean_load: [mean_load(0), mean_load(1)],
        rim_atom_fraction: acc.distances.rim_atom_count as f64
            / acc.distances.low_small_total.max(1) as f64,
        cond_coverage: [
            [
                acc.cov_success[0][0] as f64 / acc.cov_trials[0][0].max(1) as f64,
                acc.cov_success[0][1] as f64 / acc.cov_trials[0][1].max(1) as f64,
            ],
            [
                acc.cov_success[1][0] as f64 / acc.cov_trials[1][0].max(1) as f64,
                acc.cov_success[1][1] as f64 / acc.cov_trials[1][1].max(1) as f64,
            ],
        ],
    }
}
