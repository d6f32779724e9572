//! Per-slot user dynamics: uniform position redraw, spatial attraction
//! toward the nearest small cell's charging rim, max-received-power
//! association (optionally biased), Rayleigh/SIR draws, and the
//! consume-then-charge battery transition.

use super::deployment::Deployment;
use crate::params::{ParamsError, ScenarioConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const LEVELS: u8 = 4;

#[derive(Debug, Clone, Copy)]
pub struct User {
    /// residual battery level 0..=3
    pub level: u8,
    /// level at the start of the current slot (drives this slot's download)
    pub slot_level: u8,
    /// phase-1 uniform position
    pub pos: [f64; 2],
    /// position after spatial attraction
    pub post_sa: [f64; 2],
    /// moved to the charging rim this slot
    pub moved: bool,
    /// downloading this slot
    pub downloading: bool,
    /// associated tier: 0 = macro, 1 = small
    pub tier: u8,
    /// associated BS, global index (macros first)
    pub bs: u32,
    /// nearest small cell, tier-local index
    pub small_idx: u32,
    /// distance to the nearest small cell after SA
    pub d_small: f64,
    /// distance to the nearest small cell before SA
    pub d_small_pre: f64,
    /// squared distance to the serving BS
    pub d_serving2: f64,
}

#[derive(Debug, Clone)]
pub struct UserRoster {
    pub users: Vec<User>,
}

impl UserRoster {
    pub fn new(count: usize, initial_level: u8) -> Self {
        Self {
            users: vec![
                User {
                    level: initial_level,
                    slot_level: initial_level,
                    pos: [0.0, 0.0],
                    post_sa: [0.0, 0.0],
                    moved: false,
                    downloading: false,
                    tier: 0,
                    bs: 0,
                    small_idx: 0,
                    d_small: f64::INFINITY,
                    d_small_pre: f64::INFINITY,
                    d_serving2: f64::INFINITY,
                };
                count
            ],
        }
    }
}

/// Download probability by battery level.
pub fn download_probability(cfg: &ScenarioConfig, level: u8) -> f64 {
    match level {
        0 => 0.0,
        1 => cfg.u_low,
        _ => cfg.u_high,
    }
}

/// Phase 1: users are uniformly redistributed over the window.
pub fn redraw_positions(deployment: &Deployment, roster: &mut UserRoster, rng: &mut ChaCha8Rng) {
    let w = deployment.window;
    for u in roster.users.iter_mut() {
        u.pos = [rng.random::<f64>() * w, rng.random::<f64>() * w];
        u.post_sa = u.pos;
        u.moved = false;
    }
}

/// Phase 2: battery-depleting users (levels 0 and 1) within the attraction
/// band (r_c, r_c + r_hat_a] of their nearest small cell move along the
/// shortest path onto the charging rim at distance exactly r_c. Everyone
/// else keeps their position. Also refreshes each user's nearest-small-cell
/// distance for the charging step.
pub fn mobility_step(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    roster: &mut UserRoster,
    p_tc: f64,
) -> Result<(), ParamsError> {
    let r_c = cfg.charging_range(p_tc)?;
    let r_s = r_c + cfg.r_hat_a;
    for u in roster.users.iter_mut() {
        let (idx, d2) = match deployment.nearest_small(u.pos) {
            Some(hit) => hit,
            None => {
                u.small_idx = u32::MAX;
                u.d_small = f64::INFINITY;
                u.d_small_pre = f64::INFINITY;
                continue;
            }
        };
        let d = d2.sqrt();
        u.small_idx = idx;
        u.d_small_pre = d;
        u.d_small = d;
        u.post_sa = u.pos;
        u.moved = false;
        if u.level <= 1 && d > r_c && d <= r_s {
            // walk toward the BS until the rim; nearest small cell is
            // unchanged because every other distance shrinks by less
            let bs = deployment.small_points[idx as usize];
            let step = deployment.delta(u.pos, bs);
            let scale = (d - r_c) / d;
            let w = deployment.window;
            let mut q = [u.pos[0] + step[0] * scale, u.pos[1] + step[1] * scale];
            for v in q.iter_mut() {
                *v = v.rem_euclid(w);
            }
            u.post_sa = q;
            u.d_small = r_c;
            u.moved = true;
        }
    }
    Ok(())
}

/// Associates one user by maximum biased average received power over the
/// post-SA position: argmax of P_k bias_k d_k^(-alpha), with bias_1 = 1.
/// Returns (tier, global BS index).
pub fn associate(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    user: &mut User,
    bias: f64,
) -> (u8, u32) {
    // tier 2 wins iff d1^alpha * P2 * bias > d2^alpha * P1, i.e.
    // d1 > kappa d2 with kappa = (P1 / (P2 bias))^(1/alpha)
    let kappa2 = (cfg.p_macro / (cfg.p_small * bias)).powf(2.0 / cfg.alpha);
    let near_macro = deployment.nearest_macro(user.post_sa);
    let near_small = if user.moved {
        // the rim BS stayed nearest; avoid a second grid query
        Some((user.small_idx, user.d_small * user.d_small))
    } else if user.small_idx != u32::MAX {
        Some((user.small_idx, user.d_small * user.d_small))
    } else {
        None
    };
    let (tier, bs, d2) = match (near_macro, near_small) {
        (Some((mi, md2)), Some((si, sd2))) => {
            if md2 > kappa2 * sd2 {
                (1, deployment.small_global_index(si), sd2)
            } else {
                (0, mi, md2)
            }
        }
        (Some((mi, md2)), None) => (0, mi, md2),
        (None, Some((si, sd2))) => (1, deployment.small_global_index(si), sd2),
        (None, None) => panic!("association requires at least one base station"),
    };
    user.tier = tier;
    user.bs = bs;
    user.d_serving2 = d2;
    (tier, bs)
}

pub fn associate_all(cfg: &ScenarioConfig, deployment: &Deployment, roster: &mut UserRoster, bias: f64) {
    for u in roster.users.iter_mut() {
        associate(cfg, deployment, u, bias);
    }
}

/// SIR of one user: independent unit-mean exponential fading per link,
/// interference from every other BS of both tiers. Infinite when the
/// serving BS is alone in the window.
pub fn compute_sir<F: FnMut() -> f64>(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    user: &User,
    fading: &mut F,
) -> f64 {
    let neg_half_alpha = -cfg.alpha / 2.0;
    let alpha4 = (cfg.alpha - 4.0).abs() < 1e-12;
    let path = |d2: f64| -> f64 {
        if alpha4 {
            1.0 / (d2 * d2)
        } else {
            d2.powf(neg_half_alpha)
        }
    };
    let p_serv = if user.tier == 0 { cfg.p_macro } else { cfg.p_small };
    let signal = p_serv * fading() * path(user.d_serving2);

    let mut interference = 0.0;
    let n_macro = deployment.macro_points.len() as u32;
    for (i, &q) in deployment.macro_points.iter().enumerate() {
        if user.bs == i as u32 {
            continue;
        }
        interference += cfg.p_macro * fading() * path(deployment.dist2(user.post_sa, q));
    }
    for (i, &q) in deployment.small_points.iter().enumerate() {
        if user.bs == n_macro + i as u32 {
            continue;
        }
        interference += cfg.p_small * fading() * path(deployment.dist2(user.post_sa, q));
    }
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

/// Draws this slot's download indicators from the current battery levels
/// and freezes `slot_level`.
pub fn draw_downloads(cfg: &ScenarioConfig, roster: &mut UserRoster, rng: &mut ChaCha8Rng) {
    for u in roster.users.iter_mut() {
        u.slot_level = u.level;
        let p = download_probability(cfg, u.level);
        u.downloading = p > 0.0 && rng.random::<f64>() < p;
    }
}

/// Battery units gained this slot given the post-SA nearest-small-cell
/// distance: >= i units iff d <= i^(-1/beta) r_c.
pub fn charge_gain(d_small: f64, r_c: f64, beta: f64) -> u8 {
    if d_small <= 3f64.powf(-1.0 / beta) * r_c {
        3
    } else if d_small <= 2f64.powf(-1.0 / beta) * r_c {
        2
    } else if d_small <= r_c {
        1
    } else {
        0
    }
}

/// Applies consume-then-charge to every user using the already-drawn
/// download indicators. `success` reports whether a downloading user's
/// rate draw succeeded; it is consulted only under consume_on_success.
pub fn apply_battery_transitions<S: FnMut(&User) -> bool>(
    cfg: &ScenarioConfig,
    roster: &mut UserRoster,
    r_c: f64,
    mut success: S,
) {
    let consume_gate = cfg.consume_on_success;
    let band3 = 3f64.powf(-1.0 / cfg.beta) * r_c;
    let band2 = 2f64.powf(-1.0 / cfg.beta) * r_c;
    for u in roster.users.iter_mut() {
        let mut level = u.level;
        if u.downloading {
            let consumes = if consume_gate { success(u) } else { true };
            if consumes {
                level = level.saturating_sub(1);
            }
        }
        let gain = if u.d_small <= band3 {
            3
        } else if u.d_small <= band2 {
            2
        } else if u.d_small <= r_c {
            1
        } else {
            0
        };
        u.level = (level + gain).min(LEVELS - 1);
    }
}

/// The full battery step: download draw with probability u(L), one unit
/// consumed per download (floor at empty), then the charging gain.
pub fn battery_step(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    roster: &mut UserRoster,
    p_tc: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(), ParamsError> {
    let r_c = cfg.charging_range(p_tc)?;
    draw_downloads(cfg, roster, rng);
    if cfg.consume_on_success {
        let tau = cfg.sir_threshold();
        // evaluate download successes first to split the roster borrow
        let flags: Vec<bool> = roster
            .users
            .iter()
            .map(|u| {
                u.downloading && {
                    let mut fade = || exp_fading(rng);
                    compute_sir(cfg, deployment, u, &mut fade) > tau
                }
            })
            .collect();
        let mut it = flags.into_iter();
        apply_battery_transitions(cfg, roster, r_c, move |_| it.next().unwrap_or(false));
    } else {
        apply_battery_transitions(cfg, roster, r_c, |_| true);
    }
    Ok(())
}

/// Unit-mean exponential fading from a uniform draw.
pub fn exp_fading(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Downloading-user census per global BS index.
pub fn downloader_census(deployment: &Deployment, roster: &UserRoster) -> Vec<u32> {
    let mut census = vec![0u32; deployment.n_bs()];
    for u in roster.users.iter() {
        if u.downloading {
            census[u.bs as usize] += 1;
        }
    }
    census
}

/// The per-slot rate-coverage contribution over a measured subset:
/// mean over measured users of u(L) / (N + 1) * 1{SIR > tau}, with N the
/// census count of other downloading users at the user's BS.
pub fn estimate_rate_coverage_subset<F: FnMut() -> f64>(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    roster: &UserRoster,
    census: &[u32],
    indices: impl Iterator<Item = usize>,
    fading: &mut F,
) -> (f64, usize) {
    let tau = cfg.sir_threshold();
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in indices {
        let u = &roster.users[i];
        count += 1;
        let weight = download_probability(cfg, u.slot_level);
        if weight == 0.0 {
            continue;
        }
        let others = census[u.bs as usize] - u32::from(u.downloading);
        let sir = compute_sir(cfg, deployment, u, fading);
        if sir > tau {
            acc += weight / (others + 1) as f64;
        }
    }
    (if count == 0 { 0.0 } else { acc / count as f64 }, count)
}

/// Spec-shaped estimator over the whole roster with Rayleigh fading.
pub fn estimate_rate_coverage(
    cfg: &ScenarioConfig,
    deployment: &Deployment,
    roster: &UserRoster,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let census = downloader_census(deployment, roster);
    let n = roster.users.len();
    let mut fading = || exp_fading(rng);
    estimate_rate_coverage_subset(cfg, deployment, roster, &census, 0..n, &mut fading).0
}
