//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success). Criteria 3 and 4
//! share two cached reference experiments.
//!
//! Monte Carlo runs are seed-pinned, so every verdict here is
//! reproducible bit for bit.

use san_core::analytic::{
    assoc_prob_high, assoc_prob_low, battery_chain, charge_probs, BatteryClass, EvalContext, Tier,
};
use san_core::numerics::{integrate, integrate_to_infinity, Quadrature};
use san_core::optimizer::{self, SearchOptions};
use san_core::params::{dbm_to_watts, per_km2_to_per_m2, presets, ScenarioConfig};
use san_core::sim::{self, stats, ExperimentOptions, MonteCarloReport};
use std::sync::OnceLock;

const FIG3A_P_TC: f64 = 32.0;

fn check(failures: &mut Vec<String>, ok: bool, label: &str, detail: String) {
    println!("    [{}] {label}: {detail}", if ok { "ok" } else { "FAIL" });
    if !ok {
        failures.push(format!("{label}: {detail}"));
    }
}

fn verdict(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("ACCEPTANCE {criterion}: PASS");
    } else {
        println!("ACCEPTANCE {criterion}: FAIL ({} item(s))", failures.len());
    }
    assert!(failures.is_empty(), "{criterion} failed: {failures:#?}");
}

/// Many short realizations: position-driven statistics (association,
/// charge bands) with tight deployment averaging.
fn fig3a_run_positions() -> &'static MonteCarloReport {
    static RUN: OnceLock<MonteCarloReport> = OnceLock::new();
    RUN.get_or_init(|| {
        sim::run_experiment(
            &presets::fig3a(),
            FIG3A_P_TC,
            256,
            12,
            1001,
            &ExperimentOptions {
                window_factor: 20.0,
                burn_in: Some(4),
                measurement_cap: 16,
                collect_distances: false,
                ..Default::default()
            },
        )
        .expect("reference run")
    })
}

/// Fewer, longer realizations: battery-equilibrium statistics
/// (occupancy, loads, association distances).
fn fig3a_run_equilibrium() -> &'static MonteCarloReport {
    static RUN: OnceLock<MonteCarloReport> = OnceLock::new();
    RUN.get_or_init(|| {
        sim::run_experiment(
            &presets::fig3a(),
            FIG3A_P_TC,
            48,
            70,
            1002,
            &ExperimentOptions {
                window_factor: 30.0,
                burn_in: Some(40),
                measurement_cap: 1024,
                distance_cap: 4096,
                ..Default::default()
            },
        )
        .expect("reference run")
    })
}

fn xorshift(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn criterion_1_exact_identities() {
    let mut failures = Vec::new();
    let mut state = 0x5eed_1u64;
    let mut worst_assoc = 0.0f64;
    let mut worst_row = 0.0f64;
    let mut worst_resid = 0.0f64;
    let mut worst_qsum = 0.0f64;
    let mut worst_telescope = 0.0f64;

    for _ in 0..200 {
        let cfg = ScenarioConfig {
            lambda_macro: per_km2_to_per_m2(1.0 + 99.0 * xorshift(&mut state)),
            lambda_small: per_km2_to_per_m2(50.0 + 4950.0 * xorshift(&mut state)),
            lambda_user: per_km2_to_per_m2(1e3 + 1e6 * xorshift(&mut state)),
            p_macro: dbm_to_watts(40.0 + 6.0 * xorshift(&mut state)),
            p_small: dbm_to_watts(20.0 + 10.0 * xorshift(&mut state)),
            alpha: 2.5 + 3.0 * xorshift(&mut state),
            beta: 2.6 + 4.0 * xorshift(&mut state),
            u_low: 0.35 * xorshift(&mut state),
            u_high: 0.35 + 0.1 * xorshift(&mut state),
            r_hat_a: 3.0 * xorshift(&mut state),
            ..presets::fig3a()
        }
        .validate()
        .expect("sampled config is valid");
        let p_tc = 1.0 + 300.0 * xorshift(&mut state);

        let a_high: f64 = Tier::BOTH.iter().map(|&t| assoc_prob_high(&cfg, t)).sum();
        let a_low: f64 = Tier::BOTH
            .iter()
            .map(|&t| assoc_prob_low(&cfg, p_tc, t).unwrap())
            .sum();
        worst_assoc = worst_assoc.max((a_high - 1.0).abs()).max((a_low - 1.0).abs());

        let cp = charge_probs(&cfg, p_tc).unwrap();
        let r_s = cfg.charging_range(p_tc).unwrap() + cfg.r_hat_a;
        let expected = 1.0 - (-std::f64::consts::PI * cfg.lambda_small * r_s * r_s).exp();
        worst_telescope =
            worst_telescope.max((cp.c_low.iter().sum::<f64>() - expected).abs());

        let chain = battery_chain(&cfg, p_tc).unwrap();
        for row in chain.transition.iter() {
            worst_row = worst_row.max((row.iter().sum::<f64>() - 1.0).abs());
        }
        worst_qsum = worst_qsum.max((chain.steady.iter().sum::<f64>() - 1.0).abs());
        for j in 0..4 {
            let qt: f64 = (0..4)
                .map(|i| chain.steady[i] * chain.transition[i][j])
                .sum();
            worst_resid = worst_resid.max((qt - chain.steady[j]).abs());
        }
    }

    check(&mut failures, worst_assoc <= 1e-9, "association sums", format!("max |A1+A2-1| = {worst_assoc:.2e} (tol 1e-9)"));
    check(&mut failures, worst_row <= 1e-12, "transition row sums", format!("max dev = {worst_row:.2e}"));
    check(&mut failures, worst_resid <= 1e-10, "steady-state residual", format!("max ||qT-q||_inf = {worst_resid:.2e}"));
    check(&mut failures, worst_qsum <= 1e-12, "steady-state normalization", format!("max |sum q - 1| = {worst_qsum:.2e}"));
    check(&mut failures, worst_telescope <= 1e-12, "charge band telescope", format!("max dev = {worst_telescope:.2e}"));
    verdict("1 (exact algebraic identities)", failures);
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut failures = Vec::new();

    // rho vs the alpha = 4 arctan closed form on a 100-point (theta, x) grid
    let mut worst = 0.0f64;
    for i in 0..10 {
        let theta = (0.05 + 0.45 * i as f64) * 1e6;
        let cfg = ScenarioConfig {
            rate_threshold: theta,
            ..presets::fig3a()
        };
        let ctx = EvalContext::new(&cfg, FIG3A_P_TC).unwrap();
        let tau = cfg.sir_threshold();
        let m = ctx.assoc.m_distance;
        for j in 0..10 {
            let x = m * (0.2 + 2.0 * j as f64);
            let got = ctx.rho(x).unwrap();
            let want = tau.sqrt()
                * (std::f64::consts::FRAC_PI_2 - ((m / x).powi(2) / tau.sqrt()).atan());
            worst = worst.max((got - want).abs() / want.abs().max(1e-300));
        }
    }
    check(&mut failures, worst <= 1e-8, "rho vs arctan oracle", format!("max rel dev = {worst:.2e}"));

    // Ei vs direct adaptive quadrature on [-50, -0.01]
    let quad = Quadrature::new(1e-12, 1e-320, 4000).unwrap();
    let mut worst = 0.0f64;
    for i in 0..40 {
        let x = -(0.01 * (5000.0f64).powf(i as f64 / 39.0));
        let ei = san_core::numerics::exponential_integral_ei(x).unwrap();
        let direct = -integrate_to_infinity(&quad, |t| (-t).exp() / t, -x).unwrap();
        worst = worst.max((ei - direct).abs() / direct.abs());
    }
    check(&mut failures, worst <= 1e-8, "Ei vs quadrature", format!("max rel dev on [-50, -0.01] = {worst:.2e}"));

    // average received power density: Ei closed form vs defining integral
    let mut worst = 0.0f64;
    for (l2, gm, tm) in [
        (3e3, 100.0, 0.35),
        (3e2, 100.0, 0.35),
        (1e3, 10.0, 0.2),
        (5e3, 31.6, 0.6),
    ] {
        let cfg = ScenarioConfig {
            lambda_small: per_km2_to_per_m2(l2),
            g_main: gm,
            beam_width: tm,
            ..presets::fig3a()
        };
        let p_tc = 32.0;
        let pi = std::f64::consts::PI;
        let ls = cfg.lambda_small;
        let near = integrate(&quad, |r| r * (-ls * pi * r * r).exp(), 0.0, 1.0).unwrap();
        let far = integrate_to_infinity(&quad, |r| (-pi * ls * r * r).exp() / r, 1.0).unwrap();
        let half_tan = (tm / 2.0f64).tan();
        let oracle = 2.0 * gm * ls * p_tc / (half_tan * half_tan) * (near + far);
        let closed = optimizer::avg_power_density(&cfg, p_tc).unwrap();
        worst = worst.max((closed - oracle).abs() / oracle.abs());
    }
    check(&mut failures, worst <= 1e-8, "power density Ei form vs integral", format!("max rel dev = {worst:.2e}"));
    verdict("2 (oracle equivalence)", failures);
}

#[test]
fn criterion_3_analytic_vs_monte_carlo() {
    let mut failures = Vec::new();
    let cfg = presets::fig3a();
    let ctx = EvalContext::new(&cfg, FIG3A_P_TC).unwrap();
    let pos = fig3a_run_positions();
    let equ = fig3a_run_equilibrium();

    let user_slots =
        pos.mean_user_count * (pos.slots - pos.burn_in) as f64 * pos.realizations as f64;
    check(
        &mut failures,
        pos.realizations >= 16 && user_slots >= 1e5,
        "sampling floor",
        format!("{} realizations, {user_slots:.2e} user-slots", pos.realizations),
    );

    for (k, name) in [(0, "macro"), (1, "small")] {
        let gap = (pos.assoc_high[k].mean - ctx.assoc.a_high[k]).abs();
        check(&mut failures, gap <= 0.01, &format!("assoc high {name}"), format!("emp {:.4} vs {:.4} (gap {gap:.4}, se {:.4})", pos.assoc_high[k].mean, ctx.assoc.a_high[k], pos.assoc_high[k].se));
        let gap = (pos.assoc_low[k].mean - ctx.assoc.a_low[k]).abs();
        check(&mut failures, gap <= 0.01, &format!("assoc low {name}"), format!("emp {:.4} vs {:.4} (gap {gap:.4}, se {:.4})", pos.assoc_low[k].mean, ctx.assoc.a_low[k], pos.assoc_low[k].se));
    }

    for i in 0..4 {
        let gap = (equ.occupancy[i].mean - ctx.chain.steady[i]).abs();
        check(&mut failures, gap <= 0.01, &format!("battery occupancy L{i}"), format!("emp {:.4} vs {:.4} (gap {gap:.4})", equ.occupancy[i].mean, ctx.chain.steady[i]));
    }

    for i in 0..3 {
        let gap = (pos.charge_low[i].mean - ctx.chain.c_low[i]).abs();
        check(&mut failures, gap <= 0.005, &format!("charge band c{}", i + 1), format!("emp {:.5} vs {:.5} (gap {gap:.5})", pos.charge_low[i].mean, ctx.chain.c_low[i]));
    }
    let gap = (pos.charge_high.mean - ctx.chain.c_high).abs();
    check(&mut failures, gap <= 0.005, "charge band c_h", format!("emp {:.5} vs {:.5} (gap {gap:.5})", pos.charge_high.mean, ctx.chain.c_high));

    for (k, tier, name) in [(0usize, Tier::Macro, "macro"), (1, Tier::Small, "small")] {
        let pmf = ctx.load_pmf_auto(tier).unwrap();
        let tv = stats::total_variation(&equ.load_pmf[k], &pmf.pmf_total);
        check(&mut failures, tv <= 0.05, &format!("load pmf TV {name}"), format!("TV = {tv:.4} (emp mean {:.2} vs model mean {:.2})", equ.mean_load[k].mean, pmf.pmf_total.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>()));
    }

    verdict("3 (analytic vs Monte Carlo cross-validation)", failures);
}

#[test]
fn criterion_4_distance_distributions() {
    let mut failures = Vec::new();
    let cfg = presets::fig3a();
    let ctx = EvalContext::new(&cfg, FIG3A_P_TC).unwrap();
    let equ = fig3a_run_equilibrium();
    let quad = Quadrature {
        max_subdivisions: 2000,
        ..Quadrature::default()
    };

    for tier in Tier::BOTH {
        for class in [BatteryClass::High, BatteryClass::Low] {
            let dist = ctx.assoc_distance_pdf(tier, class);
            let mut cuts = vec![0.0, ctx.assoc.r_c, ctx.assoc.r_s, ctx.assoc.m_distance, 10.0, 100.0, 1000.0];
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut mass = 0.0;
            for w in cuts.windows(2) {
                mass += integrate(&quad, |r| dist.pdf(r), w[0], w[1]).unwrap();
            }
            mass += integrate_to_infinity(&quad, |r| dist.pdf(r), 1000.0).unwrap();
            mass += dist.atom().map(|(_, m)| m).unwrap_or(0.0);
            let dev = (mass - 1.0).abs();
            check(&mut failures, dev <= 1e-6, &format!("pdf normalization {tier:?}/{class:?}"), format!("mass = 1 {dev:+.2e}"));
        }
    }

    for (k, tier, name) in [(0usize, Tier::Macro, "macro"), (1, Tier::Small, "small")] {
        for (c, class, cname) in [(0usize, BatteryClass::High, "high"), (1, BatteryClass::Low, "low")] {
            let dist = ctx.assoc_distance_pdf(tier, class);
            let samples = &equ.distances.samples[k][c];
            let sample_atom =
                (k == 1 && c == 1).then_some((ctx.assoc.r_c, equ.distances.rim_atom_count));
            let ks = stats::ks_mixed(samples, sample_atom, |r| dist.cdf(r), dist.atom());
            check(&mut failures, ks <= 0.02, &format!("KS {name}/{cname}"), format!("D = {ks:.4} over {} samples", samples.len() + sample_atom.map_or(0, |(_, n)| n)));
        }
    }

    let (_, atom_mass) = ctx
        .assoc_distance_pdf(Tier::Small, BatteryClass::Low)
        .atom()
        .unwrap();
    let gap = (equ.rim_atom_fraction.mean - atom_mass).abs();
    check(&mut failures, gap <= 0.01, "rim atom mass", format!("emp {:.4} vs {:.4}", equ.rim_atom_fraction.mean, atom_mass));
    verdict("4 (association-distance distributions)", failures);
}

/// Paired mean and standard error of differences between two reports that
/// share seeds (common random numbers across sweep points).
fn paired_margin(a: &MonteCarloReport, b: &MonteCarloReport) -> (f64, f64) {
    let diffs: Vec<f64> = a
        .per_realization
        .iter()
        .zip(b.per_realization.iter())
        .map(|(x, y)| x.rate_coverage - y.rate_coverage)
        .collect();
    let est = sim::mean_se(&diffs);
    (est.mean, est.se)
}

#[test]
fn criterion_5_non_monotone_rate_coverage() {
    let mut failures = Vec::new();
    let cfg = presets::fig3b();
    let grid: Vec<f64> = (0..16).map(|i| 10f64.powf(7.0 * i as f64 / 15.0)).collect();

    // analytic curve
    let analytic: Vec<f64> = grid
        .iter()
        .map(|&p| EvalContext::new(&cfg, p).unwrap().rate_coverage().unwrap().r_total)
        .collect();
    let (a_best, &a_max) = analytic
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .unwrap();
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("    analytic curve: {}", fmt(&analytic));
    check(
        &mut failures,
        a_best > 0 && a_best < grid.len() - 1,
        "analytic interior argmax",
        format!("argmax at p_tc = {:.0} (index {a_best})", grid[a_best]),
    );

    // simulated curve, common random numbers across points
    let opts = ExperimentOptions {
        window_factor: 5.0,
        burn_in: Some(30),
        measurement_cap: 1024,
        collect_distances: false,
        ..Default::default()
    };
    let reports: Vec<MonteCarloReport> = grid
        .iter()
        .map(|&p| sim::run_experiment(&cfg, p, 16, 60, 2020, &opts).unwrap())
        .collect();
    let sim_means: Vec<f64> = reports.iter().map(|r| r.rate_coverage.mean).collect();
    println!("    simulated curve: {}", fmt(&sim_means));
    println!(
        "    simulated per-point se: {}",
        fmt(&reports.iter().map(|r| r.rate_coverage.se).collect::<Vec<_>>())
    );

    let (s_best, _) = sim_means
        .iter()
        .enumerate()
        .skip(1)
        .take(grid.len() - 2)
        .max_by(|x, y| x.1.total_cmp(y.1))
        .unwrap();
    let (d_lo, se_lo) = paired_margin(&reports[s_best], &reports[0]);
    let (d_hi, se_hi) = paired_margin(&reports[s_best], &reports[grid.len() - 1]);
    println!(
        "    sim best interior p_tc = {:.0}: margin vs left {d_lo:.3e} (2se {:.3e}), vs right {d_hi:.3e} (2se {:.3e})",
        grid[s_best],
        2.0 * se_lo,
        2.0 * se_hi
    );

    // the analytic margins, measured against the simulation noise scale
    let a_lo = a_max - analytic[0];
    let a_hi = a_max - *analytic.last().unwrap();
    check(
        &mut failures,
        a_lo > 2.0 * se_lo && a_hi > 2.0 * se_hi,
        "analytic margins",
        format!("peak-left {a_lo:.3e}, peak-right {a_hi:.3e} vs 2se ({:.3e}, {:.3e})", 2.0 * se_lo, 2.0 * se_hi),
    );
    check(
        &mut failures,
        d_lo > 2.0 * se_lo && d_hi > 2.0 * se_hi,
        "simulated interior maximum",
        format!("margins ({d_lo:.3e}, {d_hi:.3e}) vs 2se ({:.3e}, {:.3e})", 2.0 * se_lo, 2.0 * se_hi),
    );
    verdict("5 (non-monotone rate coverage, dense regime)", failures);
}

#[test]
fn criterion_6_closed_form_near_optimality() {
    let mut failures = Vec::new();

    // sparse-macro branch: the dense-small-cell preset
    let cfg = presets::fig3b();
    let grid = optimizer::optimal_power(&cfg, &SearchOptions::default()).unwrap();
    let closed = optimizer::closed_form_optimal(&cfg, 10.0).unwrap();
    let gap = (grid.objective_at_star - closed.objective_at_star).abs() / grid.objective_at_star;
    check(&mut failures, gap <= 0.10, "branch 1 (lambda2/lambda1 = 300)", format!("closed-form p* = {:.2}, grid p* = {:.2}, objective gap {:.2}%", closed.p_tc_star, grid.p_tc_star, 100.0 * gap));

    // dense-macro branch at the same user-to-cell depth
    let cfg = ScenarioConfig {
        lambda_macro: per_km2_to_per_m2(600.0),
        lambda_small: per_km2_to_per_m2(300.0),
        lambda_user: per_km2_to_per_m2(1e6),
        ..presets::fig3a()
    };
    let grid = optimizer::optimal_power(&cfg, &SearchOptions::default()).unwrap();
    let closed = optimizer::closed_form_optimal(&cfg, 10.0).unwrap();
    assert_eq!(closed.method, optimizer::Method::ClosedFormBranch2);
    let gap = (grid.objective_at_star - closed.objective_at_star).abs() / grid.objective_at_star;
    check(&mut failures, gap <= 0.10, "branch 2 (lambda2/lambda1 = 0.5)", format!("closed-form p* = {:.2}, grid p* = {:.2}, objective gap {:.2}%", closed.p_tc_star, grid.p_tc_star, 100.0 * gap));
    verdict("6 (closed-form near-optimality)", failures);
}

#[test]
fn criterion_7_qualitative_claims() {
    let mut failures = Vec::new();
    let base = presets::fig3a();
    let p_grid = [32.0, 1024.0, 32768.0];
    let opts = ExperimentOptions {
        window_factor: 20.0,
        burn_in: Some(40),
        measurement_cap: 1024,
        collect_distances: false,
        ..Default::default()
    };

    // (a) attraction beats no attraction, at each method's best power
    let mut sim_best: Vec<(f64, usize, Vec<MonteCarloReport>)> = Vec::new();
    for &ra in &[0.0, 1.0, 2.0] {
        let cfg = ScenarioConfig { r_hat_a: ra, ..base };
        let reports: Vec<MonteCarloReport> = p_grid
            .iter()
            .map(|&p| sim::run_experiment(&cfg, p, 32, 70, 3030, &opts).unwrap())
            .collect();
        let best = reports
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.rate_coverage.mean.total_cmp(&b.1.rate_coverage.mean))
            .map(|(i, _)| i)
            .unwrap();
        sim_best.push((ra, best, reports));

        let analytic_best = (0..16)
            .map(|i| {
                let p = 10f64.powf(7.0 * i as f64 / 15.0);
                EvalContext::new(&cfg, p).unwrap().rate_coverage().unwrap().r_total
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if ra == 0.0 {
            println!("    analytic best (no attraction): {analytic_best:.4e}");
        }
    }
    let analytic_best_of = |ra: f64| -> f64 {
        let cfg = ScenarioConfig { r_hat_a: ra, ..base };
        (0..16)
            .map(|i| {
                let p = 10f64.powf(7.0 * i as f64 / 15.0);
                EvalContext::new(&cfg, p).unwrap().rate_coverage().unwrap().r_total
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let a0 = analytic_best_of(0.0);
    for &ra in &[1.0, 2.0] {
        let av = analytic_best_of(ra);
        check(&mut failures, av > a0, &format!("analytic attraction gain (r_hat_a = {ra})"), format!("{av:.4e} vs {a0:.4e}"));
    }
    let (_, b0, r0) = &sim_best[0];
    for (ra, b, reports) in &sim_best[1..] {
        let (d, se) = paired_margin(&reports[*b], &r0[*b0]);
        check(&mut failures, d > 2.0 * se, &format!("simulated attraction gain (r_hat_a = {ra})"), format!("margin {d:.3e} vs 2se {:.3e}", 2.0 * se));
    }

    // (b) the attraction network beats the best biased-association baseline
    let (_, b2, san_reports) = &sim_best[2];
    let san_best = &san_reports[*b2];
    let p_star = p_grid[*b2];
    let activity = {
        let ctx = EvalContext::new(&base, p_star).unwrap();
        ctx.chain.p_high + ctx.chain.p_low
    };
    let mut cre_reports = Vec::new();
    for &bias in &[1.0, 2.0, 4.0, 8.0, 16.0] {
        let cre_opts = ExperimentOptions {
            cre_bias: Some(bias),
            cre_activity: Some(activity),
            ..opts
        };
        cre_reports.push((
            bias,
            sim::run_experiment(&base, p_star, 32, 70, 3030, &cre_opts).unwrap(),
        ));
    }
    let (best_bias, best_cre) = cre_reports
        .iter()
        .max_by(|a, b| a.1.rate_coverage.mean.total_cmp(&b.1.rate_coverage.mean))
        .map(|(b, r)| (*b, r))
        .unwrap();
    let (d, se) = paired_margin(san_best, best_cre);
    check(
        &mut failures,
        d > 2.0 * se,
        "attraction beats range expansion",
        format!(
            "SAN {:.4e} vs best CRE (bias {best_bias}) {:.4e}: margin {d:.3e}, 2se {:.3e}",
            san_best.rate_coverage.mean,
            best_cre.rate_coverage.mean,
            2.0 * se
        ),
    );

    // (c) denser small cells: higher best coverage, lower optimal power
    let fig4 = presets::fig4();
    let mut prev_best = f64::NEG_INFINITY;
    let mut prev_p = f64::INFINITY;
    let mut ok_r = true;
    let mut ok_p = true;
    let mut summary = Vec::new();
    for &l2 in &[100.0, 300.0, 1000.0, 3000.0] {
        let cfg = ScenarioConfig {
            lambda_small: per_km2_to_per_m2(l2),
            ..fig4
        };
        let res = optimizer::optimal_power(&cfg, &SearchOptions::default()).unwrap();
        let best = EvalContext::new(&cfg, res.p_tc_star)
            .unwrap()
            .rate_coverage()
            .unwrap()
            .r_total;
        ok_r &= best > prev_best;
        ok_p &= res.p_tc_star < prev_p;
        summary.push(format!("l2={l2}: R*={best:.3e} p*={:.1}", res.p_tc_star));
        prev_best = best;
        prev_p = res.p_tc_star;
    }
    check(&mut failures, ok_r && ok_p, "density sweep ordering", summary.join("; "));

    // (d) the attraction gain grows with the usage ratio u_high/u_low,
    // each point at its own optimal power. The printed chain drains the
    // high states at u_low, so the gain must eventually collapse as
    // u_low -> 0; the ordering is asserted on the documented 2..8 range
    // (the 1 -> 2 step shows a small dip) and the ratio-1 value printed.
    let gain_at = |ratio: f64, ra: f64| -> f64 {
        let cfg = ScenarioConfig {
            u_low: fig4.u_high / ratio,
            r_hat_a: ra,
            ..fig4
        };
        let res = optimizer::optimal_power(&cfg, &SearchOptions::default()).unwrap();
        EvalContext::new(&cfg, res.p_tc_star)
            .unwrap()
            .rate_coverage()
            .unwrap()
            .r_total
    };
    println!(
        "    usage-ratio 1 gain (informational): {:.3e}",
        gain_at(1.0, 2.0) - gain_at(1.0, 0.0)
    );
    let mut prev_gain = f64::NEG_INFINITY;
    let mut ok = true;
    let mut summary = Vec::new();
    for &ratio in &[2.0, 4.0, 8.0] {
        let gain = gain_at(ratio, 2.0) - gain_at(ratio, 0.0);
        ok &= gain > prev_gain;
        summary.push(format!("ratio {ratio}: gain {gain:.3e}"));
        prev_gain = gain;
    }
    check(&mut failures, ok, "usage-ratio sweep ordering", summary.join("; "));

    verdict("7 (qualitative orderings)", failures);
}

#[test]
fn criterion_8_byte_determinism() {
    let mut failures = Vec::new();
    let dir = std::env::temp_dir();
    let run = |tag: &str| -> (Vec<u8>, Vec<u8>) {
        let csv = dir.join(format!("san-acc8-{}-{tag}.csv", std::process::id()));
        let json = dir.join(format!("san-acc8-{}-{tag}.json", std::process::id()));
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_san"))
            .args([
                "simulate",
                "--preset",
                "fig3a",
                "--p-tc",
                "32",
                "--realizations",
                "3",
                "--slots",
                "12",
                "--seed",
                "424242",
                "--window-factor",
                "8",
                "--csv",
                csv.to_str().unwrap(),
                "--out",
                json.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let c = std::fs::read(&csv).unwrap();
        let j = std::fs::read(&json).unwrap();
        std::fs::remove_file(csv).ok();
        std::fs::remove_file(json).ok();
        (c, j)
    };
    let (c1, j1) = run("first");
    let (c2, j2) = run("second");
    check(&mut failures, c1 == c2, "CSV determinism", format!("{} bytes", c1.len()));
    check(&mut failures, j1 == j2, "JSON determinism", format!("{} bytes", j1.len()));
    verdict("8 (byte determinism)", failures);
}
