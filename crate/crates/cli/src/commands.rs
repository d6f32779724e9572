//! Subcommand implementations.

use crate::output::{config_hash, fmt_f64, write_json, write_text, CsvDoc};
use crate::{AppError, CompareArgs, Engines, OptimizeArgs, OptimizeMode, SimArgs, SweepArgs, SweepScale, SweepVariable};
use san_core::analytic::{BatteryClass, EvalContext, Tier};
use san_core::optimizer::{self, SearchOptions};
use san_core::params::ScenarioConfig;
use san_core::sim::{self, stats, ExperimentOptions, MonteCarloReport};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct AnalyticReport {
    config_hash: String,
    p_tc: f64,
    rate_coverage: f64,
    cond_coverage: [[f64; 2]; 2],
    components: [[f64; 2]; 2],
    load_share: [f64; 2],
    assoc_high: [f64; 2],
    assoc_low: [f64; 2],
    steady_state: [f64; 4],
    charge_low: [f64; 3],
    charge_high: f64,
    mean_load: [f64; 2],
    caps: optimizer::PowerCaps,
    warnings: Vec<String>,
}

pub fn cmd_analytic(cfg: &ScenarioConfig, p_tc: f64, out: Option<&Path>) -> Result<(), AppError> {
    let ctx = EvalContext::new(cfg, p_tc)?;
    let breakdown = ctx.rate_coverage()?;
    let caps = optimizer::power_caps(cfg)?;
    let report = AnalyticReport {
        config_hash: config_hash(cfg),
        p_tc,
        rate_coverage: breakdown.r_total,
        cond_coverage: breakdown.r_cond,
        components: breakdown.components,
        load_share: breakdown.load_share,
        assoc_high: ctx.assoc.a_high,
        assoc_low: ctx.assoc.a_low,
        steady_state: ctx.chain.steady,
        charge_low: ctx.chain.c_low,
        charge_high: ctx.chain.c_high,
        mean_load: [
            optimizer::mean_load(cfg, &ctx, Tier::Macro),
            optimizer::mean_load(cfg, &ctx, Tier::Small),
        ],
        caps,
        warnings: breakdown.warnings,
    };
    write_json(out, &report)?;
    Ok(())
}

fn experiment_options(sim: &SimArgs, cfg: &ScenarioConfig) -> ExperimentOptions {
    ExperimentOptions {
        window_factor: sim.window_factor,
        window_override: sim.window_m,
        burn_in: sim.burn_in,
        measurement_cap: sim.measurement_cap,
        metric: san_core::sim::Metric::Torus,
        unit_fading: sim.unit_fading,
        cre_bias: sim.cre_bias,
        cre_activity: sim.cre_activity.or_else(|| {
            // match the baseline's traffic to this config's steady state
            sim.cre_bias.map(|_| {
                EvalContext::new(cfg, sim.p_tc_for_activity.unwrap_or(32.0))
                    .map(|c| c.chain.p_high + c.chain.p_low)
                    .unwrap_or(cfg.u_high)
            })
        }),
        ..Default::default()
    }
}

pub fn cmd_simulate(
    cfg: &ScenarioConfig,
    p_tc: f64,
    sim: &SimArgs,
    csv: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), AppError> {
    let opts = experiment_options(sim, cfg);
    let report = sim_run(cfg, p_tc, sim, &opts)?;
    if let Some(path) = csv {
        let mut doc = CsvDoc::new(
            cfg,
            sim.seed,
            &[
                "realization",
                "n_users",
                "n_macro",
                "n_small",
                "rate_coverage",
                "assoc_high_macro",
                "assoc_high_small",
                "assoc_low_macro",
                "assoc_low_small",
                "occ_l0",
                "occ_l1",
                "occ_l2",
                "occ_l3",
                "charge_c1",
                "charge_c2",
                "charge_c3",
                "charge_ch",
                "mean_load_macro",
                "mean_load_small",
                "rim_atom_fraction",
            ],
        );
        for s in &report.per_realization {
            doc.row(&[
                s.realization.to_string(),
                s.n_users.to_string(),
                s.n_macro.to_string(),
                s.n_small.to_string(),
                fmt_f64(s.rate_coverage),
                fmt_f64(s.assoc_high[0]),
                fmt_f64(s.assoc_high[1]),
                fmt_f64(s.assoc_low[0]),
                fmt_f64(s.assoc_low[1]),
                fmt_f64(s.occupancy[0]),
                fmt_f64(s.occupancy[1]),
                fmt_f64(s.occupancy[2]),
                fmt_f64(s.occupancy[3]),
                fmt_f64(s.charge_low[0]),
                fmt_f64(s.charge_low[1]),
                fmt_f64(s.charge_low[2]),
                fmt_f64(s.charge_high),
                fmt_f64(s.mean_load[0]),
                fmt_f64(s.mean_load[1]),
                fmt_f64(s.rim_atom_fraction),
            ]);
        }
        write_text(Some(path), &doc.finish())?;
    }
    write_json(out, &report)?;
    Ok(())
}

fn sim_run(
    cfg: &ScenarioConfig,
    p_tc: f64,
    sim: &SimArgs,
    opts: &ExperimentOptions,
) -> Result<MonteCarloReport, AppError> {
    let report = sim::run_experiment(cfg, p_tc, sim.realizations, sim.slots, sim.seed, opts)?;
    if !report.rate_coverage.mean.is_finite() {
        return Err(AppError::Simulation(
            "simulation produced a non-finite rate coverage".into(),
        ));
    }
    Ok(report)
}

#[derive(Serialize)]
struct OptimizeReport {
    config_hash: String,
    grid: Option<optimizer::OptimizationResult>,
    closed_form: Option<optimizer::OptimizationResult>,
    /// relative objective gap between the two methods, in `both` mode
    objective_gap: Option<f64>,
}

pub fn cmd_optimize(cfg: &ScenarioConfig, args: &OptimizeArgs, out: Option<&Path>) -> Result<(), AppError> {
    let opts = SearchOptions {
        grid_points: args.grid_points,
        refine_rounds: args.refine_rounds,
        trace: args.trace,
    };
    let grid = match args.mode {
        OptimizeMode::ClosedForm => None,
        _ => Some(optimizer::optimal_power(cfg, &opts)?),
    };
    let closed = match args.mode {
        OptimizeMode::Grid => None,
        _ => Some(optimizer::closed_form_optimal(cfg, args.branch_threshold)?),
    };
    let gap = match (&grid, &closed) {
        (Some(g), Some(c)) if g.objective_at_star > 0.0 => {
            Some((g.objective_at_star - c.objective_at_star).abs() / g.objective_at_star)
        }
        _ => None,
    };
    let report = OptimizeReport {
        config_hash: config_hash(cfg),
        grid,
        closed_form: closed,
        objective_gap: gap,
    };
    write_json(out, &report)?;
    Ok(())
}

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, AppError> {
    let values = if let Some(v) = &args.values {
        v.clone()
    } else {
        let (lo, hi, count) = match (args.lo, args.hi, args.count) {
            (Some(lo), Some(hi), Some(count)) => (lo, hi, count),
            _ => {
                return Err(AppError::Config(
                    "sweep needs either --values or all of --lo/--hi/--count".into(),
                ))
            }
        };
        if !(lo < hi) || count < 2 {
            return Err(AppError::Config(
                "sweep range needs lo < hi and count >= 2".into(),
            ));
        }
        (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                match args.scale {
                    SweepScale::Linear => lo + (hi - lo) * t,
                    SweepScale::Log => (lo.ln() + (hi.ln() - lo.ln()) * t).exp(),
                }
            })
            .collect()
    };
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AppError::Config(
            "sweep values must be nonempty and strictly increasing".into(),
        ));
    }
    Ok(values)
}

fn apply_variable(cfg: &ScenarioConfig, var: SweepVariable, value: f64) -> Result<ScenarioConfig, AppError> {
    let cfg = match var {
        SweepVariable::PTc => *cfg,
        SweepVariable::RHatA => ScenarioConfig {
            r_hat_a: value,
            ..*cfg
        },
        SweepVariable::LambdaSmall => ScenarioConfig {
            lambda_small: san_core::params::per_km2_to_per_m2(value),
            ..*cfg
        },
        SweepVariable::URatio => {
            if value < 1.0 {
                return Err(AppError::Config("u-ratio values must be >= 1".into()));
            }
            ScenarioConfig {
                u_low: cfg.u_high / value,
                ..*cfg
            }
        }
    };
    Ok(cfg.validate()?)
}

pub fn cmd_sweep(cfg: &ScenarioConfig, args: &SweepArgs, out: Option<&Path>) -> Result<(), AppError> {
    let values = sweep_values(args)?;
    let mut doc = CsvDoc::new(
        cfg,
        args.sim.seed,
        &[
            "variable",
            "value",
            "engine",
            "rate_coverage",
            "se",
            "p_tc_star",
            "binding",
        ],
    );
    let var_name = match args.variable {
        SweepVariable::PTc => "p_tc",
        SweepVariable::RHatA => "r_hat_a",
        SweepVariable::LambdaSmall => "lambda_small_per_km2",
        SweepVariable::URatio => "u_ratio",
    };
    let engines: &[&str] = match args.engines {
        Engines::Analytic => &["analytic"],
        Engines::Simulate => &["simulate"],
        Engines::Both => &["analytic", "simulate"],
    };

    for &value in &values {
        let point_cfg = apply_variable(cfg, args.variable, value)?;
        // for non-power sweeps every point carries its own optimal power
        let (p_tc, p_star, binding) = match args.variable {
            SweepVariable::PTc => (value, None, None),
            _ => {
                let res = optimizer::optimal_power(&point_cfg, &SearchOptions::default())?;
                (
                    res.p_tc_star,
                    Some(res.p_tc_star),
                    Some(format!("{:?}", res.caps.binding)),
                )
            }
        };
        for &engine in engines {
            let (rc, se) = match engine {
                "analytic" => {
                    let b = EvalContext::new(&point_cfg, p_tc)?.rate_coverage()?;
                    (b.r_total, None)
                }
                _ => {
                    let opts = experiment_options(&args.sim, &point_cfg);
                    let rep = sim_run(&point_cfg, p_tc, &args.sim, &opts)?;
                    (rep.rate_coverage.mean, Some(rep.rate_coverage.se))
                }
            };
            doc.row(&[
                var_name.to_string(),
                fmt_f64(value),
                engine.to_string(),
                fmt_f64(rc),
                se.map(fmt_f64).unwrap_or_default(),
                p_star.map(fmt_f64).unwrap_or_default(),
                binding.clone().unwrap_or_default(),
            ]);
        }
    }
    write_text(out, &doc.finish())?;
    Ok(())
}

struct CompareRow {
    quantity: String,
    analytic: f64,
    simulated: f64,
    se: f64,
    tolerance: f64,
    /// absolute or relative comparison
    relative: bool,
    /// informational rows are flagged, never failed
    informational: bool,
}

impl CompareRow {
    fn gap(&self) -> f64 {
        if self.relative {
            (self.simulated - self.analytic).abs() / self.analytic.abs().max(1e-300)
        } else {
            (self.simulated - self.analytic).abs()
        }
    }

    fn status(&self) -> &'static str {
        let ok = self.gap() <= self.tolerance;
        match (ok, self.informational) {
            (true, _) => "pass",
            (false, true) => "flag",
            (false, false) => "FAIL",
        }
    }
}

pub fn cmd_compare(
    cfg: &ScenarioConfig,
    args: &CompareArgs,
    out: Option<&Path>,
    out_csv: Option<&Path>,
) -> Result<(), AppError> {
    let mut md = String::new();
    md.push_str(&format!(
        "# Analytic vs simulation\n\nconfig-hash={}, seed={}, realizations={}, slots={}\n",
        config_hash(cfg),
        args.sim.seed,
        args.sim.realizations,
        args.sim.slots
    ));
    let mut csv = CsvDoc::new(
        cfg,
        args.sim.seed,
        &[
            "p_tc", "quantity", "analytic", "simulated", "se", "gap", "relative", "tolerance",
            "status",
        ],
    );

    for &p_tc in &args.p_tc_grid {
        let ctx = EvalContext::new(cfg, p_tc)?;
        let breakdown = ctx.rate_coverage()?;
        let opts = experiment_options(&args.sim, cfg);
        let rep = sim_run(cfg, p_tc, &args.sim, &opts)?;

        let mut rows: Vec<CompareRow> = Vec::new();
        let abs_row = |q: &str, a: f64, s: &san_core::sim::Estimate, tol: f64, info: bool| CompareRow {
            quantity: q.to_string(),
            analytic: a,
            simulated: s.mean,
            se: s.se,
            tolerance: tol,
            relative: false,
            informational: info,
        };
        for k in 0..2 {
            let name = if k == 0 { "macro" } else { "small" };
            rows.push(abs_row(
                &format!("assoc_high_{name}"),
                ctx.assoc.a_high[k],
                &rep.assoc_high[k],
                0.01,
                false,
            ));
            rows.push(abs_row(
                &format!("assoc_low_{name}"),
                ctx.assoc.a_low[k],
                &rep.assoc_low[k],
                0.01,
                false,
            ));
        }
        for i in 0..4 {
            rows.push(abs_row(
                &format!("steady_state_q{i}"),
                ctx.chain.steady[i],
                &rep.occupancy[i],
                0.01,
                false,
            ));
        }
        for i in 0..3 {
            rows.push(abs_row(
                &format!("charge_c{}", i + 1),
                ctx.chain.c_low[i],
                &rep.charge_low[i],
                0.005,
                false,
            ));
        }
        rows.push(abs_row(
            "charge_ch",
            ctx.chain.c_high,
            &rep.charge_high,
            0.005,
            false,
        ));
        for k in 0..2 {
            let name = if k == 0 { "macro" } else { "small" };
            let tier = if k == 0 { Tier::Macro } else { Tier::Small };
            rows.push(CompareRow {
                quantity: format!("mean_load_{name}"),
                analytic: optimizer::mean_load(cfg, &ctx, tier),
                simulated: rep.mean_load[k].mean,
                se: rep.mean_load[k].se,
                tolerance: 0.10,
                relative: true,
                informational: false,
            });
            rows.push(abs_row(
                &format!("cond_cov_high_{name}"),
                breakdown.r_cond[k][0],
                &rep.cond_coverage[k][0],
                0.05,
                true,
            ));
            rows.push(abs_row(
                &format!("cond_cov_low_{name}"),
                breakdown.r_cond[k][1],
                &rep.cond_coverage[k][1],
                0.05,
                true,
            ));
        }
        // total rate coverage is exact-tolerance only in the degenerate
        // no-attraction configuration
        rows.push(abs_row(
            "rate_coverage",
            breakdown.r_total,
            &rep.rate_coverage,
            if cfg.r_hat_a == 0.0 { 0.02 } else { 0.05 },
            cfg.r_hat_a != 0.0,
        ));
        // typical-user cell-load mixture across tiers, association-weighted
        {
            let q = ctx.chain.steady;
            let low_frac = q[0] + q[1];
            let weights = [
                low_frac * ctx.assoc.a_low[0] + (1.0 - low_frac) * ctx.assoc.a_high[0],
                low_frac * ctx.assoc.a_low[1] + (1.0 - low_frac) * ctx.assoc.a_high[1],
            ];
            let pmf1 = ctx.load_pmf_auto(Tier::Macro)?.pmf_total;
            let pmf2 = ctx.load_pmf_auto(Tier::Small)?.pmf_total;
            let len = pmf1.len().max(pmf2.len());
            let analytic_mix: Vec<f64> = (0..len)
                .map(|n| {
                    weights[0] * pmf1.get(n).copied().unwrap_or(0.0)
                        + weights[1] * pmf2.get(n).copied().unwrap_or(0.0)
                })
                .collect();
            let e_len = rep.load_pmf[0].len().max(rep.load_pmf[1].len());
            let emp_w = [weights[0], weights[1]];
            // the empirical per-tier pmfs are user-weighted already; rebuild
            // the unnormalized mixture from the same association weights
            let emp_mix: Vec<f64> = (0..e_len)
                .map(|n| {
                    emp_w[0] * rep.load_pmf[0].get(n).copied().unwrap_or(0.0)
                        + emp_w[1] * rep.load_pmf[1].get(n).copied().unwrap_or(0.0)
                })
                .collect();
            rows.push(CompareRow {
                quantity: "load_pmf_tv_typical".to_string(),
                analytic: 0.0,
                simulated: stats::total_variation(&emp_mix, &analytic_mix),
                se: f64::NAN,
                tolerance: 0.05,
                relative: false,
                informational: false,
            });
        }
        for (k, tier) in [(0usize, Tier::Macro), (1, Tier::Small)] {
            let name = if k == 0 { "macro" } else { "small" };
            let pmf = ctx.load_pmf_auto(tier)?;
            let tv = stats::total_variation(&rep.load_pmf[k], &pmf.pmf_total);
            rows.push(CompareRow {
                quantity: format!("load_pmf_tv_{name}"),
                analytic: 0.0,
                simulated: tv,
                se: f64::NAN,
                tolerance: 0.05,
                relative: false,
                informational: false,
            });
            for (c, class) in [(0usize, BatteryClass::High), (1, BatteryClass::Low)] {
                let dist = ctx.assoc_distance_pdf(tier, class);
                let samples = &rep.distances.samples[k][c];
                if samples.is_empty() {
                    continue;
                }
                let sample_atom = (k == 1 && c == 1)
                    .then_some((ctx.assoc.r_c, rep.distances.rim_atom_count));
                let ks = stats::ks_mixed(samples, sample_atom, |r| dist.cdf(r), dist.atom());
                rows.push(CompareRow {
                    quantity: format!(
                        "distance_ks_{name}_{}",
                        if c == 0 { "high" } else { "low" }
                    ),
                    analytic: 0.0,
                    simulated: ks,
                    se: f64::NAN,
                    tolerance: 0.02,
                    relative: false,
                    informational: false,
                });
            }
        }
        if let Some((_, mass)) = ctx.assoc_distance_pdf(Tier::Small, BatteryClass::Low).atom() {
            rows.push(abs_row(
                "rim_atom_mass",
                mass,
                &rep.rim_atom_fraction,
                0.01,
                false,
            ));
        }

        md.push_str(&format!("\n## p_tc = {p_tc}\n\n"));
        md.push_str("| quantity | analytic | simulated | se | gap | tol | status |\n");
        md.push_str("|---|---|---|---|---|---|---|\n");
        for r in &rows {
            md.push_str(&format!(
                "| {} | {:.6} | {:.6} | {:.1e} | {:.4}{} | {} | {} |\n",
                r.quantity,
                r.analytic,
                r.simulated,
                r.se,
                r.gap(),
                if r.relative { " (rel)" } else { "" },
                r.tolerance,
                r.status()
            ));
            csv.row(&[
                fmt_f64(p_tc),
                r.quantity.clone(),
                fmt_f64(r.analytic),
                fmt_f64(r.simulated),
                fmt_f64(r.se),
                fmt_f64(r.gap()),
                (r.relative as u8).to_string(),
                fmt_f64(r.tolerance),
                r.status().to_string(),
            ]);
        }
    }

    write_text(out, &md)?;
    if let Some(path) = out_csv {
        write_text(Some(path), &csv.finish())?;
    }
    Ok(())
}
