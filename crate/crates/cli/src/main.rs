//! `cascade`: run the treasure-hunt experiments and write their results as CSV.

mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cascade_core::infotheory::Distribution;
use cascade_core::metrics::{mean_turns_to_find, tradeoff_point};
use cascade_core::relinfo::utility_treasure_matrix;
use cascade_core::{
    calibrate_likelihood, calibration_rng, ri_closed_form, ri_minimize, LikelihoodMatrix, Preset,
    Scenario, ScenarioParams, SweepParameter, SweepSpec, UpdateTiming,
};
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, parse_timing, Overrides};
use crate::io::{csv_writer, format_sig9, read_likelihood, read_utility, write_likelihood};

#[derive(Parser)]
#[command(
    name = "cascade",
    version,
    about = "Social Bayesian treasure-hunt simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the action likelihood from non-social agents and save it.
    Calibrate(CalibrateArgs),
    /// Run one scenario preset and report per-selector metrics.
    Run(RunArgs),
    /// Sweep an observation probability over a percent grid.
    Sweep(SweepArgs),
    /// Tabulate the relevant-information curve.
    RiCurve(RiCurveArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 10)]
    locations: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    locations: Option<usize>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    turns: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p_change: Option<f64>,
    /// Percent.
    #[arg(long)]
    obs_prob: Option<f64>,
    /// Agent 0's observation probability, percent.
    #[arg(long)]
    focal_obs_prob: Option<f64>,
    /// Samples for in-process calibration when no likelihood file is given.
    #[arg(long)]
    calibration_samples: Option<u64>,
    /// `immediate` or `end-of-turn`.
    #[arg(long, value_parser = parse_timing)]
    update_timing: Option<UpdateTiming>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Likelihood CSV from `calibrate`; calibrated in-process if omitted.
    #[arg(long)]
    likelihood: Option<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            locations: self.locations,
            agents: self.agents,
            turns: self.turns,
            runs: self.runs,
            seed: self.seed,
            p_change: self.p_change,
            obs_prob: self.obs_prob,
            focal_obs_prob: self.focal_obs_prob,
            calibration_samples: self.calibration_samples,
            update_timing: self.update_timing,
        }
    }

    fn params(&self) -> Result<ScenarioParams> {
        parse_config(self.config.as_deref(), &self.overrides())
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario preset.
    scenario: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// `population` or `focal`.
    #[arg(long, default_value = "population")]
    parameter: String,
    /// Scenario preset the sweep is applied to.
    #[arg(long, default_value = "partial")]
    scenario: String,
    /// Percent.
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    /// Percent.
    #[arg(long, default_value_t = 100.0)]
    stop: f64,
    /// Percent.
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RiCurveArgs {
    #[arg(long, default_value_t = 10)]
    locations: usize,
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 1.0)]
    stop: f64,
    #[arg(long, default_value_t = 0.001)]
    step: f64,
    /// Use the numerical solver instead of the closed form.
    #[arg(long)]
    solver: bool,
    /// Utility matrix CSV (header `s0..`, one row per action); implies --solver.
    #[arg(long)]
    utility: Option<PathBuf>,
    /// Solver tolerance on expected utility.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn likelihood_for(common: &CommonArgs, params: &ScenarioParams) -> Result<LikelihoodMatrix> {
    match &common.likelihood {
        Some(path) => {
            let lik = read_likelihood(path)?;
            anyhow::ensure!(
                lik.n() == params.n_locations,
                "{} has {} locations but the scenario has {}",
                path.display(),
                lik.n(),
                params.n_locations
            );
            Ok(lik)
        }
        None => Ok(calibrate_likelihood(
            params.n_locations,
            params.calibration_samples,
            &mut calibration_rng(params.seed),
        )?),
    }
}

fn percent(p: f64) -> String {
    format_sig9(p * 100.0)
}

fn scenario_fields(s: &Scenario) -> Vec<String> {
    let c = &s.config;
    vec![
        s.preset.name().to_string(),
        c.n_locations.to_string(),
        c.n_agents.to_string(),
        format_sig9(s.p_change),
        percent(s.obs_prob),
        percent(s.focal_obs_prob),
        c.runs.to_string(),
        c.turns.to_string(),
        c.seed.to_string(),
    ]
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<()> {
    let lik = calibrate_likelihood(
        args.locations,
        args.samples,
        &mut calibration_rng(args.seed),
    )?;
    write_likelihood(args.out.as_deref(), &lik)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let preset: Preset = args.scenario.parse()?;
    let params = args.common.params()?;
    let scenario = Scenario::new(preset, &params)?;
    let lik = likelihood_for(&args.common, &params)?;
    let record = scenario.run(&lik)?;
    let mut w = csv_writer(args.common.out.as_deref())?;
    w.write_record([
        "scenario",
        "selector",
        "n_locations",
        "n_agents",
        "p_change",
        "obs_prob",
        "focal_obs_prob",
        "runs",
        "turns",
        "seed",
        "performance",
        "mi_bits",
        "mean_turns_to_find",
    ])?;
    for sel in preset.selectors(params.n_agents) {
        let m = tradeoff_point(&record, sel)?;
        // Blank when the selection never found the treasure.
        let turns = mean_turns_to_find(&record, sel)
            .map(format_sig9)
            .unwrap_or_default();
        let mut row = scenario_fields(&scenario);
        row.insert(1, sel.label());
        row.extend([
            format_sig9(m.performance),
            format_sig9(m.information),
            turns,
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let parameter: SweepParameter = args.parameter.parse()?;
    let preset: Preset = args.scenario.parse()?;
    let params = args.common.params()?;
    let spec = SweepSpec::new(
        parameter,
        args.start,
        args.stop,
        args.step,
        preset,
        params.clone(),
    )?;
    let lik = likelihood_for(&args.common, &params)?;
    let mut w = csv_writer(args.common.out.as_deref())?;
    w.write_record([
        "scenario",
        "parameter",
        "selector",
        "percent",
        "n_locations",
        "n_agents",
        "p_change",
        "obs_prob",
        "focal_obs_prob",
        "runs",
        "turns",
        "seed",
        "performance",
        "mi_bits",
        "ri_bits",
    ])?;
    for point in spec.run(&lik)? {
        let ri = ri_closed_form(point.measured.performance, params.n_locations)?;
        let mut row = scenario_fields(&point.scenario);
        row.splice(
            1..1,
            [
                parameter.name().to_string(),
                parameter.selector().label(),
                format_sig9(point.percent),
            ],
        );
        row.extend([
            format_sig9(point.measured.performance),
            format_sig9(point.measured.information),
            format_sig9(ri),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn u_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    anyhow::ensure!(
        start.is_finite() && stop.is_finite() && step.is_finite() && start <= stop && step > 0.0,
        "malformed u grid start={start} stop={stop} step={step}"
    );
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn cmd_ri_curve(args: &RiCurveArgs) -> Result<()> {
    let grid = u_grid(args.start, args.stop, args.step)?;
    let mut w = csv_writer(args.out.as_deref())?;
    w.write_record(["u", "ri_bits"])?;
    if args.solver || args.utility.is_some() {
        let utility = match &args.utility {
            Some(path) => read_utility(path)?,
            None => utility_treasure_matrix(args.locations)?,
        };
        let prior = Distribution::uniform(utility.states())?;
        for u in grid {
            let point = ri_minimize(&utility, &prior, u, args.tol)
                .with_context(|| format!("at u = {u}"))?;
            w.write_record([format_sig9(u), format_sig9(point.information)])?;
        }
    } else {
        for u in grid {
            w.write_record([
                format_sig9(u),
                format_sig9(ri_closed_form(u, args.locations)?),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::RiCurve(a) => cmd_ri_curve(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
