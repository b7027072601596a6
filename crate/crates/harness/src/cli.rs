use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_config, MethodName, ScenarioConfig};
use crate::error::HarnessError;
use crate::output::{
    placement_csv, sweep_csv, write_atomic, write_json, PLACEMENT_FILE, RESULT_FILE, SWEEP_FILE,
    TIMING_FILE,
};
use crate::run::{run_check, run_compare, run_curvature, run_place, run_sweep};

#[derive(Debug, Parser)]
#[command(
    name = "irs-placer",
    version,
    about = "Place reflecting surfaces around a MIMO radar"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select surface locations and write result.json and placement.csv.
    Place(CommonArgs),
    /// Greedy vs random vs guarantee for budgets 1..=M; writes sweep.csv.
    Sweep(CommonArgs),
    /// Curvature of the objective over the whole grid.
    Curvature(CommonArgs),
    /// Greedy against the exhaustive optimum.
    Compare(CommonArgs),
    /// Randomized monotonicity and diminishing-returns audit.
    Check(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario TOML, or a result.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Seed for random placements and the audit.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub method: Option<MethodName>,
    /// Budget (largest budget for sweep).
    #[arg(long)]
    pub m: Option<usize>,
    /// Random placements per budget (sweep) or chains (check).
    #[arg(long)]
    pub trials: Option<usize>,
}

impl CommonArgs {
    /// Loaded config with command-line overrides applied.
    fn resolve(&self, command: &Command) -> Result<ScenarioConfig, HarnessError> {
        let mut cfg = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(method) = self.method {
            cfg.run.method = method;
        }
        if let Some(m) = self.m {
            cfg.budget = m;
        }
        if let Some(t) = self.trials {
            match command {
                Command::Check(_) => cfg.run.check_trials = t,
                _ => cfg.run.random_trials = t,
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Place(a)
            | Command::Sweep(a)
            | Command::Curvature(a)
            | Command::Compare(a)
            | Command::Check(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Place(_) => "place",
            Command::Sweep(_) => "sweep",
            Command::Curvature(_) => "curvature",
            Command::Compare(_) => "compare",
            Command::Check(_) => "check",
        }
    }
}

#[derive(Serialize)]
struct Timing<'a> {
    command: &'a str,
    wall_clock_seconds: f64,
}

/// Runs one subcommand and returns the files written.
pub fn execute(command: &Command) -> Result<Vec<PathBuf>, HarnessError> {
    let args = command.args();
    let cfg = command.args().resolve(command)?;
    let out: &Path = &args.out;
    let started = Instant::now();
    let mut written = Vec::new();

    match command {
        Command::Place(_) => {
            let rec = run_place(&cfg)?;
            println!(
                "{} placed {} surface(s), f = {:.6}, curvature = {:.6}",
                rec.placement.method,
                rec.placement.sites.len(),
                rec.placement.final_value,
                rec.certificate.curvature
            );
            for s in &rec.placement.sites {
                println!(
                    "  #{} cell {:>5}  r = {:>8.3} m  θ = {:.4} rad  gain = {:.6}",
                    s.step, s.index, s.range_m, s.theta_rad, s.marginal_gain
                );
            }
            written.push(write_json(out, RESULT_FILE, &rec)?);
            let csv_path = out.join(PLACEMENT_FILE);
            write_atomic(&csv_path, &placement_csv(&rec.placement))?;
            written.push(csv_path);
        }
        Command::Sweep(_) => {
            let rec = run_sweep(&cfg)?;
            println!(
                "curvature = {:.6}, tight factor = {:.6}",
                rec.curvature, rec.tight_factor
            );
            println!(
                "{:>3} {:>12} {:>12} {:>10} {:>12}",
                "M", "greedy", "random", "std", "bound"
            );
            for r in &rec.rows {
                println!(
                    "{:>3} {:>12.6} {:>12.6} {:>10.6} {:>12.6}",
                    r.m, r.f_greedy, r.f_random_mean, r.f_random_std, r.bound_tight
                );
            }
            written.push(write_json(out, RESULT_FILE, &rec)?);
            let csv_path = out.join(SWEEP_FILE);
            write_atomic(&csv_path, &sweep_csv(&rec))?;
            written.push(csv_path);
        }
        Command::Curvature(_) => {
            let rec = run_curvature(&cfg)?;
            println!(
                "curvature = {:.6} (arg-min cell {}), tight = {:.6}, loose = {:.6}",
                rec.curvature, rec.argmin.index, rec.tight_factor, rec.loose_factor
            );
            written.push(write_json(out, RESULT_FILE, &rec)?);
        }
        Command::Compare(_) => {
            let rec = run_compare(&cfg)?;
            println!(
                "M = {}: greedy {:.6}, optimum {:.6}, ratio {:.6} (guarantee {:.6})",
                rec.budget,
                rec.greedy.final_value,
                rec.exhaustive.final_value,
                rec.ratio,
                rec.certificate.tight_factor
            );
            written.push(write_json(out, RESULT_FILE, &rec)?);
        }
        Command::Check(_) => {
            let rec = run_check(&cfg)?;
            let r = &rec.report;
            println!(
                "{} chains: {} monotonicity and {} diminishing-returns violations (worst margins {:.3e}, {:.3e})",
                r.trials,
                r.monotonicity_violations,
                r.diminishing_violations,
                r.worst_monotonicity_margin,
                r.worst_diminishing_margin
            );
            written.push(write_json(out, RESULT_FILE, &rec)?);
            if !r.passed() {
                return Err(HarnessError::Certificate(format!(
                    "{} chain(s) violate monotonicity or diminishing returns",
                    r.monotonicity_violations + r.diminishing_violations
                )));
            }
        }
    }

    let timing = Timing {
        command: command.name(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    written.push(write_json(out, TIMING_FILE, &timing)?);
    Ok(written)
}
