//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decompose::solve_decompose;
use crate::error::{Error, Result};
use crate::instance::{Instance, Normalized};
use crate::nonadditive::{expected_ratio_bound, expected_ratio_estimate, NonAdditiveInstance};
use crate::optimal::{feasible, solve_optimal};
use crate::profile::Profile;
use crate::sim::{default_grid, fmt_num, run_exact, run_monte_carlo, to_csv};

#[derive(Debug, Parser)]
#[command(name = "multislope", version, about = "Randomized strategies for multislope ski rental")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and normalize an instance; list dropped slopes and breakpoints.
    Validate { instance: PathBuf },
    /// Offline optimum on the default grid, as CSV.
    Opt {
        instance: PathBuf,
        #[arg(long, default_value_t = 20)]
        grid_points: usize,
    },
    /// Optimal ratio by bisection over tight profiles.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Stacked classical profiles and their certified bound.
    Decompose {
        instance: PathBuf,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Whether a tight profile exists for one ratio.
    Feasible {
        instance: PathBuf,
        #[arg(long)]
        c: f64,
    },
    /// Exact and Monte-Carlo cost report for a saved profile, as CSV.
    Simulate {
        instance: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        grid_points: usize,
    },
    /// Expected ratio of randomized doubling in the non-additive model.
    Nonadditive {
        instance: PathBuf,
        #[arg(long, default_value_t = std::f64::consts::E)]
        alpha: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<Normalized<f64>> {
    let text = fs::read_to_string(path)?;
    Instance::from_json_str(&text)
}

fn write_profile(path: &Path, profile: &Profile<f64>) -> Result<()> {
    fs::write(path, profile.to_json()?)?;
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { instance } => {
            let norm = load(&instance)?;
            for d in &norm.dropped {
                writeln!(
                    out,
                    "dropped slope {} (b={}, r={}): {}",
                    d.index,
                    fmt_num(d.slope.buy),
                    fmt_num(d.slope.rent),
                    d.reason
                )?;
            }
            for w in &norm.warnings {
                writeln!(err, "warning: {w}")?;
            }
            let inst = &norm.instance;
            writeln!(out, "i,b,r,s")?;
            for i in 0..=inst.k() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    i,
                    fmt_num(inst.buy(i)),
                    fmt_num(inst.rent(i)),
                    fmt_num(inst.intersections()[i])
                )?;
            }
        }
        Command::Opt { instance, grid_points } => {
            let inst = load(&instance)?.instance;
            writeln!(out, "t,opt,slope")?;
            for t in default_grid(&inst, grid_points, &[])? {
                writeln!(out, "{},{},{}", fmt_num(t), fmt_num(inst.opt_cost(t)?), inst.opt_slope(t)?)?;
            }
        }
        Command::Solve {
            instance,
            eps,
            profile_out,
        } => {
            let inst = load(&instance)?.instance;
            let sol = solve_optimal(&inst, eps)?;
            writeln!(out, "c_star={}", fmt_num(sol.c_star))?;
            writeln!(out, "lower={}", fmt_num(sol.lower))?;
            writeln!(out, "iterations={}", sol.iterations)?;
            if let Some(path) = profile_out {
                write_profile(&path, &sol.profile)?;
            }
        }
        Command::Decompose { instance, profile_out } => {
            let inst = load(&instance)?.instance;
            let d = solve_decompose(&inst)?;
            writeln!(out, "bound={}", fmt_num(d.bound))?;
            writeln!(out, "rent_shift={}", fmt_num(d.shift))?;
            if let Some(path) = profile_out {
                write_profile(&path, &d.profile)?;
            }
        }
        Command::Feasible { instance, c } => {
            let inst = load(&instance)?.instance;
            let trace = feasible(&inst, c)?;
            match &trace.failure {
                None => {
                    writeln!(out, "feasible")?;
                    if let Some(m) = trace.terminal_slope {
                        let end = trace.segments.last().map_or(0.0, |s| s.t1);
                        writeln!(out, "slope {m} fully bought at t={}", fmt_num(end))?;
                    }
                }
                Some(f) => {
                    writeln!(out, "infeasible: {} at t={}", f.reason, fmt_num(f.time))?;
                    return Ok(1);
                }
            }
        }
        Command::Simulate {
            instance,
            profile,
            samples,
            seed,
            grid_points,
        } => {
            let inst = load(&instance)?.instance;
            let prof = Profile::<f64>::from_json_str(&fs::read_to_string(&profile)?)?;
            if prof.instance() != &inst {
                return Err(Error::Precondition(
                    "profile was built for a different instance".into(),
                ));
            }
            let grid = default_grid(&inst, grid_points, &prof.breakpoints())?;
            let report = if samples > 0 {
                run_monte_carlo(&prof, &grid, samples, seed)?
            } else {
                run_exact(&prof, &grid)?
            };
            out.write_all(to_csv(&report).as_bytes())?;
            if let (Some(m), Some(t)) = (report.max_ratio, report.argmax) {
                writeln!(err, "max_ratio={} at t={}", fmt_num(m), fmt_num(t))?;
            }
            for c in &report.checks {
                writeln!(err, "check {}: {}", c.name, if c.passed { "pass" } else { "fail" })?;
            }
            if let Some(mc) = &report.mc {
                writeln!(err, "rng={} seed={} samples={}", mc.rng, mc.seed, mc.samples)?;
            }
        }
        Command::Nonadditive {
            instance,
            alpha,
            tau,
            samples,
            seed,
        } => {
            let ninst = NonAdditiveInstance::new(load(&instance)?.instance);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let est = expected_ratio_estimate(&ninst, alpha, tau, samples, &mut rng)?;
            writeln!(out, "mean_ratio={}", fmt_num(est.mean))?;
            writeln!(out, "stderr={}", fmt_num(est.stderr))?;
            writeln!(out, "bound={}", fmt_num(expected_ratio_bound(alpha)))?;
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 1 for domain errors and
/// infeasible probes, 2 for unreadable or malformed input.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
