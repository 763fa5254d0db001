//! `symopt`: solve, verify, simulate and benchmark min-max shortest-path
//! problems on hypergraphs and their symbolic abstractions.

mod bench;
mod convert;
mod input;
mod manifest;
mod materialize;
mod simulate;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use symopt::runtime::{CachePolicy, SolveOptions};

#[derive(Parser)]
#[command(name = "symopt", version, about = "Min-max optimal control on hypergraphs")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Memory budget, e.g. `512M` or `4G` (required by `--cache budgeted`).
    #[arg(long, value_parser = parse_bytes)]
    mem_budget: Option<usize>,
    /// Transition cache policy: all, budgeted or none.
    #[arg(long, default_value = "all")]
    cache: CachePolicy,
}

impl SolverArgs {
    fn options(&self, verbose: u8) -> Result<SolveOptions> {
        if self.cache == CachePolicy::Budgeted && self.mem_budget.is_none() {
            bail!("--cache budgeted needs --mem-budget");
        }
        Ok(SolveOptions {
            workers: self.threads,
            memory_budget_bytes: self.mem_budget.unwrap_or(0),
            cache_policy: self.cache,
            metrics_interval: if verbose > 0 { 1 } else { 0 },
            max_sweeps: None,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file or configuration.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check solver and abstraction invariants.
    Verify {
        input: Option<PathBuf>,
        /// Skip the brute-force oracle above this many states.
        #[arg(long, default_value_t = 4096)]
        oracle_max_states: usize,
        /// Also check a batch of random instances.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Monte-Carlo samples for abstraction checks.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Closed-loop simulation of the two-phase mission.
    Simulate {
        config: PathBuf,
        drop: PathBuf,
        land: PathBuf,
        /// Initial state `x1,x2,x3,x4` (defaults to the configured start).
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
        /// Also write region outlines and the path for plotting.
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
    },
    /// Time the solver across thread counts.
    Bench {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        threads_list: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        #[arg(long, value_parser = parse_bytes)]
        mem_budget: Option<usize>,
        #[arg(long, default_value = "all")]
        cache: CachePolicy,
        /// Per-sweep throughput CSV.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Materialize the abstraction of a configuration as a problem file.
    Build {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Convert solver output between text and binary.
    Convert {
        #[arg(long)]
        to: Format,
        #[arg(long)]
        bin: PathBuf,
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        controller: PathBuf,
    },
}

fn parse_bytes(s: &str) -> Result<usize, String> {
    let t = s.trim();
    let (num, mult) = match t.char_indices().find(|(_, c)| c.is_ascii_alphabetic()) {
        Some((i, _)) => {
            let mult: usize = match t[i..].to_ascii_uppercase().trim_end_matches("IB").trim_end_matches('B') {
                "" => 1,
                "K" => 1 << 10,
                "M" => 1 << 20,
                "G" => 1 << 30,
                "T" => 1 << 40,
                other => return Err(format!("unknown size suffix `{other}`")),
            };
            (&t[..i], mult)
        }
        None => (t, 1),
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("bad size `{s}`"))?;
    if !(v >= 0.0) {
        return Err(format!("bad size `{s}`"));
    }
    Ok((v * mult as f64) as usize)
}

fn verify(input: Option<&Path>, args: &verify::VerifyArgs, random: Option<usize>) -> Result<bool> {
    let mut rep = verify::Report::default();
    if let Some(path) = input {
        match input::load(path) {
            Ok(loaded) => verify::verify_input(&loaded.input, args, &mut rep)?,
            Err(e) => {
                println!("FAIL load: {e:#}");
                return Ok(false);
            }
        }
    }
    if let Some(n) = random {
        verify::verify_random(n, args, &mut rep);
    }
    if input.is_none() && random.is_none() {
        bail!("verify needs an input file or --random N");
    }
    Ok(!rep.failed())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { input, solver, out } => {
            let opts = solver.options(cli.verbose)?;
            let loaded = input::load(&input)?;
            let converged = solve::cmd_solve(&input, &loaded, &opts, &out)?;
            if !converged {
                eprintln!("not converged within the sweep bound (negative cycle suspected)");
            }
            Ok(ExitCode::from(if converged { 0 } else { 2 }))
        }
        Command::Verify { input, oracle_max_states, random, seed, samples } => {
            let args = verify::VerifyArgs { oracle_max_states, samples, seed };
            Ok(ExitCode::from(if verify(input.as_deref(), &args, random)? { 0 } else { 1 }))
        }
        Command::Simulate { config, drop, land, x0, out, emit_plot_data } => {
            let x0 = x0.as_deref().map(simulate::parse_x0).transpose()?;
            let loaded = input::load(&config)?;
            let args = simulate::SimulateArgs { drop: &drop, land: &land, x0, out: &out, plot: emit_plot_data.as_ref() };
            simulate::cmd_simulate(&loaded, &args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { input, threads_list, repeat, mem_budget, cache, series } => {
            if repeat == 0 {
                bail!("--repeat must be at least 1");
            }
            let solver = SolverArgs { threads: 1, mem_budget, cache };
            let opts = solver.options(cli.verbose)?;
            let loaded = input::load(&input)?;
            bench::cmd_bench(&loaded, &opts, &threads_list, repeat, series.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { config, out } => {
            let loaded = input::load(&config)?;
            materialize::cmd_build(&config, &loaded, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Convert { to, bin, values, controller } => {
            match to {
                Format::Binary => convert::to_binary(&values, &controller, &bin),
                Format::Text => convert::to_text(&bin, &values, &controller),
            }
            .context("convert")?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_bytes;

    #[test]
    fn sizes() {
        assert_eq!(parse_bytes("1024"), Ok(1024));
        assert_eq!(parse_bytes("512M"), Ok(512 << 20));
        assert_eq!(parse_bytes("2GiB"), Ok(2 << 30));
        assert_eq!(parse_bytes("1.5k"), Ok(1536));
        assert!(parse_bytes("3Q").is_err());
    }
}
