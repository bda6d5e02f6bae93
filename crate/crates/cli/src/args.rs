use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use symlab_core::{Rational, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "symlab", version, about = "Minimum-variance symmetrizers of Bernoulli variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve the symmetrizer LP on a grid.
    Solve,
    /// Report the certificate bound 2 rho(q) = pq and check rho.
    Certify,
    /// Simulate the Skorokhod embedding of -X.
    Embed,
    /// Check the Itô identity and the conditioning decomposition.
    Ito,
    /// Check the defining properties of rho.
    VerifyRho,
    /// Run everything and compare LP, certificate and simulation.
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Embed => "embed",
            Command::Ito => "ito",
            Command::VerifyRho => "verify-rho",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

/// `LO..HI` with rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub lo: Rational,
    pub hi: Rational,
}

impl FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
        let lo: Rational = lo.parse().map_err(|e| format!("{e}"))?;
        let hi: Rational = hi.parse().map_err(|e| format!("{e}"))?;
        if lo >= hi {
            return Err(format!("empty grid range {lo}..{hi}"));
        }
        Ok(GridRange { lo, hi })
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Bernoulli parameter as an exact fraction, e.g. 3/10.
    #[arg(long = "p", global = true, default_value = "3/10", value_parser = parse_rational)]
    pub p: Rational,

    /// Grid spacing for the symmetrizer support, e.g. 1/20.
    #[arg(long, global = true, default_value = "1/20", value_parser = parse_rational)]
    pub grid_step: Rational,

    /// Grid range LO..HI.
    #[arg(long, global = true, default_value = "-2..1", allow_hyphen_values = true)]
    pub grid: GridRange,

    /// Number of simulated paths.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub paths: u64,

    /// Time step of the discretized Brownian paths.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub dt: f64,

    #[arg(long, global = true, env = "SYMLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Truncation horizon for simulated paths.
    #[arg(long, global = true, default_value_t = 1000.0)]
    pub t_max: f64,

    /// Sample points for the rho property checks.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: u64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub p: Rational,
    pub grid_step: Rational,
    pub grid_lo: Rational,
    pub grid_hi: Rational,
    pub sim: SimConfig,
    pub samples: u64,
    pub output: Output,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, String> {
        let o = &cli.opts;
        if !(o.p.is_positive() && o.p < Rational::ONE) {
            return Err(format!("--p {} must lie strictly between 0 and 1", o.p));
        }
        if !o.grid_step.is_positive() {
            return Err(format!("--grid-step {} must be positive", o.grid_step));
        }
        if o.samples == 0 {
            return Err("--samples must be at least 1".into());
        }
        Ok(RunConfig {
            command: cli.command,
            p: o.p,
            grid_step: o.grid_step,
            grid_lo: o.grid.lo,
            grid_hi: o.grid.hi,
            sim: SimConfig {
                n_paths: o.paths,
                dt: o.dt,
                seed: o.seed,
                t_max: o.t_max,
            },
            samples: o.samples,
            output: o.output,
        })
    }
}
