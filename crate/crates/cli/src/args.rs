use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markov_core::exact::Rounding;
use markov_core::Rational;

#[derive(Debug, Parser)]
#[command(name = "mkseries", version, about = "Exact series transformations and digit-certified constants")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "MKSERIES_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for anything randomised.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundingArg {
    Truncate,
    RoundHalfEven,
}

impl From<RoundingArg> for Rounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Truncate => Rounding::Truncate,
            RoundingArg::RoundHalfEven => Rounding::RoundHalfEven,
        }
    }
}

/// Parameters given as exact `n/d` strings.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub a: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub b: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub c: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub d: Option<Rational>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub q: Option<Rational>,
    /// Shift parameter of the ₄F₃ family.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub h: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub x: u64,
    pub z: u64,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, z) = s.split_once(['x', 'X', '×']).ok_or_else(|| format!("expected XxZ, got {s:?}"))?;
        let x: u64 = x.trim().parse().map_err(|_| format!("bad grid size {x:?}"))?;
        let z: u64 = z.trim().parse().map_err(|_| format!("bad grid size {z:?}"))?;
        if x == 0 || z == 0 {
            return Err("grid sizes must be positive".into());
        }
        Ok(Grid { x, z })
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    if s.contains(['.', 'e', 'E']) {
        return Err(format!("{s:?}: decimal input is not accepted, write n/d"));
    }
    Rational::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a catalog entry to a number of proven digits.
    Compute {
        id: String,
        #[arg(long, default_value_t = 30)]
        digits: usize,
        /// Sum exactly this many terms instead of searching for the fewest.
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long, value_enum, default_value_t = RoundingArg::RoundHalfEven)]
        rounding: RoundingArg,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Tabulate terms needed by every entry for one constant.
    Compare {
        /// zeta2 or zeta3.
        constant: String,
        #[arg(long, default_value_t = 30)]
        digits: usize,
        #[arg(long, value_enum, default_value_t = RoundingArg::RoundHalfEven)]
        rounding: RoundingArg,
    },
    /// Check the pair condition on a grid and the Green identity on a rectangle.
    VerifyPair {
        /// 3phi2, 4f3 or well-poised.
        fixture: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "20x20")]
        grid: Grid,
        /// Rectangle for the Green identity; defaults to the grid.
        #[arg(long)]
        rect: Option<Grid>,
        /// Perturb V at one seeded grid point.
        #[arg(long)]
        fuzz: bool,
    },
    /// Check a certificate identity on a grid and at random parameters.
    VerifyCertificate {
        /// 3phi2.
        family: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "20x20")]
        grid: Grid,
        /// Number of seeded random parameter tuples.
        #[arg(long, default_value_t = 50)]
        random: usize,
        /// Add a seeded constant to the certificate.
        #[arg(long)]
        fuzz: bool,
    },
    /// Solve for the multipliers step by step.
    Solve {
        /// 3phi2-u1, 4f3-u2 or well-poised-u3.
        family: String,
        /// u1, u2, u3 or u3-on-u1-family; defaults to the family's own form.
        #[arg(long)]
        form: Option<String>,
        #[arg(long, default_value_t = 10)]
        x_max: u64,
        /// Sample points per step; defaults to unknowns + 2.
        #[arg(long)]
        z_samples: Option<u64>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// List catalog entries.
    List,
}
