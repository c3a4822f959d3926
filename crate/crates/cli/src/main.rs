//! `lubin-tate`: build formal groups, torsion tables, ramification data and
//! Artin actions, and run the invariant suites.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lubin_tate::verify::Suite;
use thiserror::Error;

use config::{Output, Partial, RunConfig};

pub const EXIT_FAIL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lubin_tate::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use lubin_tate::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                E::InvalidConfig(_) | E::Parse(_) | E::InvalidPolynomial(_) | E::InvalidPresentation(_) | E::NotAUniformizer(_),
            ) => {
                EXIT_USAGE
            }
            CliError::Core(_) => EXIT_FAIL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lubin-tate", version)]
#[command(about = "Lubin-Tate formal groups, torsion towers and finite-level local class field theory")]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// TOML file using the flag names as keys (N and D for precision and degree)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Residue characteristic
    #[arg(long, global = true)]
    p: Option<u32>,

    /// Degree of the unramified base L over K
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Precision: work modulo π^N
    #[arg(short = 'N', long = "prec", visible_alias = "N", global = true)]
    prec: Option<u32>,

    /// Total degree cap for power series
    #[arg(short = 'D', long = "deg", visible_alias = "D", global = true)]
    deg: Option<usize>,

    /// Torsion level
    #[arg(long, global = true)]
    m: Option<usize>,

    /// `standard` (πX + X^q), `cyclotomic` ((1+X)^p - 1), or coefficients of X, X^2, ..., X^q
    #[arg(long, global = true, allow_hyphen_values = true)]
    f: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    output: Option<Output>,

    /// Work over F_p((t)) instead of Q_p
    #[arg(long, global = true)]
    char_p: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build F_f and print its coefficients
    Fgroup,
    /// Run named invariant suites; without --p, over the default fixture set
    Verify {
        #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
        suite: String,
    },
    /// One row per a mod π^m: coordinates of [a](α) and its valuation
    Torsion {
        #[arg(value_parser = ["table"])]
        action: Option<String>,
    },
    /// Ramification data of a Galois presentation {ext, autos}
    Ramify {
        /// JSON file; `-` or nothing reads stdin
        #[arg(long)]
        input: Option<PathBuf>,
        /// Built-in presentation instead of --input
        #[arg(long, value_parser = ["zeta8", "zeta4"], conflicts_with = "input")]
        fixture: Option<String>,
    },
    /// Action of x on the level-m torsion points
    Artin {
        #[arg(value_parser = ["act"])]
        action: Option<String>,
        /// Field-element literal, e.g. `5`, `[1;1]*p^0` or `[3]*p^1`
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Torsion level; defaults to --m
        #[arg(long)]
        level: Option<usize>,
    },
    /// Coleman norm iterates of a unit polynomial with the congruence checks
    Coleman {
        /// Coefficients of g from X^0 upward; seeded random when omitted
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
    },
}

impl Opts {
    fn partial(&self) -> Partial {
        Partial {
            p: self.p,
            n: self.n,
            prec: self.prec,
            deg: self.deg,
            m: self.m,
            f: self.f.clone(),
            seed: self.seed,
            output: self.output,
            char_p: self.char_p.then_some(true),
        }
    }
}

/// Rendered output and whether every invariant it reports held.
pub struct Report {
    pub text: String,
    pub ok: bool,
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let file = match &cli.opts.config {
        Some(path) => Partial::from_file(path)?,
        None => Partial::default(),
    };
    let explicit_field = cli.opts.p.is_some() || file.p.is_some() || cli.opts.char_p || file.char_p == Some(true);
    let cfg = RunConfig::resolve(file.overlay(cli.opts.partial()))?;
    match cli.cmd {
        Command::Fgroup => commands::dispatch(&cfg, commands::Fgroup),
        Command::Verify { suite } => commands::verify(&cfg, suite.parse()?, explicit_field),
        Command::Torsion { .. } => commands::dispatch(&cfg, commands::Torsion),
        Command::Ramify { input, fixture } => commands::ramify(&cfg, input.as_deref(), fixture.as_deref()),
        Command::Artin { x, level, .. } => {
            let level = level.unwrap_or(cfg.m);
            if !(1..=config::MAX_M).contains(&level) {
                return Err(CliError::Usage(format!("level {level} must lie in 1..={}", config::MAX_M)));
            }
            commands::dispatch(&cfg, commands::Artin { x, level })
        }
        Command::Coleman { g } => commands::dispatch(&cfg, commands::Coleman { g }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.text);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
