mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noise_lattice::suite::Options;
use noise_lattice::{Error, Mode, Rational};

use commands::{Inputs, RandsupArgs, SigmaOp};
use report::{Outcome, Report};

/// Noise-type Boolean algebras of σ-fields on finite probability spaces.
#[derive(Parser)]
#[command(name = "noise-lattice", version)]
struct Cli {
    /// Numeric backend.
    #[arg(long, global = true, env = "NOISE_LATTICE_MODE", default_value = "rational")]
    mode: String,

    /// Output format; csv is available for chaos and spectrum reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Finite probability spaces.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Lattice operations on two partitions: OP SPACE X Y.
    Sigma {
        #[arg(value_enum)]
        op: SigmaOp,
        space: String,
        x: String,
        y: String,
    },
    /// Construction and auditing of algebras.
    #[command(subcommand)]
    Ntba(NtbaCmd),
    /// First chaos of an algebra (JSON file, `coords:N` or `parity:N`).
    #[command(subcommand)]
    Chaos(ReportCmd),
    /// Spectral decomposition of an algebra.
    #[command(subcommand)]
    Spectrum(ReportCmd),
    /// The countable cofinite example.
    #[command(subcommand)]
    Cofinite(CofiniteCmd),
    /// Random suprema.
    #[command(subcommand)]
    Randsup(RandsupCmd),
    /// Randomized property suites.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Finite shadows of the nonclassical example.
    Demo,
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Uniform measure on {+1,-1}^n.
    Dyadic {
        n: usize,
    },
    Load {
        file: String,
    },
}

#[derive(Subcommand)]
enum NtbaCmd {
    /// Coordinate algebra on {+1,-1}^n.
    Coords { n: usize },
    /// Parity algebra on {+1,-1}^(n+1).
    Parity { n: usize },
    /// Audit an algebra or an explicit family of partitions.
    Validate { file: String },
    /// Restrict to an element given as atom indices, e.g. "{0,2}".
    Restrict { file: String, atoms: String },
}

#[derive(Subcommand)]
enum ReportCmd {
    Report { source: String },
}

#[derive(Subcommand)]
enum CofiniteCmd {
    /// Worked examples, condition (c), completion and ultrafilters.
    Demo,
    /// Evaluate an expression such as "x5|Y(2k)" or "y1&x1".
    Eval { expr: String },
}

#[derive(Subcommand)]
enum RandsupCmd {
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Inclusion probability per level.
    #[arg(long, value_delimiter = ',', required = true)]
    ps: Vec<f64>,
    /// Atoms per level; a single value applies to every level.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    atoms: Vec<usize>,
    /// c_n for the reported (1 - p_n)^c_n; defaults to n².
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<u64>>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Finest-level atom tracked by the union bound.
    #[arg(long, default_value_t = 0)]
    atom: usize,
    /// Also test each level's sample frequencies.
    #[arg(long)]
    chi_square: bool,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Every suite.
    All {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: u64,
        /// Shift probability mass in the independence suite so it must fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

macro_rules! with_scalar {
    ($mode:expr, $f:ident($($arg:expr),*)) => {
        match $mode {
            Mode::Rational => commands::$f::<Rational>($($arg),*),
            Mode::Float => commands::$f::<f64>($($arg),*),
        }
    };
}

fn run(cli: &Cli, mode: Mode, inputs: &mut Inputs) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Space(SpaceCmd::Dyadic { n }) => with_scalar!(mode, space_dyadic(*n)),
        Command::Space(SpaceCmd::Load { file }) => with_scalar!(mode, space_load(inputs, file)),
        Command::Sigma { op, space, x, y } => with_scalar!(mode, sigma(inputs, *op, space, x, y)),
        Command::Ntba(NtbaCmd::Coords { n }) => with_scalar!(mode, ntba_coords(*n)),
        Command::Ntba(NtbaCmd::Parity { n }) => with_scalar!(mode, ntba_parity(*n)),
        Command::Ntba(NtbaCmd::Validate { file }) => {
            with_scalar!(mode, ntba_validate(inputs, file))
        }
        Command::Ntba(NtbaCmd::Restrict { file, atoms }) => {
            with_scalar!(mode, ntba_restrict(inputs, file, atoms))
        }
        Command::Chaos(ReportCmd::Report { source }) => {
            with_scalar!(mode, chaos_report(inputs, source))
        }
        Command::Spectrum(ReportCmd::Report { source }) => {
            with_scalar!(mode, spectrum_report(inputs, source))
        }
        Command::Cofinite(CofiniteCmd::Demo) => commands::cofinite_demo(),
        Command::Cofinite(CofiniteCmd::Eval { expr }) => commands::cofinite_eval(expr),
        Command::Randsup(RandsupCmd::Run(a)) => commands::randsup_run(RandsupArgs {
            ps: a.ps.clone(),
            atoms: a.atoms.clone(),
            c: a.c.clone(),
            trials: a.trials,
            seed: a.seed,
            atom: a.atom,
            chi_square: a.chi_square,
        }),
        Command::Check(CheckCmd::All {
            seed,
            cases,
            inject_fault,
        }) => with_scalar!(
            mode,
            check_all(Options {
                seed: *seed,
                cases: *cases,
                inject_fault: *inject_fault,
            })
        ),
        Command::Demo => with_scalar!(mode, demo()),
    }
}

/// 1 for failed consistency checks, 3 for capacity guards, 2 for anything
/// wrong with the input.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Capacity { .. }) => 3,
        Some(Error::Consistency(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode: Mode = match cli.mode.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let is_report = matches!(cli.command, Command::Chaos(_) | Command::Spectrum(_));
    if cli.format == Format::Csv && !is_report {
        eprintln!("error: csv output is only available for chaos and spectrum reports");
        return ExitCode::from(2);
    }
    let mut inputs = Inputs { bytes: Vec::new() };
    let outcome = match run(&cli, mode, &mut inputs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let command: Vec<String> = std::env::args().skip(1).collect();
    let mode_name = mode.to_string();
    let digest = report::digest(&command, &mode_name, &inputs.bytes);
    match cli.format {
        Format::Json => {
            let r = Report::new(command, digest, mode_name, &outcome);
            println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
        }
        Format::Csv => print!("{}", outcome.csv.as_deref().unwrap_or_default()),
        Format::Text => {
            print!("{}", outcome.text);
            if outcome.checks > 0 {
                println!(
                    "\n{}: {} checks, {} failed",
                    if outcome.pass { "PASS" } else { "FAIL" },
                    outcome.checks,
                    outcome.failures
                );
            }
        }
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
