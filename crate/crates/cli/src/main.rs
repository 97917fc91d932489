use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::BigRational;

use liouville_cli::{
    cmd_e1, cmd_eval, cmd_growth, cmd_mc, cmd_selftest, cmd_ss, parse_field_flag,
    parse_window_flag, CliError, GrowthSource, OutputFormat, Report, RunConfig,
};

/// Exact-arithmetic computations around symplectic cohomology: spectral
/// pages, orbit growth, deformation solving and a model-expression evaluator.
#[derive(Parser)]
#[command(name = "liouville", version, about)]
struct Cli {
    /// Coefficient field: `q` or `fp:<prime>`.
    #[arg(long, global = true, default_value = "q")]
    field: String,
    /// Truncation order for series computations (rational, e.g. `20` or `7/2`).
    #[arg(long, global = true, default_value = "20")]
    trunc: String,
    /// Total-degree window `<lo>..<hi>`.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Column cutoff (the most negative column to keep).
    #[arg(long, global = true)]
    columns: Option<i64>,
    /// Output format: `text` or `json`.
    #[arg(long, global = true, default_value = "text")]
    output: String,
    /// Seed for the randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the first page of a builtin case.
    E1 {
        /// ball(N), surface(G), tstar_sphere(N) or s2_equivariant.
        #[arg(long)]
        case: String,
    },
    /// Run the builtin differentials and certify degeneration.
    Ss {
        #[arg(long)]
        case: String,
    },
    /// Estimate the polynomial growth degree of a count function.
    Growth {
        /// File of `tau count` lines.
        #[arg(long, conflicts_with = "torus_profile")]
        counts: Option<PathBuf>,
        /// File of `s xi1 xi2` speed samples.
        #[arg(long)]
        torus_profile: Option<PathBuf>,
        /// Largest period threshold when sampling a profile.
        #[arg(long, default_value_t = 10_000)]
        tau_max: i64,
        /// Smallest period threshold when sampling a profile.
        #[arg(long, default_value_t = 8)]
        tau_min: i64,
    },
    /// Solve the deformation equation for disc-count data.
    Mc {
        /// File of `alpha1 alpha2 k area` lines.
        #[arg(long)]
        data: PathBuf,
    },
    /// Evaluate a model expression.
    Eval {
        /// Expression, e.g. `csum(ball(3), surface(2))`.
        expr: String,
    },
    /// Golden-file and property suites; exits nonzero on any mismatch.
    Selftest,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let field = parse_field_flag(&cli.field)?;
    let trunc: BigRational = liouville_core::reeb::parse_rational(&cli.trunc)
        .ok_or_else(|| CliError::Parse(format!("bad truncation order `{}`", cli.trunc)))?;
    let window = cli
        .window
        .as_deref()
        .map(parse_window_flag)
        .transpose()?;
    Ok(RunConfig {
        field,
        trunc,
        window,
        columns: cli.columns,
        seed: cli.seed,
    })
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Compute(format!("cannot read {}: {e}", path.display())))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<(Report, bool), CliError> {
    match &cli.command {
        Command::E1 { case } => Ok((cmd_e1(case, cfg)?, true)),
        Command::Ss { case } => Ok((cmd_ss(case, cfg)?, true)),
        Command::Growth {
            counts,
            torus_profile,
            tau_max,
            tau_min,
        } => {
            let source = match (counts, torus_profile) {
                (Some(path), None) => GrowthSource::Counts(read_file(path)?),
                (None, Some(path)) => GrowthSource::TorusProfile {
                    content: read_file(path)?,
                    tau_min: *tau_min,
                    tau_max: *tau_max,
                },
                _ => {
                    return Err(CliError::Parse(
                        "growth needs exactly one of --counts or --torus-profile".into(),
                    ))
                }
            };
            Ok((cmd_growth(source, cfg)?, true))
        }
        Command::Mc { data } => Ok((cmd_mc(&read_file(data)?, cfg)?, true)),
        Command::Eval { expr } => Ok((cmd_eval(expr, cfg)?, true)),
        Command::Selftest => {
            let (report, ok) = cmd_selftest(cfg)?;
            Ok((report, ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match cli.output.as_str() {
        "text" => OutputFormat::Text,
        "json" => OutputFormat::Json,
        other => {
            eprintln!("error: bad output format `{other}`; expected `text` or `json`");
            return ExitCode::from(2);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli, &cfg) {
        Ok((report, ok)) => {
            print!("{}", report.render(output));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Parse(_) => ExitCode::from(2),
                CliError::Compute(_) => ExitCode::from(3),
                CliError::SelftestFailed => ExitCode::from(4),
            }
        }
    }
}
