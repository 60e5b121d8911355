use clap::{Parser, Subcommand as ClapSubcommand};
use seqbound_cli::config::{ExperimentConfig, OutputFormat};
use seqbound_cli::{run_command, Subcommand, EXIT_INVALID_CONFIG};
use std::path::PathBuf;
use std::process::ExitCode;

/// Generalization-bound toolkit for multi-series time-series forecasting.
#[derive(Parser)]
#[command(name = "seqbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; flags override config keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base random seed (overrides the config key).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path for the report (overrides the config key).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format: json or csv.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Exit with status 3 when a theorem precondition is violated.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Simulate a synthetic panel and write it as CSV plus sidecar metadata.
    Simulate,
    /// Estimate a discrepancy (delta_s, delta_s_exact, delta_e, delta_oracle,
    /// delta_local, delta_t; select with the `estimator` config key).
    EstimateDiscrepancy,
    /// Estimate mixing coefficients (analytic, numeric_tv, collection_beta,
    /// bar_beta).
    EstimateMixing,
    /// Estimate complexities (empirical, linear_closed_form,
    /// relu_closed_form, covering).
    EstimateComplexity,
    /// Evaluate a bound from explicit ingredient values.
    EvaluateBounds,
    /// Monte-Carlo coverage validation of a bound.
    ValidateBound,
    /// Train all three methodologies over an (m, T) grid and tabulate
    /// winners by risk and by bound.
    RegimeExperiment,
    /// Recommend a methodology for a panel.
    Advise,
    /// Brute-force check of the independence-surrogate inequality.
    YuCheck,
    /// The periodic-tent counterexample demonstration.
    TentExample,
}

impl Command {
    fn to_subcommand(&self) -> Subcommand {
        match self {
            Command::Simulate => Subcommand::Simulate,
            Command::EstimateDiscrepancy => Subcommand::EstimateDiscrepancy,
            Command::EstimateMixing => Subcommand::EstimateMixing,
            Command::EstimateComplexity => Subcommand::EstimateComplexity,
            Command::EvaluateBounds => Subcommand::EvaluateBounds,
            Command::ValidateBound => Subcommand::ValidateBound,
            Command::RegimeExperiment => Subcommand::RegimeExperiment,
            Command::Advise => Subcommand::Advise,
            Command::YuCheck => Subcommand::YuCheck,
            Command::TentExample => Subcommand::TentExample,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(cfg) => cfg,
            Err(msg) => {
                eprintln!("{msg}");
                return ExitCode::from(EXIT_INVALID_CONFIG as u8);
            }
        },
        None => ExperimentConfig::default(),
    };
    let format = match cli.format.as_deref() {
        None => None,
        Some("json") => Some(OutputFormat::Json),
        Some("csv") => Some(OutputFormat::Csv),
        Some(other) => {
            eprintln!("config error: unknown format '{other}' (expected json or csv)");
            return ExitCode::from(EXIT_INVALID_CONFIG as u8);
        }
    };
    let cfg = base.with_overrides(
        cli.seed,
        cli.out.map(|p| p.display().to_string()),
        format,
    );
    match run_command(cli.command.to_subcommand(), &cfg, cli.strict) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("{msg}");
            let code = if msg.contains("config error") {
                EXIT_INVALID_CONFIG
            } else {
                1
            };
            ExitCode::from(code as u8)
        }
    }
}
