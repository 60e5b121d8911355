//! Command-line front end: simulation, estimation, bound evaluation,
//! coverage validation, the regime experiment, the methodology advisor, and
//! the brute-force inequality checks. Command implementations live here so
//! integration tests can drive them directly.

pub mod advisor;
pub mod commands;
pub mod config;
pub mod estimators;
pub mod oracle;
pub mod report;

use config::ExperimentConfig;
use report::CommandOutput;

/// All subcommands exposed by the binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    EstimateDiscrepancy,
    EstimateMixing,
    EstimateComplexity,
    EvaluateBounds,
    ValidateBound,
    RegimeExperiment,
    Advise,
    YuCheck,
    TentExample,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::EstimateDiscrepancy => "estimate-discrepancy",
            Subcommand::EstimateMixing => "estimate-mixing",
            Subcommand::EstimateComplexity => "estimate-complexity",
            Subcommand::EvaluateBounds => "evaluate-bounds",
            Subcommand::ValidateBound => "validate-bound",
            Subcommand::RegimeExperiment => "regime-experiment",
            Subcommand::Advise => "advise",
            Subcommand::YuCheck => "yu-check",
            Subcommand::TentExample => "tent-example",
        }
    }
}

/// Exit status mapping shared by the binary and the tests.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Run a subcommand against a resolved config and write its report.
/// Returns the process exit code.
pub fn run_command(
    command: Subcommand,
    cfg: &ExperimentConfig,
    strict: bool,
) -> Result<i32, String> {
    cfg.validate().map_err(|msg| format!("config error: {msg}"))?;
    let output: CommandOutput = dispatch(command, cfg).map_err(|e| format!("{e:#}"))?;
    report::emit(command.name(), cfg, &output)?;
    if strict && output.precondition_violated {
        return Ok(EXIT_PRECONDITION);
    }
    Ok(EXIT_OK)
}

fn dispatch(command: Subcommand, cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    match command {
        Subcommand::Simulate => commands::simulate::run(cfg),
        Subcommand::EstimateDiscrepancy => commands::estimate::run_discrepancy(cfg),
        Subcommand::EstimateMixing => commands::estimate::run_mixing(cfg),
        Subcommand::EstimateComplexity => commands::estimate::run_complexity(cfg),
        Subcommand::EvaluateBounds => commands::evaluate::run(cfg),
        Subcommand::ValidateBound => commands::validate::run(cfg),
        Subcommand::RegimeExperiment => commands::regime::run(cfg),
        Subcommand::Advise => commands::advise::run(cfg),
        Subcommand::YuCheck => commands::yu_check::run(cfg),
        Subcommand::TentExample => commands::tent_example::run(cfg),
    }
}
