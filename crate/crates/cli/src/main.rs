use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dualtri_cli::config::{FormatName, ScenarioConfig};
use dualtri_cli::scenarios::{run_scenario, ScenarioError, SCENARIOS};

// Exit codes: 0 success, 2 config error, 3 every target infeasible,
// 4 internal numerical failure, 1 anything else (I/O).
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dualtri",
    version,
    about = "Scenario runner for the dual-triangle manipulator toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario from a config file
    Run {
        /// Scenario name; see `list-scenarios`
        scenario: String,
        /// Path to the TOML config
        #[arg(long)]
        config: PathBuf,
        /// Output path (defaults to the config's `output.path`, else stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (defaults to the config's `output.format`, else csv)
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Parse and validate a config file without running anything
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available scenarios
    ListScenarios,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(alias = "json-like")]
    Json,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            config,
            out,
            format,
        } => run(&scenario, &config, out, format),
        Command::Validate { config } => validate(&config),
        Command::ListScenarios => {
            for (name, description) in SCENARIOS {
                println!("{name:<14} {description}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn validate(path: &Path) -> ExitCode {
    match ScenarioConfig::load(path) {
        Ok(cfg) => {
            let scenarios = cfg.configured_scenarios();
            if scenarios.is_empty() {
                println!("config OK (no scenario sections)");
            } else {
                println!("config OK (scenarios: {})", scenarios.join(", "));
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(
    scenario: &str,
    config_path: &Path,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> ExitCode {
    let cfg = match ScenarioConfig::load(config_path) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let table = match run_scenario(scenario, &cfg) {
        Ok(table) => table,
        Err(err @ (ScenarioError::Unknown(_) | ScenarioError::MissingSection(_))) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(err @ ScenarioError::Numerical(_)) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };

    if let Err(msg) = table.assert_finite() {
        eprintln!("error: internal numerical failure: {msg}");
        return ExitCode::from(EXIT_NUMERICAL);
    }

    let output_cfg = cfg.output.as_ref();
    let format = format.unwrap_or_else(|| {
        match output_cfg.and_then(|o| o.format).unwrap_or(FormatName::Csv) {
            FormatName::Csv => Format::Csv,
            FormatName::Json => Format::Json,
        }
    });
    let rendered = match format {
        Format::Csv => table.to_csv_string(),
        Format::Json => table.to_json_string(),
    };

    // DUALTRI_OUT_DIR redirects relative output paths; the only
    // environment knob the tool reads.
    let out_path = out
        .or_else(|| output_cfg.and_then(|o| o.path.clone()).map(PathBuf::from))
        .map(|path| match std::env::var_os("DUALTRI_OUT_DIR") {
            Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
            _ => path,
        });
    match out_path {
        Some(path) => {
            if let Err(err) = std::fs::write(&path, rendered) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return ExitCode::FAILURE;
            }
            eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
        }
        None => print!("{rendered}"),
    }

    // A map in which not a single cell is feasible is an error for scripts.
    if let Some((0, total)) = table.feasibility() {
        if total > 0 {
            eprintln!("error: all {total} targets infeasible");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
    }
    ExitCode::SUCCESS
}
