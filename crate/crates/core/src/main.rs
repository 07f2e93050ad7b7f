use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use duality_bench::scenario::{
    export_outputs, load_config, run_scenario, RunReport, Scenario, ScenarioConfig, SUMMARY_HEADER,
};
use duality_bench::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "duality-bench",
    version,
    about = "Double-pinhole lens bench: fringes, image spots, wires and photon ledgers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its outputs.
    Run {
        scenario: Scenario,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one scenario for each value of a parameter.
    Sweep {
        scenario: Scenario,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the scenario names.
    List,
}

enum Failure {
    Validation(Error),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e)
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn base_config(path: Option<&Path>) -> Result<ScenarioConfig, Failure> {
    match path {
        Some(p) => load_config(p).map_err(Failure::Validation),
        None => Ok(ScenarioConfig::default()),
    }
}

fn output_dir(cli: Option<PathBuf>, cfg: &ScenarioConfig, scenario: Scenario) -> PathBuf {
    cli.or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(scenario.name()))
}

fn run_one(cfg: &ScenarioConfig, scenario: Scenario, dir: &Path) -> Result<RunReport, Failure> {
    let (report, artifacts) = run_scenario(cfg, scenario)?;
    export_outputs(&report, &artifacts, dir).map_err(Failure::Validation)?;
    print!("{report}");
    println!("outputs: {}", dir.display());
    Ok(report)
}

fn execute(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Run {
            scenario,
            config,
            out,
            seed,
        } => {
            let mut cfg = base_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate_for(scenario).map_err(Failure::Validation)?;
            let dir = output_dir(out, &cfg, scenario);
            Ok(run_one(&cfg, scenario, &dir)?.passed())
        }
        Command::Sweep {
            scenario,
            param,
            values,
            config,
            out,
        } => {
            let base = base_config(config.as_deref())?;
            if values.is_empty() {
                return Err(Failure::Validation(Error::Validation {
                    key: "values".into(),
                    message: "need at least one value".into(),
                }));
            }
            let mut runs = Vec::with_capacity(values.len());
            for v in &values {
                let mut cfg = base.clone();
                cfg.set(&param, v.trim()).map_err(Failure::Validation)?;
                cfg.validate_for(scenario).map_err(Failure::Validation)?;
                runs.push((v.trim().to_string(), cfg));
            }
            let root = output_dir(out, &base, scenario);
            let mut summary = format!("{SUMMARY_HEADER}\n");
            let mut all_passed = true;
            for (v, cfg) in &runs {
                let label = format!("{param}={v}");
                println!("== {label}");
                let report = run_one(cfg, scenario, &root.join(&label))?;
                all_passed &= report.passed();
                for row in &report.rows {
                    let mut row = row.clone();
                    row.label = format!("{}[{label}]", row.label);
                    summary.push_str(&row.csv_line());
                    summary.push('\n');
                }
            }
            let path = root.join("sweep_summary.csv");
            std::fs::write(&path, summary).map_err(|e| {
                Failure::Validation(Error::Io {
                    path: path.clone(),
                    source: e,
                })
            })?;
            println!("sweep summary: {}", path.display());
            Ok(all_passed)
        }
        Command::Validate { config } => {
            let cfg = load_config(&config).map_err(Failure::Validation)?;
            if let Some(s) = cfg.scenario {
                cfg.validate_for(s).map_err(Failure::Validation)?;
            }
            println!("{}: ok", config.display());
            Ok(true)
        }
        Command::List => {
            for s in Scenario::ALL {
                println!("{s}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more numerical checks failed");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
