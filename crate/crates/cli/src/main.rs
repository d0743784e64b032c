use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbattery::catalog::{catalog, lookup};
use qbattery::config::{load_config, LogBaseName, ScenarioConfig, SweepParameter, SweepSpec};
use qbattery::error::{exit, ConfigError, RunError};
use qbattery::runner::{run_scenario, RunOptions};
use qbattery::selfcheck::self_check;

/// Open-system simulator of a thermally powered quantum battery.
#[derive(Parser)]
#[command(name = "qbattery", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a catalog scenario, a scenario file or an inline document.
    Run {
        target: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a target with its sweep replaced by the given values.
    Sweep {
        target: String,
        #[arg(long, value_parser = parse_parameter)]
        parameter: SweepParameter,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the catalog scenarios.
    List,
    /// Check the numerics against closed-form references.
    SelfCheck {
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Output root; files go to <out-dir>/<scenario>. Defaults to
    /// $QBATTERY_OUT_DIR or `out`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_parser = parse_log_base)]
    log_base: Option<LogBaseName>,
}

fn parse_parameter(s: &str) -> Result<SweepParameter, String> {
    match s {
        "g" => Ok(SweepParameter::G),
        "k" => Ok(SweepParameter::K),
        "f" => Ok(SweepParameter::F),
        _ => Err(format!("expected g, k or f, got `{s}`")),
    }
}

fn parse_log_base(s: &str) -> Result<LogBaseName, String> {
    match s {
        "2" => Ok(LogBaseName::Two),
        "e" => Ok(LogBaseName::E),
        _ => Err(format!("expected 2 or e, got `{s}`")),
    }
}

fn resolve_target(target: &str) -> Result<ScenarioConfig, ConfigError> {
    match lookup(target) {
        Ok(c) => Ok(c),
        Err(_) => load_config(target),
    }
}

fn execute(mut cfg: ScenarioConfig, common: CommonArgs) -> Result<ExitCode, RunError> {
    if let Some(dt) = common.dt {
        cfg.dt = dt;
    }
    if let Some(t) = common.t_max {
        cfg.t_max = t;
    }
    if let Some(b) = common.log_base {
        cfg.log_base = b;
    }
    let root = common
        .out_dir
        .or_else(|| std::env::var_os("QBATTERY_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let opts = RunOptions {
        out_dir: root.join(&cfg.name),
        threads: common.threads,
    };
    let outcome = run_scenario(&cfg, &opts)?;
    let m = &outcome.manifest;
    println!(
        "{}: {} files, {:.1} s on {} threads, manifest {}",
        m.scenario,
        m.files.len(),
        m.wall_time_s,
        m.threads,
        outcome.manifest_path.display()
    );
    if m.all_passed() {
        Ok(ExitCode::from(exit::SUCCESS as u8))
    } else {
        for c in m.failed() {
            eprintln!(
                "invariant {} failed: {} vs {} ({})",
                c.name, c.value, c.threshold, c.detail
            );
        }
        Ok(ExitCode::from(exit::CHECK_FAILED as u8))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for c in catalog() {
                println!("{:<6} {}", c.name, c.description);
            }
            return ExitCode::SUCCESS;
        }
        Command::SelfCheck { json } => {
            let report = self_check();
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                for c in &report.checks {
                    let tag = if c.passed { "ok  " } else { "FAIL" };
                    println!(
                        "{tag} {:<28} {:.3e} (limit {:.1e}) {}",
                        c.name, c.value, c.threshold, c.detail
                    );
                }
                println!("{:.1} s", report.wall_time_s);
            }
            let code = if report.all_passed() {
                exit::SUCCESS
            } else {
                exit::CHECK_FAILED
            };
            return ExitCode::from(code as u8);
        }
        Command::Run { target, common } => resolve_target(&target)
            .map_err(RunError::from)
            .and_then(|cfg| execute(cfg, common)),
        Command::Sweep {
            target,
            parameter,
            values,
            common,
        } => resolve_target(&target)
            .map_err(RunError::from)
            .and_then(|mut cfg| {
                if parameter == SweepParameter::F {
                    cfg.f_values = None;
                }
                cfg.sweep = Some(SweepSpec { parameter, values });
                execute(cfg, common)
            }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
