use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergolab::experiments::{
    list_presets, output_root, preset, run_experiment, validate, ExitStatus, ExperimentConfig,
    RunError,
};

/// Recurrence experiments for cocycles over rotations, interval exchanges
/// and special flows.
#[derive(Parser)]
#[command(name = "ergolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its results.
    Run {
        /// Config file; use `preset:<name>` for a catalog entry.
        config: String,
        /// Output root (overrides ERGOLAB_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the preset catalog.
    Presets {
        /// Write each preset as `<name>.json` into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: String },
}

fn load(arg: &str) -> Result<ExperimentConfig, RunError> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return preset(name)
            .map(|p| p.config)
            .ok_or_else(|| RunError::Config(format!("unknown preset {name:?}")));
    }
    let text = fs::read_to_string(arg).map_err(|e| RunError::Config(format!("{arg}: {e}")))?;
    ExperimentConfig::from_json(&text).map_err(RunError::Config)
}

fn code(s: ExitStatus) -> ExitCode {
    ExitCode::from(s as u8)
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    code(e.exit_status())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let c = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let root = out.unwrap_or_else(|| output_root(Path::new("results")));
            match run_experiment(&c, &root) {
                Ok(rep) => {
                    for w in &rep.manifest.warnings {
                        eprintln!("warning: {w}");
                    }
                    if let Some(e) = &rep.manifest.error {
                        eprintln!("error: {e}");
                    }
                    println!("{}", rep.directory.display());
                    code(rep.status)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Presets { write } => {
            for p in list_presets() {
                println!("{:<20} {}", p.name, p.description);
                if let Some(dir) = &write {
                    let path = dir.join(format!("{}.json", p.name));
                    let text = serde_json::to_string_pretty(&p.config).expect("config serializes");
                    if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(&path, text + "\n")) {
                        eprintln!("error: {}: {e}", path.display());
                        return code(ExitStatus::ConfigError);
                    }
                }
            }
            code(ExitStatus::Success)
        }
        Command::Validate { config } => match load(&config).and_then(|c| validate(&c)) {
            Ok(()) => {
                println!("ok");
                code(ExitStatus::Success)
            }
            Err(e) => fail(&e),
        },
    }
}
