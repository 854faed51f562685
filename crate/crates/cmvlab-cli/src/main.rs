use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cmvlab_cli::config::{load_config, Command};
use cmvlab_cli::error::{exit, CliError};
use cmvlab_cli::output::Format;
use cmvlab_cli::run::{run, write_error_record, RunOptions};
use cmvlab_cli::{resolve_out_dir, ConfigError};

/// Runs a cmvlab experiment described by a JSON config.
///
/// Exit codes: 0 ok, 1 i/o failure, 2 config error, 3 model violation,
/// 4 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "cmvlab", version)]
struct Args {
    /// Command to run; overrides the config's `command`
    #[arg(value_parser = parse_command)]
    command: Option<Command>,

    /// Experiment config (JSON)
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory; the CMVLAB_OUT environment variable takes precedence
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Overrides the config's seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (default: available cores); results do not depend on it
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn parse_command(s: &str) -> Result<Command, String> {
    Command::parse(s).ok_or_else(|| {
        let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
        format!("unknown command {s:?}; expected one of {}", names.join(", "))
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let env_out = std::env::var_os("CMVLAB_OUT").map(PathBuf::from);
    let fallback_out = env_out.clone().or_else(|| args.out.clone()).unwrap_or_else(|| "cmvlab-out".into());

    let mut cfg = match load_config(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&fallback_out, CliError::Config(e)),
    };
    if let Some(c) = args.command {
        cfg.command = cmvlab_cli::config::CommandList::One(c);
        // the override may need parts of the model the config did not
        if let Err(e) = revalidate(&cfg) {
            return fail(&fallback_out, CliError::Config(e));
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out_dir = resolve_out_dir(env_out, args.out, &cfg);
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let opts = RunOptions {
        out_dir,
        format: args.format,
    };
    match run(&cfg, &opts) {
        Ok(manifest) => {
            for path in &manifest.outputs {
                println!("{}", path.display());
            }
            ExitCode::from(exit::OK as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn revalidate(cfg: &cmvlab_cli::ExperimentConfig) -> Result<(), ConfigError> {
    let text = serde_json::to_string(cfg).expect("configs serialize");
    cmvlab_cli::validate_config(&text).map(|_| ())
}

fn fail(out_dir: &std::path::Path, err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    write_error_record(out_dir, &err);
    ExitCode::from(err.exit_code() as u8)
}
