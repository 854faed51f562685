//! Experiment runner for cmvlab: validated JSON configs in, CSV or JSON
//! tables plus a run manifest out.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{validate_config, Command, ExperimentConfig};
pub use error::{CliError, ConfigError};
pub use output::{Format, RunManifest};
pub use run::{execute, run, RunOptions};

pub const TOOL_VERSION: &str = concat!("cmvlab ", env!("CARGO_PKG_VERSION"));

/// Output directory: CMVLAB_OUT, then --out, then the config, then
/// `cmvlab-out`.
pub fn resolve_out_dir(
    env_out: Option<std::path::PathBuf>,
    flag_out: Option<std::path::PathBuf>,
    cfg: &ExperimentConfig,
) -> std::path::PathBuf {
    env_out
        .filter(|p| !p.as_os_str().is_empty())
        .or(flag_out)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| "cmvlab-out".into())
}
