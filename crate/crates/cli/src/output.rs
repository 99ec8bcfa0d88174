//! Output-directory plumbing: resolution, manifests, and file writing.

use crate::CliFailure;
use std::path::{Path, PathBuf};

/// Environment variable consulted when `--out` is absent.
pub const OUT_DIR_ENV: &str = "WEYLMAX_OUT";

/// Resolves the output directory (flag wins over environment) and
/// creates it.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> Result<PathBuf, CliFailure> {
    let dir = flag
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            CliFailure::Usage(format!(
                "no output directory: pass --out <dir> or set {OUT_DIR_ENV}"
            ))
        })?;
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Manifest describing one run: full command line, structured config,
/// artifact version, and creation time. The timestamp lives only here,
/// so every other output file is byte-identical across reruns.
pub fn manifest(command: &str, config: serde_json::Value) -> serde_json::Value {
    let argv: Vec<String> = std::env::args().collect();
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    serde_json::json!({
        "command": command,
        "argv": argv,
        "config": config,
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "created_unix_seconds": created,
    })
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliFailure> {
    std::fs::write(path, content)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliFailure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
