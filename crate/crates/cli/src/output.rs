use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

fn output_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| output_err(parent, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| output_err(parent, e))?;
    tmp.write_all(contents).map_err(|e| output_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| output_err(path, e))?;
    tmp.persist(path).map_err(|e| output_err(path, e.error))?;
    Ok(())
}

/// Writes to `path` atomically, or to standard output when absent.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(format!("stdout: {e}")))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputHash {
    pub path: PathBuf,
    pub sha256: String,
}

/// SHA-256 of a file, or for a directory of every file below it, visited in
/// sorted path order with each relative path mixed into the digest.
pub fn hash_input(path: &Path) -> Result<InputHash, CliError> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, &mut files).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        files.sort();
        for f in files {
            let rel = f.strip_prefix(path).unwrap_or(&f);
            hasher.update(rel.to_string_lossy().as_bytes());
            hasher.update([0]);
            hasher.update(fs::read(&f).map_err(|e| CliError::Validation(format!("{}: {e}", f.display())))?);
        }
    } else {
        hasher.update(fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?);
    }
    Ok(InputHash {
        path: path.to_path_buf(),
        sha256: hasher.finalize().iter().map(|b| format!("{b:02x}")).collect(),
    })
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else if path.file_name().is_some_and(|n| n != RUN_MANIFEST) {
            out.push(path);
        }
    }
    Ok(())
}

/// Name of the run manifest written inside a model directory.
pub const RUN_MANIFEST: &str = "run.json";

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<PathBuf>,
}

impl<'a> Manifest<'a> {
    pub fn new(config: &'a RunConfig, inputs: Vec<InputHash>, outputs: Vec<PathBuf>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs,
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// Sidecar manifest path for an output file: `<output>.manifest.json`.
pub fn sidecar(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}
