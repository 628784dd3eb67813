//! Config resolution, staged output directories and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Name of the manifest written next to every run's artifacts.
pub const MANIFEST: &str = "run.json";

/// A command's parameters after the config file has been laid over the flags.
#[derive(Debug, Clone)]
pub struct Resolved<T> {
    pub params: T,
    pub out: PathBuf,
    pub seed: u64,
    /// Canonical JSON of `params`.
    pub config: Value,
}

fn config_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{}: {e}", path.display()))
}

/// Serialize the flag values, overwrite them key by key from `file`, and parse
/// the result back. `command`, `out` and `seed` are accepted in any config.
pub fn resolve<T>(
    command: &str,
    flags: &T,
    out: PathBuf,
    seed: u64,
    file: Option<&Path>,
) -> Result<Resolved<T>>
where
    T: Serialize + DeserializeOwned,
{
    let Value::Object(mut params) = serde_json::to_value(flags)? else {
        return Err(CliError::config("flags did not serialize to an object"));
    };
    let (mut out, mut seed) = (out, seed);
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|e| config_err(path, e))?;
        let overlay: Map<String, Value> =
            serde_json::from_str(&text).map_err(|e| config_err(path, e))?;
        for (key, value) in overlay {
            match key.as_str() {
                "command" => {
                    if value.as_str() != Some(command) {
                        return Err(config_err(
                            path,
                            format!("written for {value}, not `{command}`"),
                        ));
                    }
                }
                "out" => out = serde_json::from_value(value).map_err(|e| config_err(path, e))?,
                "seed" => seed = serde_json::from_value(value).map_err(|e| config_err(path, e))?,
                _ if params.contains_key(&key) => {
                    params.insert(key, value);
                }
                _ => {
                    return Err(config_err(
                        path,
                        format!("unknown key `{key}` for `{command}`"),
                    ))
                }
            }
        }
    }
    let params: T = serde_json::from_value(Value::Object(params))
        .map_err(|e| CliError::config(e.to_string()))?;
    let config = serde_json::to_value(&params)?;
    Ok(Resolved {
        params,
        out,
        seed,
        config,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the canonical (command, config, seed) triple.
pub fn config_hash(command: &str, config: &Value, seed: u64) -> String {
    let canonical = json!({ "command": command, "config": config, "seed": seed });
    hex(&Sha256::digest(canonical.to_string().as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Output {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub config_hash: String,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub outputs: Vec<Output>,
}

impl Manifest {
    pub fn new(command: &str, config: Value, seed: u64) -> Self {
        let versions = BTreeMap::from([
            ("twistwave", twistwave::VERSION),
            ("twistwave-cli", env!("CARGO_PKG_VERSION")),
        ]);
        Self {
            command: command.into(),
            config_hash: config_hash(command, &config, seed),
            config,
            seed,
            versions,
            outputs: Vec::new(),
        }
    }
}

/// Hidden directory inside the output directory that receives a run's files.
/// Its contents move into place on [`Staging::commit`]; dropping it uncommitted
/// deletes everything the run wrote.
#[derive(Debug)]
pub struct Staging {
    out: PathBuf,
    dir: PathBuf,
    created_out: bool,
    committed: bool,
}

impl Staging {
    pub fn new(out: &Path, command: &str) -> Result<Self> {
        let created_out = !out.exists();
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        let dir = out.join(format!(".{command}.partial"));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        }
        fs::create_dir(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            out: out.to_path_buf(),
            dir,
            created_out,
            committed: false,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash the staged files into `manifest`, move them into the output
    /// directory, and write the manifest last.
    pub fn commit(mut self, mut manifest: Manifest) -> Result<Manifest> {
        let mut names: Vec<String> = fs::read_dir(&self.dir)
            .map_err(|e| CliError::io(&self.dir, e))?
            .map(|entry| entry.map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect::<std::io::Result<_>>()
            .map_err(|e| CliError::io(&self.dir, e))?;
        names.sort();
        for name in &names {
            let path = self.dir.join(name);
            let data = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            manifest.outputs.push(Output {
                file: name.clone(),
                bytes: data.len() as u64,
                sha256: hex(&Sha256::digest(&data)),
            });
        }
        for name in &names {
            let target = self.out.join(name);
            if target.is_dir() {
                fs::remove_dir_all(&target).map_err(|e| CliError::io(&target, e))?;
            }
            fs::rename(self.dir.join(name), &target).map_err(|e| CliError::io(&target, e))?;
        }
        let path = self.out.join(MANIFEST);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        fs::remove_dir(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        self.committed = true;
        Ok(manifest)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        let _ = fs::remove_dir_all(&self.dir);
        if self.created_out {
            // only succeeds when the run left nothing else behind
            let _ = fs::remove_dir(&self.out);
        }
    }
}
