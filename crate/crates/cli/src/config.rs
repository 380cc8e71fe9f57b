//! Flat `key = value` configuration files and the resolved-configuration
//! record written next to every run's outputs.
//!
//! A config file holds one setting per line; keys are long flag names with
//! or without the leading `--`. `#` starts a comment. Boolean flags take
//! `true` or `false`. Settings are spliced into the argument list ahead of
//! the command-line flags, so explicit flags take precedence.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// Keys that describe a run but are not flags.
const INFORMATIONAL_KEYS: &[&str] = &["command", "version"];

/// Parses config text into flag arguments.
pub fn parse(text: &str, path: &Path) -> Result<Vec<OsString>> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                message: "empty key".into(),
            });
        }
        if INFORMATIONAL_KEYS.contains(&key) {
            continue;
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Removes `--config <path>` / `--config=<path>` from `argv` and splices
/// the file's settings in right after the subcommand name.
pub fn expand(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut found: Option<(usize, usize, PathBuf)> = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let path = argv
                .get(i + 1)
                .ok_or_else(|| CliError::Usage("--config needs a file path".into()))?;
            found = Some((i, 2, PathBuf::from(path)));
            break;
        }
        if let Some(p) = s.strip_prefix("--config=") {
            found = Some((i, 1, PathBuf::from(p)));
            break;
        }
    }
    let Some((at, len, path)) = found else {
        return Ok(argv);
    };
    argv.drain(at..at + len);
    let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let extra = parse(&text, &path)?;
    let insert_at = argv.len().min(2);
    argv.splice(insert_at..insert_at, extra);
    Ok(argv)
}

/// Ordered record of a run's fully resolved settings.
#[derive(Debug, Default)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut c = Self::default();
        c.set("command", command);
        c.set("version", env!("CARGO_PKG_VERSION"));
        c
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("run_config.txt");
        fs::write(&path, self.render()).map_err(CliError::io(path))
    }
}
