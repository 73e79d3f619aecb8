//! `key = value` configuration files. Values feed any flag that was not
//! given on the command line; flags always win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every key any subcommand understands. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
const KNOWN_KEYS: &[&str] = &[
    "embedding",
    "sim-lo",
    "sim-hi",
    "neighbor-threshold",
    "neighbor-cap",
    "frequency-cutoff",
    "depth",
    "pool",
    "top",
    "rank",
    "ks",
    "steps",
    "cluster-pick",
    "cluster-divisor",
    "seed",
    "timeout-ms",
    "max-atoms",
    "max-branch-depth",
    "jobs",
    "format",
    "mode",
    "exclude-query",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::io(format!(
                    "config {} line {}: expected 'key = value'",
                    path.display(),
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::io(format!(
                    "config {} line {}: unknown key '{key}'",
                    path.display(),
                    idx + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Flag value if given, else the parsed config value, else the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| CliError::io(format!("config key '{key}': cannot parse '{raw}'"))),
            None => Ok(default),
        }
    }

    /// Like [`resolve`](Self::resolve) but without a default.
    pub fn resolve_required<T: FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        what: &str,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| CliError::io(format!("config key '{key}': cannot parse '{raw}'"))),
            None => Err(CliError::io(format!(
                "missing {what}: pass --{key} or set '{key}' in the config file"
            ))),
        }
    }
}
