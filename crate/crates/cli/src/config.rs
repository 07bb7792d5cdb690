//! Parameter resolution: command-line flags override `key = value` entries
//! from a config file, which override built-in defaults. Every resolved
//! value is recorded so runs can be logged and hashed.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Parses a config file of `key = value` lines. Blank lines and lines
/// starting with `#` are ignored; keys use the long flag names.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub struct Resolver {
    command: String,
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(command: &str, file: BTreeMap<String, String>) -> Self {
        Self { command: command.to_string(), file, resolved: BTreeMap::new() }
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: cannot parse {raw:?}: {e}"))),
        }
    }

    fn record<T: Display>(&mut self, key: &str, value: &T) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Flag, else config entry, else `default`.
    pub fn get<T: FromStr + Display + Clone>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.record(key, &value);
        Ok(value)
    }

    /// Like [`Resolver::get`] but left out of the logged configuration and
    /// the hash, for values such as output locations that do not affect
    /// results.
    pub fn get_unrecorded<T: FromStr + Display + Clone>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.file_value(key)?.unwrap_or(default)),
        }
    }

    /// Flag, else config entry, else absent.
    pub fn get_opt<T: FromStr + Display + Clone>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        if let Some(v) = &value {
            self.record(key, v);
        }
        Ok(value)
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<String>,
        default: &str,
    ) -> Result<Vec<T>, CliError>
    where
        T::Err: Display,
    {
        let raw = self.get(key, flag, default.to_string())?;
        parse_list(key, &raw)
    }

    /// Boolean switch: set when the flag is present, else from config.
    pub fn get_switch(&mut self, key: &str, flag: bool, default: bool) -> Result<bool, CliError> {
        let value = if flag { true } else { self.file_value(key)?.unwrap_or(default) };
        self.record(key, &value);
        Ok(value)
    }

    /// `key=value` pairs of every resolved parameter in key order.
    pub fn summary(&self) -> String {
        self.resolved.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    /// First 16 hex digits of the SHA-256 of the command name and the
    /// resolved parameters.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        for (k, v) in &self.resolved {
            h.update(b"\n");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Single metadata line embedded at the top of every output CSV.
    pub fn header(&self) -> String {
        format!("# pickands {} config_hash={} {}", self.command, self.hash(), self.summary())
    }
}

pub fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError>
where
    T::Err: Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Usage(format!("{key}: cannot parse {s:?}: {e}"))))
        .collect()
}
