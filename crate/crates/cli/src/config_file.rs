//! Config files.
//!
//! A config file is UTF-8 text with one `key = value` pair per line. Keys
//! are flag names without the leading dashes (`max-events` and
//! `max_events` are the same key); `#` starts a comment; blank lines are
//! ignored. A run manifest (`manifest.json`) is also accepted: its
//! `config` object is read as the key/value pairs.
//!
//! The pairs are turned into `--key=value` arguments placed before the
//! command-line flags, so flags given on the command line win.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn parse(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{raw}`", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

fn json_scalar(v: &serde_json::Value) -> CliResult<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        serde_json::Value::Array(items) => Ok(items.iter().map(json_scalar).collect::<CliResult<Vec<_>>>()?.join(",")),
        other => Err(CliError::Config(format!("unsupported config value {other}"))),
    }
}

fn parse_manifest(text: &str) -> CliResult<Vec<(String, String)>> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("manifest: {e}")))?;
    let config = v.get("config").unwrap_or(&v);
    let obj = config
        .as_object()
        .ok_or_else(|| CliError::Config("manifest `config` is not an object".into()))?;
    obj.iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| Ok((k.replace('_', "-"), json_scalar(v)?)))
        .collect()
}

pub fn load(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        parse_manifest(&text)
    } else {
        parse(&text)
    }
}

/// Finds the value of `--config` in raw arguments.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Inserts the config file's pairs right after the subcommand name.
pub fn expand(args: Vec<OsString>, subcommands: &[&str]) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let pairs = load(Path::new(&path))?;
    let Some(at) = args.iter().position(|a| subcommands.iter().any(|s| a == s)) else {
        return Ok(args);
    };
    let mut out = args[..=at].to_vec();
    out.extend(pairs.into_iter().map(|(k, v)| OsString::from(format!("--{k}={v}"))));
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_comments_and_underscores() {
        let p = parse("# protocol\nmax_events = 100 # K\n\nlambda=0.5\n").unwrap();
        assert_eq!(p, vec![("max-events".into(), "100".into()), ("lambda".into(), "0.5".into())]);
        assert!(parse("lambda 0.5").is_err());
        assert!(parse(" = 3").is_err());
    }

    #[test]
    fn manifest_config_is_flattened() {
        let p = parse_manifest(r#"{"config": {"gamma": "inf", "lambdas": [0.5, 1.0], "mode": "standard", "x": null}}"#).unwrap();
        assert!(p.contains(&("gamma".into(), "inf".into())));
        assert!(p.contains(&("lambdas".into(), "0.5,1.0".into())));
        assert_eq!(p.len(), 3);
    }
}
