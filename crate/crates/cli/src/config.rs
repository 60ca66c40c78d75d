//! `--config` files: flat `key = value` lines merged under the environment
//! and the command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;

use crate::args::Cli;

pub const ENV_PREFIX: &str = "DIRACSHELL_";

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let key = k.trim().replace('_', "-").to_ascii_lowercase();
        if key.is_empty() {
            bail!("config line {}: empty key", n + 1);
        }
        out.insert(key, v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.replace('-', "_").to_ascii_uppercase())
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    std::env::var_os(format!("{ENV_PREFIX}CONFIG"))
}

/// Subcommand path named on the command line, e.g. `["oracle", "sphere"]`.
fn subcommand_path(args: &[OsString]) -> Vec<String> {
    let root = Cli::command();
    let mut path = Vec::new();
    let mut cmd = &root;
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" || s == "--out" {
            it.next();
            continue;
        }
        if s.starts_with('-') {
            continue;
        }
        match cmd.find_subcommand(s.as_ref()) {
            Some(sub) => {
                path.push(s.to_string());
                cmd = sub;
            }
            None => break,
        }
    }
    path
}

fn accepted_longs(path: &[String]) -> Vec<(String, bool)> {
    let root = Cli::command();
    let mut cmd = &root;
    for p in path {
        match cmd.find_subcommand(p) {
            Some(sub) => cmd = sub,
            None => return Vec::new(),
        }
    }
    let mut out: Vec<(String, bool)> = root
        .get_arguments()
        .chain(cmd.get_arguments())
        .filter_map(|a| {
            let flag = matches!(a.get_action(), clap::ArgAction::SetTrue);
            a.get_long().map(|l| (l.to_string(), flag))
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn given_on_command_line(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

/// Returns `args` with config-file values appended for options that are set
/// neither on the command line nor in the environment. Keys the selected
/// command does not accept are ignored with a warning.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let values = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    let sub = subcommand_path(&args);
    let accepted = accepted_longs(&sub);
    let mut out = args.clone();
    for (key, value) in values {
        let Some(&(_, is_flag)) = accepted.iter().find(|(l, _)| *l == key) else {
            log::warn!("config key `{key}` is not used by this command");
            continue;
        };
        if key == "config" || given_on_command_line(&args, &key) || std::env::var_os(env_name(&key)).is_some() {
            continue;
        }
        if is_flag {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                other => bail!("config key `{key}` expects true/false, got `{other}`"),
            }
        } else {
            out.push(format!("--{key}={value}").into());
        }
    }
    Ok(out)
}
