//! Options files: `key = value` lines, optionally grouped under
//! `[subcommand]` headers. Blank lines and lines starting with `#` are
//! skipped. Keys use the long flag names, with `_` accepted for `-`.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    section: Option<String>,
    key: String,
    value: String,
    line: usize,
}

fn parse(text: &str, path: &Path) -> Result<Vec<Entry>, String> {
    let mut section = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected `key = value`", path.display(), i + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("{}:{}: empty key", path.display(), i + 1));
        }
        entries.push(Entry {
            section: section.clone(),
            key,
            value: value.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(entries)
}

/// Value of `--config` and the position of the subcommand name in `argv`.
fn locate(argv: &[OsString]) -> (Option<OsString>, Option<usize>) {
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy();
        if arg == "--" {
            break;
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            config = Some(OsString::from(v));
        } else if arg == "--config" {
            config = argv.get(i + 1).cloned();
            i += 1;
        } else if arg == "--threads" {
            i += 1;
        } else if !arg.starts_with('-') {
            // The subcommand; keep scanning for a trailing --config.
            let position = i;
            let rest = locate_config_after(&argv[i + 1..]);
            return (config.or(rest), Some(position));
        }
        i += 1;
    }
    (config, None)
}

fn locate_config_after(args: &[OsString]) -> Option<OsString> {
    let mut found = None;
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if let Some(v) = s.strip_prefix("--config=") {
            found = Some(OsString::from(v));
        } else if s == "--config" {
            found = iter.next().cloned();
        }
    }
    found
}

/// Inserts options from the `--config` file right after the subcommand
/// name, so flags given on the command line override them.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let (Some(path), Some(at)) = locate(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let entries = parse(&text, path)?;

    let mut cmd = Cli::command();
    cmd.build();
    let name = argv[at].to_string_lossy().into_owned();
    let Some(sub) = cmd.find_subcommand(&name) else {
        // Let the parser report the unknown subcommand.
        return Ok(argv);
    };
    let accepts =
        |key: &str| key != "config" && sub.get_arguments().any(|a| a.get_long() == Some(key));

    let mut injected = Vec::new();
    for e in entries {
        match &e.section {
            Some(s) if cmd.find_subcommand(s).is_none() => {
                return Err(format!(
                    "{}:{}: unknown section `[{s}]`",
                    path.display(),
                    e.line
                ));
            }
            Some(s) if *s != name => continue,
            Some(_) if !accepts(&e.key) => {
                return Err(format!(
                    "{}:{}: `{name}` has no option `{}`",
                    path.display(),
                    e.line,
                    e.key
                ));
            }
            None if !accepts(&e.key) => continue,
            _ => {}
        }
        injected.push(OsString::from(format!("--{}", e.key)));
        injected.push(OsString::from(e.value));
    }

    let mut out = argv[..=at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}
