//! `key=value` configuration files and the thread-count variable.

use std::path::Path;

use crate::error::{CliError, CliResult};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "XXZPIN_THREADS";

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value, got '{raw}'", no + 1))
        })?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", no + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Splices the entries of a `--config FILE` given after the subcommand into
/// the argument list, ahead of the explicit flags so that those win.
/// Boolean entries take `true`/`false`.
pub fn expand_config_args(args: Vec<String>) -> CliResult<Vec<String>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            path = Some(p);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let mut injected = Vec::new();
    for (k, v) in load_config(Path::new(&path))? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    // Program name and subcommand come first.
    let cut = rest.len().min(2);
    let mut out: Vec<String> = rest[..cut].to_vec();
    out.extend(injected);
    out.extend_from_slice(&rest[cut..]);
    Ok(out)
}

/// Sizes the global rayon pool from [`THREADS_ENV`]; unset means the
/// available parallelism.
pub fn init_threads() -> CliResult<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?,
        Err(_) => return Ok(()),
    };
    // A second initialization (e.g. in tests) keeps the existing pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
