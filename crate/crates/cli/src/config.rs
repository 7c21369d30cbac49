//! Flat `key = value` config files whose keys are the long flag names.

use std::fs;

/// Reads the file named by `--config` (if any) and splices its entries into
/// the argument list right after the subcommand, so flags given on the
/// command line override the file. `true`/`false` values turn into a bare
/// flag or nothing.
pub fn splice_config(argv: &[String]) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        if a == "--config" {
            path = Some(
                argv.get(i + 1)
                    .ok_or("--config needs a file path")?
                    .clone(),
            );
            i += 1;
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(argv.to_vec());
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let extra = parse_config(&text).map_err(|e| format!("{path}: {e}"))?;
    // argv[0] is the program, argv[1] the subcommand
    let at = argv.len().min(2);
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.starts_with('-') {
            return Err(format!("line {}: bad key `{k}`", n + 1));
        }
        if k == "config" || k == "out" {
            return Err(format!("line {}: `{k}` cannot be set from a config file", n + 1));
        }
        match v {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}
