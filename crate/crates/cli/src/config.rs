use std::path::Path;

use anyhow::{bail, Context, Result};

/// Flags read from a `key = value` file, one per line. `#` starts a comment.
/// A value of `true` becomes a bare switch, `false` drops the key.
pub fn read_config(path: &Path) -> Result<Vec<String>> {
	let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
	parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Vec<String>> {
	let mut args = Vec::new();
	for (k, raw) in text.lines().enumerate() {
		let line = raw.split('#').next().unwrap_or("").trim();
		if line.is_empty() {
			continue;
		}
		let Some((key, value)) = line.split_once('=') else {
			bail!("config line {}: expected key = value, got {raw:?}", k + 1);
		};
		let key = key.trim().replace('_', "-");
		let value = value.trim();
		if key.is_empty() || key == "config" {
			bail!("config line {}: bad key {key:?}", k + 1);
		}
		match value {
			"true" => args.push(format!("--{key}")),
			"false" => {}
			v => args.push(format!("--{key}={v}")),
		}
	}
	Ok(args)
}

/// Splices the config flags in right after the subcommand so that flags
/// given on the command line, which come later, override them.
pub fn expand_args(argv: Vec<String>) -> Result<Vec<String>> {
	let mut out = Vec::with_capacity(argv.len());
	let mut config = None;
	let mut it = argv.into_iter();
	while let Some(a) = it.next() {
		if a == "--config" {
			config = Some(it.next().context("--config needs a path")?);
		} else if let Some(p) = a.strip_prefix("--config=") {
			config = Some(p.to_string());
		} else {
			out.push(a);
		}
	}
	let Some(path) = config else {
		return Ok(out);
	};
	let extra = read_config(Path::new(&path))?;
	// argv[0], then the subcommand
	let at = out.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 2).unwrap_or(out.len());
	let tail = out.split_off(at.min(out.len()));
	out.extend(extra);
	out.extend(tail);
	Ok(out)
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn lines_become_flags() {
		let a = parse_config("n = 1e20\n# comment\nd=2 # trailing\nrender = true\nfixed_grid = false\n").unwrap();
		assert_eq!(a, ["--n=1e20", "--d=2", "--render"]);
		assert!(parse_config("just words").is_err());
	}

	#[test]
	fn config_goes_before_command_line_flags() {
		let dir = tempfile::tempdir().unwrap();
		let p = dir.path().join("run.conf");
		std::fs::write(&p, "d = 3\n").unwrap();
		let argv = ["leaky", "stabilize", "--config", p.to_str().unwrap(), "--d", "2"].map(String::from).to_vec();
		assert_eq!(expand_args(argv).unwrap(), ["leaky", "stabilize", "--d=3", "--d", "2"]);
	}
}
