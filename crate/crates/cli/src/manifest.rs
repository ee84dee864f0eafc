use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Timing {
	pub step: String,
	pub seconds: f64,
}

/// Record of one invocation; lists every file written.
#[derive(Debug, Serialize)]
pub struct RunManifest {
	pub subcommand: String,
	pub flags: serde_json::Value,
	pub out_dir: PathBuf,
	pub version: String,
	pub timings: Vec<Timing>,
	pub files: Vec<String>,
	#[serde(skip)]
	started: Option<Instant>,
}

impl RunManifest {
	pub fn new(subcommand: &str, flags: serde_json::Value, out_dir: &Path) -> Result<Self> {
		std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
		Ok(RunManifest {
			subcommand: subcommand.into(),
			flags,
			out_dir: out_dir.to_path_buf(),
			version: env!("CARGO_PKG_VERSION").into(),
			timings: Vec::new(),
			files: Vec::new(),
			started: Some(Instant::now()),
		})
	}

	pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
		let path = self.out_dir.join(name);
		std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
		self.files.push(name.into());
		Ok(path)
	}

	pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
		let mut text = serde_json::to_string_pretty(value)?;
		text.push('\n');
		self.write(name, text.as_bytes())
	}

	/// Runs `f` and records its wall-clock time.
	pub fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
		let t = Instant::now();
		let out = f();
		self.timings.push(Timing { step: step.into(), seconds: t.elapsed().as_secs_f64() });
		out
	}

	/// Writes `manifest.json`; nothing may be written after this.
	pub fn finish(mut self) -> Result<PathBuf> {
		if let Some(t) = self.started.take() {
			self.timings.push(Timing { step: "total".into(), seconds: t.elapsed().as_secs_f64() });
		}
		let path = self.out_dir.join("manifest.json");
		let mut text = serde_json::to_string_pretty(&self)?;
		text.push('\n');
		std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
		Ok(path)
	}
}
