use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn leaky(args: &[&str]) -> Output {
	Command::new(env!("CARGO_BIN_EXE_leaky")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
	serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
	String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ppm_pixels(bytes: &[u8]) -> (usize, Vec<[u8; 3]>) {
	let text = String::from_utf8_lossy(&bytes[..20.min(bytes.len())]).into_owned();
	let mut parts = text.split_whitespace();
	assert_eq!(parts.next(), Some("P6"));
	let w: usize = parts.next().unwrap().parse().unwrap();
	let header = format!("P6\n{w} {w}\n255\n").len();
	let px = bytes[header..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
	(w, px)
}

#[test]
fn stabilize_large_float_source() {
	let dir = tempfile::tempdir().unwrap();
	let out = dir.path().join("run");
	let o = leaky(&["stabilize", "--n", "1e20", "--d", "2", "--out", out.to_str().unwrap()]);
	assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
	let s = json(&out.join("summary.json"));
	assert!(s["visited_count"].as_u64().unwrap() > 0);
	let leaked: f64 = s["leaked"].as_str().unwrap().parse().unwrap();
	let fin: f64 = s["final_mass"].as_str().unwrap().parse().unwrap();
	assert!(((leaked + fin) - 1e20).abs() <= 1e-9 * 1e20);
	let m = json(&out.join("manifest.json"));
	let files: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
	assert_eq!(files, ["heights.csv", "odometer.csv", "summary.json"]);
	for f in files {
		assert!(out.join(f).exists());
	}
}

#[test]
fn stabilize_small_sources() {
	let dir = tempfile::tempdir().unwrap();
	let a = dir.path().join("a");
	assert!(leaky(&["stabilize", "--n", "3", "--d", "1.25", "--out", a.to_str().unwrap()]).status.success());
	assert_eq!(json(&a.join("summary.json"))["visited_count"], 0);

	let b = dir.path().join("b");
	let o = leaky(&["stabilize", "--n", "5", "--d", "1.25", "--mode", "rational", "--render", "--out", b.to_str().unwrap()]);
	assert!(o.status.success());
	let csv = std::fs::read_to_string(b.join("heights.csv")).unwrap();
	let mut lines: Vec<&str> = csv.lines().skip(1).collect();
	lines.sort();
	assert_eq!(lines, ["-1,0,1", "0,-1,1", "0,0,0", "0,1,1", "1,0,1"]);

	let (w, px) = ppm_pixels(&std::fs::read(b.join("render.ppm")).unwrap());
	let at = |x: i64, y: i64| {
		let r = (w as i64 - 1) / 2;
		px[((r - y) * w as i64 + (x + r)) as usize]
	};
	let centre = at(0, 0);
	let ring = at(1, 0);
	assert_ne!(centre, ring);
	assert_eq!(ring, at(0, 1));
	assert_eq!(ring, at(-1, 0));
	assert_eq!(at(2, 2), [255, 255, 255]);
}

#[test]
fn rational_random_order_is_reproducible() {
	let dir = tempfile::tempdir().unwrap();
	let run = |name: &str| {
		let out = dir.path().join(name);
		let o = leaky(&[
			"stabilize", "--n", "300", "--d", "5/4", "--mode", "rational", "--order", "random", "--seed", "9", "--single",
			"--out", out.to_str().unwrap(),
		]);
		assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
		(std::fs::read(out.join("heights.csv")).unwrap(), std::fs::read(out.join("odometer.csv")).unwrap())
	};
	assert_eq!(run("one"), run("two"));
}

#[test]
fn float_overflow_suggests_rational_mode() {
	let dir = tempfile::tempdir().unwrap();
	let o = leaky(&["stabilize", "--n", "1e400", "--out", dir.path().to_str().unwrap()]);
	assert_eq!(o.status.code(), Some(2));
	assert!(String::from_utf8_lossy(&o.stderr).contains("rational mode"));
	let o = leaky(&["stabilize", "--n", "10", "--fixed-grid", "--out", dir.path().to_str().unwrap()]);
	assert!(!o.status.success());
}

#[test]
fn krw_fields_and_closed_forms() {
	let dir = tempfile::tempdir().unwrap();
	let out = dir.path().join("field");
	let o = leaky(&["krw", "--d", "2", "--tail-eps", "1e-30", "--out", out.to_str().unwrap()]);
	assert!(o.status.success());
	let meta = json(&out.join("metadata.json"));
	let total = meta["total_mass"].as_f64().unwrap();
	assert!(total <= 1.0 + 1e-15 && total >= 1.0 - 1e-15, "{total}");
	assert_eq!(meta["K"], 100);

	let o = leaky(&["krw", "--closed-form", "line", "--j", "0", "--d", "2", "--out", out.to_str().unwrap()]);
	assert!(stdout(&o).starts_with("p 0.70710678"));
	let o = leaky(&["krw", "--closed-form", "ne", "--i", "1", "--j", "1", "--d", "2", "--out", out.to_str().unwrap()]);
	assert!(stdout(&o).starts_with("p 0.0625 "));
	assert_eq!(json(&out.join("closed_form.json"))["p"], 0.0625);

	let o = leaky(&["krw", "--d", "2", "--radius", "10", "--out", out.to_str().unwrap()]);
	assert!(String::from_utf8_lossy(&o.stderr).contains("radius 10 is smaller than the step horizon K = 100"));
}

#[test]
fn shape_curves() {
	let dir = tempfile::tempdir().unwrap();
	let out = dir.path().to_str().unwrap().to_string();
	let o = leaky(&["shape", "--curve", "uniform", "--d", "2", "--samples", "65", "--out", &out]);
	assert!(o.status.success());
	let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
	assert_eq!(csv.lines().count(), 66);
	let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
	assert!((first[1] - 0.567296).abs() < 1e-6);

	let o = leaky(&["shape", "--curve", "amoeba", "--d", "2", "--out", &out]);
	assert!(o.status.success());
	let a = json(&dir.path().join("amoeba.json"));
	let top = (3.0 + 8f64.sqrt()).ln();
	assert!((a["log_w_max"].as_f64().unwrap() - top).abs() < 1e-9);
	assert!((a["log_w_min"].as_f64().unwrap() + top).abs() < 1e-9);

	let o = leaky(&["shape", "--curve", "dual", "--d", "2", "--out", &out]);
	assert!(o.status.success());
	assert!(json(&dir.path().join("dual.json"))["sup_distance"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_coupling_and_config_file() {
	let dir = tempfile::tempdir().unwrap();
	let out = dir.path().join("v");
	let conf = dir.path().join("verify.conf");
	std::fs::write(&conf, format!("suite = coupling\nout = {}\n", out.display())).unwrap();
	let o = leaky(&["verify", "--config", conf.to_str().unwrap()]);
	assert!(o.status.success(), "{}", stdout(&o));
	assert_eq!(json(&out.join("verify.json"))["pass"], true);
	let m = json(&out.join("manifest.json"));
	assert_eq!(m["flags"]["suite"], "coupling");
	assert!(m["files"].as_array().unwrap().iter().any(|f| f == "coupling.json"));

	// the command line wins over the file
	let o = leaky(&["verify", "--config", conf.to_str().unwrap(), "--suite", "operators", "--d", "2"]);
	assert!(o.status.success());
	assert_eq!(json(&out.join("manifest.json"))["flags"]["suite"], "operators");
}

#[test]
fn verify_failure_sets_exit_code() {
	let dir = tempfile::tempdir().unwrap();
	// the deviation settles near 2.6 lattice units, well above this
	let o = leaky(&[
		"verify", "--suite", "shape", "--n", "1e10,1e20", "--tol", "shape_deviation=0.5", "--out",
		dir.path().to_str().unwrap(),
	]);
	assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
	assert!(stdout(&o).starts_with("FAIL"));
	assert_eq!(json(&dir.path().join("verify.json"))["pass"], false);
	let o = leaky(&["verify", "--suite", "all", "--n", "5", "--out", dir.path().to_str().unwrap()]);
	assert_eq!(o.status.code(), Some(2));
	let o = leaky(&["verify", "--suite", "coupling", "--tol", "nonsense=1", "--out", dir.path().to_str().unwrap()]);
	assert!(String::from_utf8_lossy(&o.stderr).contains("unknown tolerance nonsense"));
}

#[test]
fn render_is_deterministic() {
	let dir = tempfile::tempdir().unwrap();
	let heights = dir.path().join("zero.csv");
	let mut csv = String::from("x,y,height\n");
	for y in -1..=1 {
		for x in -1..=1 {
			csv.push_str(&format!("{x},{y},0\n"));
		}
	}
	std::fs::write(&heights, csv).unwrap();
	let render = |name: &str| {
		let o = leaky(&[
			"render", "--heights", heights.to_str().unwrap(), "--threshold", "5", "--name", name, "--out",
			dir.path().to_str().unwrap(),
		]);
		assert!(o.status.success());
		std::fs::read(dir.path().join(name)).unwrap()
	};
	let a = render("a.ppm");
	assert_eq!(a, render("b.ppm"));
	let (w, px) = ppm_pixels(&a);
	assert_eq!(w, 3);
	assert!(px.iter().all(|p| *p == [255, 255, 255]));
}
