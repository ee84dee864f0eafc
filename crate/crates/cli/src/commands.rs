use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use leaky_asm::engine::{start_radius, RunSummary};
use leaky_asm::io::{
	render_ppm, write_curve_csv, write_field_csv, write_heights_csv, write_odometer_csv, write_points_csv, Palette,
};
use leaky_asm::krw::{contour_field, death_prob_contour_auto, death_prob_dp, line_log_prob, ne_log_prob, steps_for_tail};
use leaky_asm::krw::ContourRadius;
use leaky_asm::scalar::fmt_sig;
use leaky_asm::shape::{
	a_grid, amoeba_gas_boundary, branch_points, dual_check, limit_curve, ne_curve, radial_band, CurveScale,
};
use leaky_asm::verify::{Experiment, ExperimentConfig, Table, Tolerances, VerificationReport};
use leaky_asm::{
	parse_rational, point_source, stabilize_with, FireOrder, Grid, GridPolicy, Rational, Scalar, StabilizeOptions,
	ToppleRule,
};

use crate::manifest::RunManifest;
use crate::{ClosedForm, CurveKind, FieldMethodArg, KrwArgs, Mode, Order, RenderArgs, ShapeArgs, StabilizeArgs, VerifyArgs};

fn parse_weights<S: Scalar>(text: &str) -> Result<[S; 4]> {
	let parts: Vec<&str> = text.split(',').map(str::trim).collect();
	if parts.len() != 4 {
		bail!("--weights needs four comma-separated values (up,right,down,left), got {text:?}");
	}
	let mut w = Vec::with_capacity(4);
	for p in parts {
		w.push(S::parse(p)?);
	}
	Ok([w[0].clone(), w[1].clone(), w[2].clone(), w[3].clone()])
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
	text.split(',').map(|s| s.trim().parse::<f64>().with_context(|| format!("not a number: {s:?}"))).collect()
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> leaky_asm::Result<()>) -> Result<Vec<u8>> {
	let mut buf = Vec::new();
	f(&mut buf)?;
	Ok(buf)
}

fn table_csv(t: &Table) -> Vec<u8> {
	let mut s = t.columns.join(",");
	s.push('\n');
	for row in &t.rows {
		s.push_str(&row.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(","));
		s.push('\n');
	}
	s.into_bytes()
}

#[derive(Serialize)]
struct StabilizeSummary {
	#[serde(flatten)]
	run: RunSummary,
	mode: Mode,
	initial_mass: String,
	final_mass: String,
	mass_defect: String,
	total_topples: String,
	boundary_touched: bool,
}

pub fn stabilize(a: &StabilizeArgs) -> Result<bool> {
	if a.fixed_grid && a.grid_radius.is_none() {
		bail!("--fixed-grid needs --grid-radius");
	}
	if a.order == Order::Fifo && a.seed != 0 {
		bail!("--seed only applies to --order random");
	}
	let mut m = RunManifest::new("stabilize", serde_json::to_value(a)?, &a.out)?;
	match a.mode {
		Mode::Float => run_stabilize::<f64>(a, &mut m)?,
		Mode::Rational => run_stabilize::<Rational>(a, &mut m)?,
	}
	m.finish()?;
	Ok(true)
}

fn run_stabilize<S: Scalar>(a: &StabilizeArgs, m: &mut RunManifest) -> Result<()> {
	let n = S::parse(&a.n)?;
	let rule = ToppleRule::from_weights(parse_weights::<S>(&a.weights)?, S::parse(&a.d)?)?;
	let radius = a.grid_radius.unwrap_or_else(|| start_radius(n.to_f64(), rule.d.to_f64()));
	let opts = StabilizeOptions {
		order: match a.order {
			Order::Fifo => FireOrder::Fifo,
			Order::Random => FireOrder::Random(a.seed),
		},
		grid: if a.fixed_grid { GridPolicy::Fixed } else { GridPolicy::Auto },
		batch: !a.single,
		..StabilizeOptions::default()
	};
	let field = point_source(n.clone(), radius)?;
	let res = m.time("stabilize", || stabilize_with(field, &rule, &opts))?;

	m.write("heights.csv", &csv_bytes(|b| write_heights_csv(&res, b))?)?;
	m.write("odometer.csv", &csv_bytes(|b| write_odometer_csv(&res, b))?)?;
	let summary = StabilizeSummary {
		run: RunSummary::new(&n, &rule, &res),
		mode: a.mode,
		initial_mass: res.initial_mass.to_text(),
		final_mass: res.final_mass().to_text(),
		mass_defect: res.mass_defect().to_text(),
		total_topples: res.total_topples.to_text(),
		boundary_touched: res.boundary_touched,
	};
	m.write_json("summary.json", &summary)?;
	if a.render {
		let heights = res.final_field.map(|h| h.to_f64());
		let img = render_ppm(&heights, Some(&res.visited), rule.threshold().to_f64(), &Palette::default())?;
		m.write("render.ppm", &img)?;
	}
	println!("visited {}  radius {}  m_n {}", summary.run.visited_count, summary.run.radius, summary.run.m_n);
	println!("leaked {}  final {}  defect {}", summary.run.leaked, summary.final_mass, summary.mass_defect);
	Ok(())
}

#[derive(Serialize)]
struct ClosedValue {
	form: ClosedForm,
	d: f64,
	i: Option<i64>,
	j: Option<i64>,
	log_p: f64,
	p: f64,
}

pub fn krw(a: &KrwArgs) -> Result<bool> {
	let mut m = RunManifest::new("krw", serde_json::to_value(a)?, &a.out)?;
	if let Some(form) = a.closed_form {
		let need = |v: Option<i64>, name: &str| v.with_context(|| format!("--closed-form {form:?} needs --{name}"));
		let log_p = match form {
			ClosedForm::Ne => ne_log_prob(need(a.i, "i")?, need(a.j, "j")?, a.d),
			ClosedForm::Line => line_log_prob(need(a.j, "j")?, a.d),
			ClosedForm::Contour => {
				let (i, j) = (need(a.i, "i")?.unsigned_abs(), need(a.j, "j")?.unsigned_abs());
				let (r, s) = (i.max(j), i.min(j));
				let alpha = if r == 0 { 0.0 } else { s as f64 / r as f64 };
				death_prob_contour_auto(r, alpha, a.d, ContourRadius::Saddle)?.log_p
			}
		};
		let v = ClosedValue { form, d: a.d, i: a.i, j: a.j, log_p, p: log_p.exp() };
		println!("p {}  log_p {}", fmt_sig(v.p), fmt_sig(v.log_p));
		m.write_json("closed_form.json", &v)?;
		m.finish()?;
		return Ok(true);
	}

	let rule = ToppleRule::from_weights(parse_weights::<f64>(&a.weights)?, a.d)?;
	let k = steps_for_tail(a.d, a.tail_eps)?;
	let radius = a.radius.unwrap_or(k);
	let field = m.time("field", || match a.method {
		FieldMethodArg::Dp => death_prob_dp(&rule, radius, a.tail_eps),
		FieldMethodArg::Contour => {
			if !rule.is_uniform() {
				return Err(leaky_asm::Error::InvalidArgument("contour fields need uniform weights".into()));
			}
			contour_field(a.d, radius)
		}
	})?;
	m.write("field.csv", &csv_bytes(|b| write_field_csv(&field, b))?)?;
	#[derive(Serialize)]
	struct Meta {
		#[serde(flatten)]
		meta: leaky_asm::krw::FieldMetadata,
		total_mass: f64,
	}
	let meta = Meta { meta: field.metadata(), total_mass: field.total_mass() };
	println!("K {}  tail {}  total {}", meta.meta.k, fmt_sig(meta.meta.tail_bound), fmt_sig(meta.total_mass));
	m.write_json("metadata.json", &meta)?;
	m.finish()?;
	Ok(true)
}

pub fn shape(a: &ShapeArgs) -> Result<bool> {
	let mut m = RunManifest::new("shape", serde_json::to_value(a)?, &a.out)?;
	let mut pass = true;
	match a.curve {
		CurveKind::Uniform | CurveKind::Ne => {
			let curve = if a.curve == CurveKind::Uniform { limit_curve(a.d, a.samples)? } else { ne_curve(a.d, a.samples)? };
			m.write("curve.csv", &csv_bytes(|b| write_curve_csv(&curve, b))?)?;
			m.write("closed.csv", &csv_bytes(|b| write_points_csv(&curve.closed, b))?)?;
			println!("x(a=0) {}", fmt_sig(curve.octant[0].x));
			if let Some(n) = a.n {
				let scale = CurveScale::parse(&a.scale)?.factor(n.ln());
				let scaled: Vec<(f64, f64)> = curve.closed.iter().map(|(x, y)| (x * scale, y * scale)).collect();
				m.write("scaled_closed.csv", &csv_bytes(|b| write_points_csv(&scaled, b))?)?;
				if a.curve == CurveKind::Uniform {
					let band = radial_band(n, a.d, &a_grid(a.samples))?;
					let t = Table {
						name: "band".into(),
						columns: ["a", "r_inner", "r_outer", "s_cr", "constant"].map(String::from).to_vec(),
						rows: band.entries.iter().map(|e| vec![e.a, e.r_inner, e.r_outer, e.s_cr, e.constant]).collect(),
					};
					m.write("band.csv", &table_csv(&t))?;
				}
			}
		}
		CurveKind::Amoeba => {
			let pts = amoeba_gas_boundary(a.d, a.samples)?;
			m.write("amoeba.csv", &csv_bytes(|b| write_points_csv(&pts, b))?)?;
			let b = branch_points(a.d)?;
			let ys = pts.iter().map(|p| p.1);
			let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
			println!("log w from {} to {}", fmt_sig(lo), fmt_sig(hi));
			m.write_json("amoeba.json", &serde_json::json!({ "d": a.d, "branch_points": b, "log_w_min": lo, "log_w_max": hi }))?;
		}
		CurveKind::Dual => {
			let rep = dual_check(a.d, &a_grid(a.samples))?;
			let t = Table {
				name: "dual".into(),
				columns: ["a", "x_numeric", "y_numeric", "x_exact", "y_exact", "distance"].map(String::from).to_vec(),
				rows: rep
					.entries
					.iter()
					.map(|e| vec![e.a, e.dual_numeric.0, e.dual_numeric.1, e.dual_exact.0, e.dual_exact.1, e.distance])
					.collect(),
			};
			m.write("dual.csv", &table_csv(&t))?;
			m.write_json("dual.json", &rep)?;
			println!("sup distance {}  dS/da error {}", fmt_sig(rep.sup_distance), fmt_sig(rep.max_s_a_rel_error));
			pass = rep.sup_distance < 1e-6 && rep.max_s_a_rel_error < 1e-6;
		}
	}
	m.finish()?;
	Ok(pass)
}

fn override_tolerances(base: &Tolerances, text: &str) -> Result<Tolerances> {
	let mut v = serde_json::to_value(base)?;
	for item in text.split(',') {
		let (k, val) = item.split_once('=').with_context(|| format!("--tol expects key=value, got {item:?}"))?;
		let (k, val) = (k.trim().replace('-', "_"), val.trim());
		let slot = v.get_mut(&k).with_context(|| format!("unknown tolerance {k}"))?;
		*slot = serde_json::json!(val.parse::<f64>().with_context(|| format!("not a number: {val:?}"))?);
	}
	Ok(serde_json::from_value(v)?)
}

fn configure(experiment: Experiment, a: &VerifyArgs) -> Result<ExperimentConfig> {
	let mut c = ExperimentConfig::preset(experiment);
	if let Some(n) = &a.n {
		c.n = parse_list(n)?;
	}
	if let Some(d) = &a.d {
		c.d = parse_list(d)?;
	}
	if let Some(t) = &a.t {
		c.t = parse_list(t)?;
	}
	if let Some(w) = &a.weights {
		c.weights = w.split(';').map(parse_weights::<f64>).collect::<Result<_>>()?;
	}
	if let Some(r) = a.radius {
		c.radius = r;
	}
	if let Some(s) = a.seed {
		c.seed = s;
	}
	if let Some(t) = &a.tol {
		c.tolerances = override_tolerances(&c.tolerances, t)?;
	}
	c.validate()?;
	Ok(c)
}

pub fn verify(a: &VerifyArgs) -> Result<bool> {
	let suites: Vec<Experiment> = if a.suite == "all" { Experiment::ALL.to_vec() } else { vec![Experiment::parse(&a.suite)?] };
	let overridden = a.n.is_some() || a.d.is_some() || a.t.is_some() || a.weights.is_some() || a.radius.is_some();
	if suites.len() > 1 && overridden {
		bail!("--n, --d, --t, --weights and --radius need a single --suite");
	}
	let mut m = RunManifest::new("verify", serde_json::to_value(a)?, &a.out)?;
	let mut work = Vec::new();
	for &e in &suites {
		let c = configure(e, a)?;
		for job in c.jobs()? {
			work.push((e, job, c.tolerances, c.seed));
		}
	}
	// independent single-threaded jobs; collect keeps their order
	let reports: Vec<(Experiment, VerificationReport)> = m.time("verify", || {
		work.par_iter().map(|(e, job, tol, seed)| job.run(tol, *seed).map(|r| (*e, r))).collect::<leaky_asm::Result<_>>()
	})?;

	let mut all_pass = true;
	let mut summary = Vec::new();
	for &e in &suites {
		let mine: Vec<&VerificationReport> = reports.iter().filter(|(s, _)| *s == e).map(|(_, r)| r).collect();
		let pass = mine.iter().all(|r| r.pass);
		all_pass &= pass;
		for (k, r) in mine.iter().enumerate() {
			println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
			for c in r.failures() {
				println!("    {}: {} (bound {})", c.name, fmt_sig(c.measured), fmt_sig(c.bound));
			}
			for t in &r.tables {
				m.write(&format!("{}_{k}_{}.csv", e.name(), t.name), &table_csv(t))?;
			}
		}
		m.write_json(&format!("{}.json", e.name()), &mine)?;
		summary.push(serde_json::json!({
			"suite": e.name(),
			"pass": pass,
			"failures": mine.iter().flat_map(|r| r.failures().map(move |c| format!("{}: {}", r.name, c.name))).collect::<Vec<_>>(),
		}));
	}
	m.write_json("verify.json", &serde_json::json!({ "pass": all_pass, "suites": summary }))?;
	m.finish()?;
	Ok(all_pass)
}

fn read_csv_rows(path: &Path, want: &[&str]) -> Result<Vec<Vec<String>>> {
	let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
	let mut lines = text.lines();
	let header: Vec<&str> = lines.next().context("empty CSV")?.split(',').collect();
	let idx: Vec<usize> = want
		.iter()
		.map(|w| header.iter().position(|h| h == w).with_context(|| format!("{} has no {w} column", path.display())))
		.collect::<Result<_>>()?;
	Ok(lines
		.filter(|l| !l.is_empty())
		.map(|l| {
			let cells: Vec<&str> = l.split(',').collect();
			idx.iter().map(|&i| cells.get(i).copied().unwrap_or("").to_string()).collect()
		})
		.collect())
}

fn parse_site(x: &str, y: &str) -> Result<(i64, i64)> {
	Ok((x.parse().with_context(|| format!("bad x {x:?}"))?, y.parse().with_context(|| format!("bad y {y:?}"))?))
}

pub fn render(a: &RenderArgs) -> Result<bool> {
	let rows = read_csv_rows(&a.heights, &["x", "y", "height"])?;
	let visited_rows = match &a.odometer {
		Some(p) => read_csv_rows(p, &["x", "y"])?,
		None => Vec::new(),
	};
	let mut sites = Vec::with_capacity(rows.len());
	for r in &rows {
		sites.push((parse_site(&r[0], &r[1])?, parse_rational(&r[2])?.to_f64()));
	}
	let mut visited_sites = Vec::with_capacity(visited_rows.len());
	for r in &visited_rows {
		visited_sites.push(parse_site(&r[0], &r[1])?);
	}
	let radius = sites
		.iter()
		.map(|s| s.0)
		.chain(visited_sites.iter().copied())
		.map(|(x, y)| x.unsigned_abs().max(y.unsigned_abs()) as usize)
		.max()
		.unwrap_or(0);
	let mut heights = Grid::new(radius, 0.0);
	for ((x, y), h) in sites {
		heights.set(x, y, h);
	}
	let mut visited = Grid::new(radius, false);
	for (x, y) in visited_sites {
		visited.set(x, y, true);
	}
	let img = render_ppm(&heights, Some(&visited), a.threshold, &Palette::default())?;
	let mut m = RunManifest::new("render", serde_json::to_value(a)?, &a.out)?;
	m.write(&a.name, &img)?;
	println!("{}×{} pixels", heights.width(), heights.width());
	m.finish()?;
	Ok(true)
}
