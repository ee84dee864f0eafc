use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::krw::closed::z_plus;

use super::saddle::saddle;

/// Scale applied to the limit curve when comparing with finite `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveScale {
	/// `log n`
	LogN,
	/// `log n − ½ log log n`
	LogNHalfLogLogN,
}

impl CurveScale {
	pub fn factor(self, log_n: f64) -> f64 {
		match self {
			CurveScale::LogN => log_n,
			CurveScale::LogNHalfLogLogN => log_n - 0.5 * log_n.ln(),
		}
	}

	pub fn parse(s: &str) -> Result<Self> {
		match s {
			"logn" => Ok(CurveScale::LogN),
			"logn-halfloglogn" => Ok(CurveScale::LogNHalfLogLogN),
			_ => Err(Error::InvalidArgument(format!("unknown scale {s}"))),
		}
	}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandEntry {
	pub a: f64,
	/// Inner radius, measured along the x axis of the ray `(r, a·r)`.
	pub r_inner: f64,
	pub r_outer: f64,
	pub s_cr: f64,
	/// `log((1/G)·√(2πS″/|S|))`.
	pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialBand {
	pub log_n: f64,
	pub d: f64,
	pub entries: Vec<BandEntry>,
}

/// Inner and outer radii from the saddle asymptotics, correction terms dropped.
pub fn radial_band(n: f64, d: f64, a_grid: &[f64]) -> Result<RadialBand> {
	radial_band_log(n.ln(), d, a_grid)
}

/// As [`radial_band`] with `log n` given directly.
pub fn radial_band_log(log_n: f64, d: f64, a_grid: &[f64]) -> Result<RadialBand> {
	if !(log_n > 1.0) {
		return Err(Error::InvalidArgument("need n ≥ 3 so that log log n is defined".into()));
	}
	let mut entries = Vec::with_capacity(a_grid.len());
	let leak = (d / (d - 1.0)).ln();
	for &a in a_grid {
		let s = saddle(a, d)?;
		let abs_s = -s.s_cr;
		let constant = ((1.0 / s.g_cr) * (2.0 * PI * s.s_pp / abs_s).sqrt()).ln();
		let core = log_n - 0.5 * log_n.ln() - constant;
		entries.push(BandEntry {
			a,
			r_outer: core / abs_s,
			r_inner: (core - leak) / abs_s,
			s_cr: s.s_cr,
			constant,
		});
	}
	Ok(RadialBand { log_n, d, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakEntry {
	pub a: f64,
	pub r_inner: f64,
	pub r_outer: f64,
	/// Euclidean radii `r·√(1+a²)`.
	pub euclid_inner: f64,
	pub euclid_outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakBand {
	pub log_n: f64,
	pub t: f64,
	pub entries: Vec<LeakEntry>,
	/// `log(n t)/log n = 1 + log t/log n`.
	pub ratio: f64,
	/// False when `n t ≤ 1`; inner radii are then meaningless.
	pub inner_defined: bool,
}

/// Radii for leakiness `d = 1 + t` with `t → 0` to leading order.
pub fn leak_to_zero_band(n: f64, t: f64, a_grid: &[f64]) -> Result<LeakBand> {
	if !(t > 0.0 && t < 1.0) {
		return Err(Error::InvalidArgument(format!("t = {t} outside (0, 1)")));
	}
	let log_n = n.ln();
	if !(log_n > 0.0) {
		return Err(Error::InvalidArgument("need n > 1".into()));
	}
	let log_nt = log_n + t.ln();
	let inner_defined = log_nt > 0.0;
	let st = t.sqrt();
	let entries = a_grid
		.iter()
		.map(|&a| {
			let q = (1.0 + a * a).sqrt();
			let r_outer = log_n / (2.0 * q * st);
			let r_inner = if inner_defined { log_nt / (2.0 * q * st) } else { f64::NAN };
			LeakEntry { a, r_inner, r_outer, euclid_inner: r_inner * q, euclid_outer: r_outer * q }
		})
		.collect();
	Ok(LeakBand { log_n, t, entries, ratio: log_nt / log_n, inner_defined })
}

/// Exact saddle quantities at `d = 1 + t` next to their small-`t` expansions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionReport {
	pub a: f64,
	pub t: f64,
	pub w_plus: f64,
	/// `1 + 2a√t/√(1+a²)`.
	pub w_first_order: f64,
	/// First order plus `2a²t/(1+a²)`.
	pub w_second_order: f64,
	/// `|w₊ − first order| / t`.
	pub w_error_over_t: f64,
	pub s_cr: f64,
	/// `−2√((1+a²)t)`.
	pub s_expansion: f64,
	/// `|S − expansion| / √t`.
	pub s_error_over_sqrt_t: f64,
	/// `G(w₊)·4√t/√(1+a²)`.
	pub g_ratio: f64,
	pub r: f64,
	pub y: f64,
	/// `r·(S(w₊ + iβy) − S(w₊))` with `β = √(√t/r)`, real part.
	pub quad_exact: f64,
	/// `−y²(1+a²)^{3/2}/4`, the second-order term of `S` along the imaginary direction.
	pub quad_limit: f64,
}

pub fn small_t_saddle_expansions(a: f64, t: f64, r: f64, y: f64) -> Result<ExpansionReport> {
	if !(t > 0.0 && t <= 1e-2) {
		return Err(Error::InvalidArgument(format!("expansions need 0 < t ≤ 1e−2, got {t}")));
	}
	if !(r * t.sqrt() >= 10.0) {
		return Err(Error::InvalidArgument("expansions need r·√t ≥ 10".into()));
	}
	let d = 1.0 + t;
	let s = saddle(a, d)?;
	let q2 = 1.0 + a * a;
	let st = t.sqrt();
	let w1 = 1.0 + 2.0 * a * st / q2.sqrt();
	let w2 = w1 + 2.0 * a * a * t / q2;
	let s_exp = -2.0 * (q2 * t).sqrt();
	let beta = (st / r).sqrt();
	let s_at = |w: Complex64| -> Complex64 { -z_plus(w, d).ln() - a * w.ln() };
	let w0 = Complex64::new(s.w_plus, 0.0);
	let quad = r * (s_at(w0 + Complex64::new(0.0, beta * y)) - s_at(w0));
	Ok(ExpansionReport {
		a,
		t,
		w_plus: s.w_plus,
		w_first_order: w1,
		w_second_order: w2,
		w_error_over_t: (s.w_plus - w1).abs() / t,
		s_cr: s.s_cr,
		s_expansion: s_exp,
		s_error_over_sqrt_t: (s.s_cr - s_exp).abs() / st,
		g_ratio: s.g_cr * 4.0 * st / q2.sqrt(),
		r,
		y,
		quad_exact: quad.re,
		quad_limit: -y * y * q2.powf(1.5) / 4.0,
	})
}
