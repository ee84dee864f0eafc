use serde::Serialize;

use crate::error::{Error, Result};
use crate::krw::closed::z_plus_real;

use super::saddle::saddle;

/// Real branch points `w₁ < w₂ < w₃ < w₄` where `(4d − w − 1/w)² = 4`.
pub fn branch_points(d: f64) -> Result<[f64; 4]> {
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	let p = 2.0 * (d * (d + 1.0)).sqrt();
	let m = 2.0 * (d * (d - 1.0)).sqrt();
	let w4 = 2.0 * d + 1.0 + p;
	let w3 = 2.0 * d - 1.0 + m;
	// the small roots as reciprocals to avoid cancellation
	Ok([1.0 / w4, 1.0 / w3, w3, w4])
}

/// Boundary of the bounded complement component of the amoeba, as a closed
/// polygon in `(log|z|, log|w|)`.
///
/// Positive real `w` between the inner branch points gives two positive real
/// roots `z±`; the right arc is traced upward, the left arc downward.
pub fn amoeba_gas_boundary(d: f64, n_samples: usize) -> Result<Vec<(f64, f64)>> {
	let [_, w2, w3, _] = branch_points(d)?;
	if n_samples < 3 {
		return Err(Error::InvalidArgument("need at least 3 samples".into()));
	}
	let (lo, hi) = (w2.ln(), w3.ln());
	let mid = 0.5 * (lo + hi);
	let half = 0.5 * (hi - lo);
	// cosine spacing resolves the square-root ends
	let lws: Vec<f64> = (0..n_samples)
		.map(|k| mid - half * (std::f64::consts::PI * k as f64 / (n_samples - 1) as f64).cos())
		.collect();
	let arc: Vec<(f64, f64)> = lws
		.iter()
		.map(|&lw| {
			let w = lw.exp();
			let v = (4.0 * d - w - 1.0 / w).max(2.0);
			(z_plus_real(v).ln(), lw)
		})
		.collect();
	let mut out = arc.clone();
	out.extend(arc.iter().rev().skip(1).take(n_samples - 2).map(|&(x, y)| (-x, y)));
	Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualEntry {
	pub a: f64,
	pub dual_numeric: (f64, f64),
	pub dual_exact: (f64, f64),
	pub distance: f64,
	pub s_a_numeric: f64,
	pub s_a_exact: f64,
	pub s_a_rel_error: f64,
	pub q_numeric: f64,
	pub q_exact: f64,
	/// `|P(z, w)|` at `z = exp(−X)`, `w = exp(−Y)` for the exact dual point.
	pub amoeba_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
	pub d: f64,
	pub entries: Vec<DualEntry>,
	pub sup_distance: f64,
	pub max_s_a_rel_error: f64,
	pub max_q_rel_error: f64,
	pub max_amoeba_residual: f64,
}

const FD_STEP: f64 = 1e-5;

/// Central difference with one Richardson step.
fn derivative(f: &dyn Fn(f64) -> f64, a: f64) -> f64 {
	let c = |h: f64| (f(a + h) - f(a - h)) / (2.0 * h);
	(4.0 * c(FD_STEP / 2.0) - c(FD_STEP)) / 3.0
}

/// `S(a)` continued past `[0, 1]` through the lattice symmetries:
/// even in `a`, and `S(a) = a·S(1/a)` for `a > 1`.
fn s_extended(a: f64, d: f64) -> f64 {
	let a = a.abs();
	let s = |a: f64| saddle(a, d).map(|s| s.s_cr).unwrap_or(f64::NAN);
	if a > 1.0 {
		a * s(1.0 / a)
	} else {
		s(a)
	}
}

/// Numerical dual of the limit curve compared with `−(log z₊(w₊), log w₊)`.
pub fn dual_check(d: f64, a_grid: &[f64]) -> Result<DualReport> {
	let s_of = |a: f64| s_extended(a, d);
	let x_of = |a: f64| -1.0 / s_of(a);
	let y_of = |a: f64| -a / s_of(a);
	let mut entries = Vec::with_capacity(a_grid.len());
	for &a in a_grid {
		if !(0.0..=1.0).contains(&a) {
			return Err(Error::InvalidArgument(format!("a = {a} outside [0, 1]")));
		}
		let s = saddle(a, d)?;
		let (x, y) = (x_of(a), y_of(a));
		let (xp, yp) = (derivative(&x_of, a), derivative(&y_of, a));
		let q = y * xp - x * yp;
		let dual_numeric = (yp / q, -xp / q);
		let dual_exact = (-s.z_cr.ln(), -s.w_plus.ln());
		let distance = (dual_numeric.0 - dual_exact.0).hypot(dual_numeric.1 - dual_exact.1);
		let s_a_numeric = derivative(&s_of, a);
		let s_a_exact = -s.w_plus.ln();
		let (z, w) = ((-dual_exact.0).exp(), (-dual_exact.1).exp());
		let amoeba_residual = ((4.0 * d - z - 1.0 / z - w - 1.0 / w) / (4.0 * (d - 1.0))).abs();
		entries.push(DualEntry {
			a,
			dual_numeric,
			dual_exact,
			distance,
			s_a_numeric,
			s_a_exact,
			s_a_rel_error: ((s_a_numeric - s_a_exact) / s_a_exact).abs(),
			q_numeric: q,
			q_exact: -1.0 / (s.s_cr * s.s_cr),
			amoeba_residual,
		});
	}
	let fold = |f: &dyn Fn(&DualEntry) -> f64| entries.iter().map(f).fold(0.0, f64::max);
	Ok(DualReport {
		d,
		sup_distance: fold(&|e| e.distance),
		max_s_a_rel_error: fold(&|e| e.s_a_rel_error),
		max_q_rel_error: fold(&|e| ((e.q_numeric - e.q_exact) / e.q_exact).abs()),
		max_amoeba_residual: fold(&|e| e.amoeba_residual),
		entries,
	})
}
