use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Critical-point data for direction `a` (slope of the ray) and leakiness `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleData {
	pub a: f64,
	pub d: f64,
	pub w_plus: f64,
	pub w_minus: f64,
	pub u_plus: f64,
	/// `S(w₊) = −log(z₊(w₊)·w₊^a)`.
	pub s_cr: f64,
	/// `S″(w₊)`.
	pub s_pp: f64,
	/// `G(w₊) = 1/(w₊·√(v²−4))`.
	pub g_cr: f64,
	/// `z₊(w₊)`.
	pub z_cr: f64,
}

/// `w₊ + 1/w₊` written without the `(1−a²)` denominator.
fn p_plus(a: f64, d: f64, u: f64) -> f64 {
	let a2 = a * a;
	2.0 * (4.0 * a2 * d * d + 1.0 - a2) / (u + 2.0 * a2 * d)
}

/// Positive critical point `w₊(a)`; `1` at `a = 0`, `d + √(d²−1)` at `a = 1`.
pub fn w_plus(a: f64, d: f64) -> f64 {
	let a2 = a * a;
	let u = (4.0 * a2 * d * d + (1.0 - a2) * (1.0 - a2)).sqrt();
	let p = p_plus(a, d, u);
	let vm2 = 4.0 * d - 2.0 - p;
	let s = a * (vm2 * (vm2 + 4.0)).max(0.0).sqrt();
	0.5 * (s + (s * s + 4.0).sqrt())
}

pub fn saddle(a: f64, d: f64) -> Result<SaddleData> {
	if !(0.0..=1.0).contains(&a) {
		return Err(Error::InvalidArgument(format!("a = {a} outside [0, 1]")));
	}
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	let a2 = a * a;
	let u = (4.0 * a2 * d * d + (1.0 - a2) * (1.0 - a2)).sqrt();
	let p = p_plus(a, d, u);
	// v − 2 and v + 2 at the critical point
	let vm2 = 4.0 * d - 2.0 - p;
	let disc = vm2 * (vm2 + 4.0);
	let root = disc.sqrt();
	let s = a * root;
	let w = 0.5 * (s + (s * s + 4.0).sqrt());
	let v = vm2 + 2.0;
	let z = 0.5 * (v + root);

	let w_minus = if a2 < 1.0 {
		let pm = -2.0 * (u + 2.0 * a2 * d) / (1.0 - a2);
		let vm = 4.0 * d - pm;
		let sm = a * ((vm - 2.0) * (vm + 2.0)).sqrt();
		-2.0 / (sm + (sm * sm + 4.0).sqrt())
	} else {
		// w₋ → 0⁻ as a → 1
		-0.0
	};

	let s_cr = -z.ln() - a * w.ln();
	let g_cr = 1.0 / (w * root);
	let vp = -1.0 + 1.0 / (w * w);
	let zpp = (-2.0 / root) * (z / (w * w * w) + vp * vp / disc);
	let s_pp = -zpp / z + a * (1.0 + a) / (w * w);
	Ok(SaddleData { a, d, w_plus: w, w_minus, u_plus: u, s_cr, s_pp, g_cr, z_cr: z })
}

impl SaddleData {
	/// Residual of the critical-point equation `a = (w − 1/w)/√(v² − 4)`.
	pub fn residual(&self) -> f64 {
		let w = self.w_plus;
		let v = 4.0 * self.d - w - 1.0 / w;
		(w - 1.0 / w) / (v * v - 4.0).sqrt() - self.a
	}
}

/// Leading-order saddle approximation of `log P_d(r, a·r)`.
pub fn pd_asymptotic(r: f64, a: f64, d: f64) -> Result<f64> {
	if !(r > 0.0) {
		return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
	}
	let s = saddle(a, d)?;
	Ok((4.0 * (d - 1.0)).ln() + s.g_cr.ln() + r * s.s_cr - 0.5 * (2.0 * PI * s.s_pp * r).ln())
}

#[cfg(test)]
mod tests {
	use super::*;
	use crate::krw::closed::z_plus;
	use num_complex::Complex64;

	/// The critical points as displayed with the `(1 − a²)` denominator.
	fn w_textbook(a: f64, d: f64, sign: f64) -> f64 {
		let a2 = a * a;
		let u = sign * (4.0 * a2 * d * d + (1.0 - a2).powi(2)).sqrt();
		(-2.0 * a2 * d + u + 2.0 * a * (d * d * (1.0 + a2) - d * u).sqrt()) / (1.0 - a2)
	}

	fn s_of(w: f64, a: f64, d: f64) -> f64 {
		-z_plus(Complex64::new(w, 0.0), d).re.ln() - a * w.ln()
	}

	#[test]
	fn examples() {
		let s = saddle(0.0, 2.0).unwrap();
		assert_eq!(s.w_plus, 1.0);
		assert!((s.z_cr - (3.0 + 8f64.sqrt())).abs() < 1e-12);
		assert!((s.s_cr + (3.0 + 8f64.sqrt()).ln()).abs() < 1e-12);
		assert!((s.s_cr + 1.762747174).abs() < 1e-9);
		let s = saddle(1.0, 2.0).unwrap();
		assert!((s.w_plus - (2.0 + 3f64.sqrt())).abs() < 1e-12);
		assert!(saddle(1.5, 2.0).is_err());
		assert!(saddle(0.5, 1.0).is_err());
	}

	#[test]
	fn agrees_with_displayed_formula() {
		for &d in &[1.01, 1.3, 2.0, 7.0, 100.0] {
			for k in 1..40 {
				let a = k as f64 / 40.0 * 0.99;
				let s = saddle(a, d).unwrap();
				let wp = w_textbook(a, d, 1.0);
				let wm = w_textbook(a, d, -1.0);
				assert!((s.w_plus - wp).abs() < 1e-9 * wp, "a={a} d={d} {} vs {wp}", s.w_plus);
				assert!((s.w_minus - wm).abs() < 1e-8, "a={a} d={d} {} vs {wm}", s.w_minus);
			}
		}
	}

	#[test]
	fn grid_invariants() {
		for i in 0..20 {
			let d = 1.0 + 10f64.powf(-3.0 + 5.0 * i as f64 / 19.0);
			let bound = d + (d * d - 1.0).sqrt();
			let mut prev = 0.0;
			for k in 0..20 {
				let a = k as f64 / 19.0;
				let s = saddle(a, d).unwrap();
				assert!(s.residual().abs() < 1e-10, "a={a} d={d} residual {}", s.residual());
				assert!(s.s_pp > 0.0);
				assert!((-1.0 < s.w_minus || (k == 0 && s.w_minus == -1.0)) && s.w_minus <= 0.0, "a={a} d={d} w_minus {}", s.w_minus);
				assert!(1.0 <= s.w_plus && s.w_plus <= bound * (1.0 + 1e-15));
				assert!(s.s_cr <= -bound.ln() + 1e-12 && s.s_cr < 0.0);
				assert!(s.g_cr > 0.0 && s.z_cr > 1.0);
				if k > 0 {
					assert!(s.w_plus > prev);
				}
				prev = s.w_plus;
				let v = 4.0 * d - s.w_plus - 1.0 / s.w_plus;
				assert!(2.0 * d * (1.0 - 1e-14) <= v && v <= 4.0 * d - 2.0 + 1e-12);
				let q = v * v - 4.0;
				if a > 0.0 && a < 1.0 {
					assert!(4.0 * (d * d - 1.0) < q && q < 16.0 * d * (d - 1.0));
				}
			}
		}
	}

	#[test]
	fn second_derivative_matches_finite_differences() {
		for &(a, d) in &[(0.0, 2.0), (0.3, 1.2), (0.7, 5.0), (1.0, 2.0)] {
			let s = saddle(a, d).unwrap();
			let w = s.w_plus;
			let h = 1e-4 * w;
			let fd = (s_of(w + h, a, d) - 2.0 * s_of(w, a, d) + s_of(w - h, a, d)) / (h * h);
			assert!((fd - s.s_pp).abs() < 1e-5 * s.s_pp.max(1.0), "a={a} d={d} fd={fd} s_pp={}", s.s_pp);
			// S′ vanishes
			let d1 = (s_of(w + h, a, d) - s_of(w - h, a, d)) / (2.0 * h);
			assert!(d1.abs() < 1e-7);
			assert!((s_of(w, a, d) - s.s_cr).abs() < 1e-13);
		}
	}

	#[test]
	fn asymptotic_rejects_nonpositive_r() {
		assert!(pd_asymptotic(0.0, 0.5, 2.0).is_err());
		assert!(pd_asymptotic(10.0, 0.5, 2.0).unwrap() < 0.0);
	}
}
