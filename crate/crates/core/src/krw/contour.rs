use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::shape::saddle::w_plus;

use super::closed::z_plus;
use super::{DeathProbField, FieldMethod};

/// Radius of the integration circle in the `w` plane.
///
/// The integrand is analytic on the annulus `w₂ < |w| < w₃` between the
/// branch points where `v = 4d − w − 1/w = 2`, so any radius in that range
/// gives the same value. The unit circle suffers cancellation once the
/// result is many orders below the integrand; the saddle radius does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourRadius {
	Unit,
	Saddle,
	Fixed(f64),
}

/// Quadrature result with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
	pub log_p: f64,
	/// |Im| / |Re| of the quadrature sum.
	pub imag_rel: f64,
	pub points: usize,
	pub radius: f64,
}

fn check_site(r: u64, a: f64) -> Result<i64> {
	if !(0.0..=1.0).contains(&a) {
		return Err(Error::InvalidArgument(format!("a = {a} outside [0, 1]")));
	}
	let ar = a * r as f64;
	let j = ar.round();
	if (ar - j).abs() > 1e-9 * (1.0 + ar) {
		return Err(Error::InvalidArgument(format!("a·r = {ar} is not an integer")));
	}
	Ok(j as i64)
}

fn rho_for(policy: ContourRadius, r: u64, j: i64, d: f64) -> Result<f64> {
	Ok(match policy {
		ContourRadius::Unit => 1.0,
		ContourRadius::Saddle => {
			if r == 0 {
				1.0
			} else {
				w_plus(j as f64 / r as f64, d)
			}
		}
		ContourRadius::Fixed(rho) => {
			let w3 = (2.0 * d - 1.0) + ((2.0 * d - 1.0).powi(2) - 1.0).sqrt();
			if !(rho > 1.0 / w3 && rho < w3) {
				return Err(Error::InvalidArgument(format!("contour radius {rho} outside ({}, {w3})", 1.0 / w3)));
			}
			rho
		}
	})
}

/// Trapezoid sum with `n` points for the coefficient at `(r, j)`.
fn trapezoid(r: u64, j: i64, d: f64, rho: f64, n: usize) -> (f64, f64) {
	let lc = (4.0 * (d - 1.0)).ln();
	let rf = r as f64;
	let jf = j as f64;
	let log_term = |theta: f64| -> Complex64 {
		let w = Complex64::from_polar(rho, theta);
		let zp = z_plus(w, d);
		let lw = Complex64::new(rho.ln(), theta);
		lc - rf * zp.ln() - (zp - 1.0 / zp).ln() - jf * lw
	};
	// the integrand modulus peaks at θ = 0
	let scale = log_term(0.0).re;
	let mut sum = Complex64::new(0.0, 0.0);
	for k in 0..n {
		let th = 2.0 * PI * k as f64 / n as f64;
		sum += (log_term(th) - scale).exp();
	}
	sum /= n as f64;
	(scale + sum.re.ln(), sum.im.abs() / sum.re.abs())
}

/// Log death probability at `(r, a·r)` by quadrature with exactly
/// `quad_points` points and a saddle-radius circle.
///
/// The result is compared against `2·quad_points`; a relative change above
/// `1e−10` is reported as non-convergence.
pub fn death_prob_contour(r: u64, a: f64, d: f64, quad_points: usize) -> Result<f64> {
	death_prob_contour_detail(r, a, d, quad_points, ContourRadius::Saddle).map(|v| v.log_p)
}

pub fn death_prob_contour_detail(
	r: u64,
	a: f64,
	d: f64,
	quad_points: usize,
	radius: ContourRadius,
) -> Result<ContourValue> {
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	if quad_points < 4 {
		return Err(Error::InvalidArgument("need at least 4 quadrature points".into()));
	}
	let j = check_site(r, a)?;
	let rho = rho_for(radius, r, j, d)?;
	let (l1, _) = trapezoid(r, j, d, rho, quad_points);
	let (l2, im2) = trapezoid(r, j, d, rho, 2 * quad_points);
	let change = (l2 - l1).exp_m1().abs();
	if !(change <= 1e-10) {
		return Err(Error::QuadratureNotConverged { points: 2 * quad_points, change });
	}
	Ok(ContourValue { log_p: l2, imag_rel: im2, points: 2 * quad_points, radius: rho })
}

/// Quadrature with the point count doubled from 32 until stable.
pub fn death_prob_contour_auto(r: u64, a: f64, d: f64, radius: ContourRadius) -> Result<ContourValue> {
	let mut n = 32;
	loop {
		match death_prob_contour_detail(r, a, d, n, radius) {
			Err(Error::QuadratureNotConverged { points, change }) => {
				if points >= 1 << 22 {
					return Err(Error::QuadratureNotConverged { points, change });
				}
				n *= 2;
			}
			other => return other,
		}
	}
}

/// Log death probabilities on the whole square of the given radius for the
/// uniform walk, one FFT per column and contour radius.
///
/// For column `i` the coefficients of `z₊(w)^{−i}/(z₊ − 1/z₊)` in `w` are
/// read off with one FFT on the circle `|w| = ρ`. Each site `(i, j)` takes
/// its value from the circle whose radius is the saddle point for the
/// nearest tabulated direction, which keeps the integrand within a small
/// factor of the result and the relative error near machine precision.
pub fn contour_field(d: f64, radius: usize) -> Result<DeathProbField> {
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	let big_r = radius;
	let bands = (big_r + 1).min(64);
	// decay of |coefficient·ρ^J| for J beyond the column, fixes the alias margin
	let decay = (2.0 * d - 1.0).acosh() - d.acosh();
	let margin = (45.0 / decay).ceil() as usize;
	let n = (2 * big_r + 2 + margin).next_power_of_two().max(64);
	let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
	let lc = (4.0 * (d - 1.0)).ln();

	let mut oct = vec![f64::NEG_INFINITY; (big_r + 1) * (big_r + 2) / 2];
	let oct_idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
	let mut buf = vec![Complex64::new(0.0, 0.0); n];
	let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

	for b in 0..bands {
		let a_b = if bands == 1 { 0.0 } else { b as f64 / (bands - 1) as f64 };
		let rho = if b == 0 { 1.0 } else { w_plus(a_b, d) };
		let v0 = 4.0 * d - rho - 1.0 / rho;
		let zr = 0.5 * (v0 + (v0 * v0 - 4.0).sqrt());
		let (lzr, lrho) = (zr.ln(), rho.ln());
		let mut cur = Vec::with_capacity(n);
		let mut q = Vec::with_capacity(n);
		for k in 0..n {
			let w = Complex64::from_polar(rho, 2.0 * PI * k as f64 / n as f64);
			let zp = z_plus(w, d);
			cur.push(1.0 / (zp - 1.0 / zp));
			q.push(zr / zp);
		}
		for i in 0..=big_r {
			if i > 0 {
				for (c, qk) in cur.iter_mut().zip(&q) {
					*c *= qk;
				}
			}
			// sites of column i served by this band
			let scale = (bands - 1) as f64;
			let (lo, hi) = if bands == 1 || i == 0 {
				if b == 0 {
					(0, i)
				} else {
					(1, 0)
				}
			} else {
				let lo = (((b as f64 - 0.5) * i as f64 / scale).ceil().max(0.0)) as usize;
				let hi = (((b as f64 + 0.5) * i as f64 / scale).ceil() as usize).saturating_sub(1).min(i);
				let hi = if b + 1 == bands { i } else { hi };
				(lo, hi)
			};
			if lo > hi {
				continue;
			}
			buf.copy_from_slice(&cur);
			fft.process_with_scratch(&mut buf, &mut scratch);
			for j in lo..=hi {
				let c = buf[j].re / n as f64;
				oct[oct_idx(i, j)] = if c > 0.0 {
					lc + c.ln() - i as f64 * lzr - j as f64 * lrho
				} else {
					f64::NEG_INFINITY
				};
			}
		}
	}

	let r = big_r as i64;
	let log_p = Grid::from_fn(big_r, |x, y| {
		let (ax, ay) = (x.unsigned_abs() as usize, y.unsigned_abs() as usize);
		let (i, j) = if ax >= ay { (ax, ay) } else { (ay, ax) };
		debug_assert!(i as i64 <= r);
		oct[oct_idx(i, j)]
	});
	Ok(DeathProbField { log_p, steps_used: 0, tail_bound: 0.0, d, weights: [1.0; 4], method: FieldMethod::Contour })
}

#[cfg(test)]
mod tests {
	use super::*;
	use crate::krw::death_prob_dp;
	use crate::rule::ToppleRule;

	#[test]
	fn origin_and_mid_site_match_dp() {
		let dp = death_prob_dp(&ToppleRule::uniform(2.0).unwrap(), 130, 1e-38).unwrap();
		let v = death_prob_contour(0, 0.0, 2.0, 64).unwrap();
		assert!((v - dp.log_prob(0, 0)).exp_m1().abs() < 1e-10);
		let v = death_prob_contour_auto(20, 0.5, 2.0, ContourRadius::Saddle).unwrap();
		assert!((v.log_p - dp.log_prob(20, 10)).exp_m1().abs() < 1e-8);
		assert!(v.imag_rel < 1e-12);
	}

	#[test]
	fn radius_choice_does_not_change_moderate_values() {
		let a = death_prob_contour_auto(6, 0.5, 1.5, ContourRadius::Unit).unwrap();
		let b = death_prob_contour_auto(6, 0.5, 1.5, ContourRadius::Saddle).unwrap();
		let c = death_prob_contour_auto(6, 0.5, 1.5, ContourRadius::Fixed(1.3)).unwrap();
		assert!((a.log_p - b.log_p).abs() < 1e-10);
		assert!((c.log_p - b.log_p).abs() < 1e-10);
	}

	#[test]
	fn rejects_bad_sites() {
		assert!(death_prob_contour(5, 0.3, 2.0, 64).is_err());
		assert!(death_prob_contour(5, 1.2, 2.0, 64).is_err());
		assert!(death_prob_contour_auto(5, 0.2, 1.5, ContourRadius::Fixed(5.0)).is_err());
		assert!(death_prob_contour_auto(5, 0.2, 1.5, ContourRadius::Fixed(0.2)).is_err());
		assert!(matches!(death_prob_contour(60, 0.5, 2.0, 4), Err(Error::QuadratureNotConverged { .. })));
	}

	#[test]
	fn field_matches_dp() {
		for d in [1.5, 2.0, 5.0] {
			let k = crate::krw::dp::steps_for_tail(d, 1e-90).unwrap();
			let dp = death_prob_dp(&ToppleRule::uniform(d).unwrap(), k, 1e-90).unwrap();
			let cf = contour_field(d, 40).unwrap();
			let mut worst: (f64, i64, i64) = (0.0, 0, 0);
			for y in -40..=40 {
				for x in -40..=40 {
					let e = (cf.log_prob(x, y) - dp.log_prob(x, y)).abs();
					if e > worst.0 {
						worst = (e, x, y);
					}
				}
			}
			let (e, x, y) = worst;
			assert!(e < 1e-11, "d={d} worst log error {e} at ({x}, {y})");
		}
	}
}
