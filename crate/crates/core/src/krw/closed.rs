use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `log C(n, k)`; exact summation for small `n`, log-gamma above.
fn ln_binom(n: u64, k: u64) -> f64 {
	let k = k.min(n - k);
	if n <= 256 {
		(1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
	} else {
		ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
	}
}

/// Log death probability at `(i, j)` for the walk stepping only up or right.
pub fn ne_log_prob(i: i64, j: i64, d: f64) -> f64 {
	if i < 0 || j < 0 {
		return f64::NEG_INFINITY;
	}
	let n = (i + j) as u64;
	((d - 1.0) / d).ln() + ln_binom(n, i as u64) - n as f64 * (2.0 * d).ln()
}

/// `((d−1)/d) · C(i+j, i) · (2d)^−(i+j)`, zero off the first quadrant.
pub fn death_prob_ne(i: i64, j: i64, d: f64) -> f64 {
	ne_log_prob(i, j, d).exp()
}

/// Roots `(z₋, z₊)` of `z + 1/z = 4d − w − 1/w`, ordered `|z₋| ≤ 1 ≤ |z₊|`.
pub fn z_roots(w: Complex64, d: f64) -> Result<(Complex64, Complex64)> {
	if w == Complex64::new(0.0, 0.0) {
		return Err(Error::InvalidArgument("w must be nonzero".into()));
	}
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	let zp = z_plus(w, d);
	Ok((1.0 / zp, zp))
}

/// The larger root; the smaller one is its reciprocal.
#[inline]
pub(crate) fn z_plus(w: Complex64, d: f64) -> Complex64 {
	let v = 4.0 * d - w - 1.0 / w;
	let s = (v * v - 4.0).sqrt();
	let (a, b) = ((v + s) * 0.5, (v - s) * 0.5);
	if a.norm_sqr() >= b.norm_sqr() {
		a
	} else {
		b
	}
}

/// Real `z₊` for real `w > 0` inside the band where it is real.
#[inline]
pub(crate) fn z_plus_real(v: f64) -> f64 {
	0.5 * (v + (v * v - 4.0).sqrt())
}

/// Coefficient of `z^j` in `1/P(z, w)` for the uniform walk.
pub fn coeff_z(j: i64, w: Complex64, d: f64) -> Result<Complex64> {
	let (zm, zp) = z_roots(w, d)?;
	let v = 4.0 * d - w - 1.0 / w;
	if (v * v - 4.0).norm() <= 1e-13 * v.norm_sqr().max(1.0) {
		return Err(Error::BranchPoint(format!("{w}")));
	}
	Ok(4.0 * (d - 1.0) * zp.powi(-(j.unsigned_abs() as i32)) / (zp - zm))
}

/// Log probability of dying on the vertical line `x = j` (uniform walk).
pub fn line_log_prob(j: i64, d: f64) -> f64 {
	let s = 2.0 * d - 1.0;
	let z = s + (s * s - 1.0).sqrt();
	// z² − 1 = 2z(s) − 2 rewritten to avoid cancellation for d near 1
	let z2m1 = 2.0 * (z * s - 1.0);
	(4.0 * (d - 1.0)).ln() + (1.0 - j.unsigned_abs() as f64) * z.ln() - z2m1.ln()
}

pub fn line_death_prob(j: i64, d: f64) -> f64 {
	line_log_prob(j, d).exp()
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn ne_small_cases() {
		assert!((death_prob_ne(0, 0, 3.0) - 2.0 / 3.0).abs() < 1e-15);
		assert!((death_prob_ne(1, 1, 2.0) - 1.0 / 16.0).abs() < 1e-16);
		assert_eq!(death_prob_ne(-1, 0, 2.0), 0.0);
		// log-gamma branch agrees with the summed branch near the switch
		let a = ln_binom(256, 100);
		let b = ln_gamma(257.0) - ln_gamma(101.0) - ln_gamma(157.0);
		assert!((a - b).abs() < 1e-10);
	}

	#[test]
	fn z_roots_on_unit_circle() {
		let (zm, zp) = z_roots(1.0.into(), 2.0).unwrap();
		assert!((zp.re - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
		assert!(zp.im.abs() < 1e-15 && zm.im.abs() < 1e-15);
		for k in 0..16 {
			let th = k as f64 * 0.39;
			let (zm, zp) = z_roots(Complex64::from_polar(1.0, th), 1.3).unwrap();
			assert!(zm.im.abs() < 1e-12 && zp.im.abs() < 1e-12);
			assert!(0.0 < zm.re && zm.re < 1.0 && zp.re > 1.0);
		}
		assert!(z_roots(0.0.into(), 2.0).is_err());
	}

	#[test]
	fn vieta() {
		let ws = [Complex64::new(0.6, 0.1), Complex64::new(-1.5, 0.7), Complex64::new(0.2, -0.45), Complex64::new(1.9, 0.0)];
		for &w in &ws {
			for d in [1.01, 2.0, 1e6] {
				let (zm, zp) = z_roots(w, d).unwrap();
				let v = 4.0 * d - w - 1.0 / w;
				assert!((zm * zp - 1.0).norm() < 1e-12);
				assert!((zm + zp - v).norm() < 1e-12 * v.norm().max(1.0));
				assert!(zm.norm() <= 1.0 + 1e-12 && zp.norm() >= 1.0 - 1e-12);
			}
		}
	}

	#[test]
	fn coeff_examples() {
		let c0 = coeff_z(0, 1.0.into(), 2.0).unwrap();
		assert!((c0.re - 0.5f64.sqrt()).abs() < 1e-12);
		let zp = 3.0 + 2.0 * 2f64.sqrt();
		let c4 = coeff_z(4, 1.0.into(), 2.0).unwrap();
		let c5 = coeff_z(5, 1.0.into(), 2.0).unwrap();
		assert!((c5 - c4 / zp).norm() < 1e-15);
		assert_eq!(coeff_z(3, 1.0.into(), 2.0).unwrap(), coeff_z(-3, 1.0.into(), 2.0).unwrap());
		// z₊ = 1 at the inner branch point w₂ = 2d − 1 − 2√(d(d−1))
		let w2 = 3.0 - 2.0 * 2f64.sqrt();
		assert!(matches!(coeff_z(0, w2.into(), 2.0), Err(Error::BranchPoint(_))));
	}

	#[test]
	fn line_probabilities() {
		assert!((line_death_prob(0, 2.0) - 0.5f64.sqrt()).abs() < 1e-12);
		let zp = 3.0 + 2.0 * 2f64.sqrt();
		assert!((line_death_prob(3, 2.0) / line_death_prob(2, 2.0) - 1.0 / zp).abs() < 1e-14);
		for d in [1.001, 1.5, 2.0, 7.0] {
			let total: f64 = (-4000..=4000).map(|j| line_death_prob(j, d)).sum();
			assert!((total - 1.0).abs() < 1e-12, "d={d} total={total}");
		}
	}
}
