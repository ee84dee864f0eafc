use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// A ray from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
	/// Through `(r, a·r)`.
	Slope(f64),
	/// Angle in radians from the positive x axis.
	Angle(f64),
}

impl Direction {
	/// Lattice point nearest the `r`-th step, where one step advances the
	/// dominant coordinate by one.
	fn point(self, r: i64) -> (i64, i64) {
		let (cx, cy) = match self {
			Direction::Slope(a) => (1.0, a),
			Direction::Angle(t) => {
				let (s, c) = t.sin_cos();
				let m = c.abs().max(s.abs());
				(c / m, s / m)
			}
		};
		let rf = r as f64;
		((cx * rf).round() as i64, (cy * rf).round() as i64)
	}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProfile {
	/// Largest step count with the nearest lattice point visited.
	pub lattice: i64,
	/// Euclidean norm of that lattice point.
	pub euclidean: f64,
	pub point: (i64, i64),
}

/// Per-direction outermost visited point along each ray.
pub fn radial_profile(visited: &Grid<bool>, directions: &[Direction]) -> Result<Vec<RadialProfile>> {
	if !visited.values().iter().any(|&v| v) {
		return Err(Error::Empty);
	}
	let rmax = 2 * visited.radius() as i64 + 2;
	Ok(directions
		.iter()
		.map(|&dir| {
			let mut best = RadialProfile { lattice: -1, euclidean: f64::NAN, point: (0, 0) };
			for r in 0..=rmax {
				let (x, y) = dir.point(r);
				if visited.get(x, y).copied().unwrap_or(false) {
					best = RadialProfile { lattice: r, euclidean: (x as f64).hypot(y as f64), point: (x, y) };
				}
			}
			best
		})
		.collect())
}

/// Largest Euclidean norm of a visited site in each of `sectors` equal
/// angular sectors, the first starting at angle 0. Empty sectors give 0.
pub fn sector_radii(visited: &Grid<bool>, sectors: usize) -> Result<Vec<f64>> {
	if sectors == 0 {
		return Err(Error::InvalidArgument("need at least one sector".into()));
	}
	if !visited.values().iter().any(|&v| v) {
		return Err(Error::Empty);
	}
	let tau = std::f64::consts::TAU;
	let mut best = vec![0.0f64; sectors];
	for ((x, y), &v) in visited.iter() {
		if v && (x, y) != (0, 0) {
			let (xf, yf) = (x as f64, y as f64);
			let k = (yf.atan2(xf).rem_euclid(tau) / tau * sectors as f64) as usize % sectors;
			best[k] = best[k].max(xf.hypot(yf));
		}
	}
	Ok(best)
}

/// Sector count (a multiple of 8) giving boundary arcs of about `arc`
/// lattice units at radius `r`.
pub fn sectors_for_arc(r: f64, arc: f64) -> usize {
	8 * ((std::f64::consts::TAU * r / (8.0 * arc)).floor() as usize).max(1)
}
