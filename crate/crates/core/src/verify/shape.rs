use crate::engine::{point_source, radial_profile, stabilize, start_radius, Direction};
use crate::error::{Error, Result};
use crate::rule::ToppleRule;
use crate::shape::{a_grid, radial_band, saddle, CurveScale};

use super::{slope, Check, Table, Tolerances, VerificationReport};

/// Slopes sampled per octant.
pub const SLOPES_PER_OCTANT: usize = 64;

/// The rays through the eight images of `(1, a)` for `a` on a uniform grid
/// of `[0, 1]`, paired with their slope `a`.
pub fn boundary_directions(per_octant: usize) -> Vec<(f64, Direction)> {
	let maps: [fn(f64, f64) -> (f64, f64); 8] = [
		|x, y| (x, y),
		|x, y| (y, x),
		|x, y| (-y, x),
		|x, y| (-x, y),
		|x, y| (-x, -y),
		|x, y| (-y, -x),
		|x, y| (y, -x),
		|x, y| (x, -y),
	];
	let mut out = Vec::with_capacity(8 * per_octant);
	for m in maps {
		for a in a_grid(per_octant) {
			let (x, y) = m(1.0, a);
			out.push((a, Direction::Angle(y.atan2(x))));
		}
	}
	out
}

/// Fires needed by plain relaxation, `n/(c(d−1))`, when acceleration does
/// not apply.
pub(crate) fn plain_cost(n: f64, d: f64) -> f64 {
	if n / (4.0 * d) >= 1e15 {
		0.0
	} else {
		n / (4.0 * (d - 1.0))
	}
}

/// Distance between the simulated boundary and the limit curve scaled by
/// `log n − ½ log log n`, maximized over directions, for each `n`.
///
/// The deviation must stay below a fixed number of lattice units and must
/// not trend upward in `log n`. Each direction is also checked against the
/// asymptotic inner and outer radii, widened by `band_slack`.
pub fn check_shape_convergence(n_sweep: &[f64], d: f64, tol: &Tolerances) -> Result<VerificationReport> {
	if n_sweep.is_empty() {
		return Err(Error::InvalidArgument("empty n sweep".into()));
	}
	if n_sweep.iter().any(|n| !(*n >= 16.0 && n.is_finite())) {
		return Err(Error::InvalidArgument("sweep values must be finite and at least 16".into()));
	}
	let rule = ToppleRule::uniform(d)?;
	let mut report = VerificationReport::new(format!("shape d={d}"), &["shape::saddle", "shape::band", "engine"]);
	let dirs = boundary_directions(SLOPES_PER_OCTANT);
	let slopes = a_grid(SLOPES_PER_OCTANT);
	let curve: Vec<f64> = slopes
		.iter()
		.map(|&a| saddle(a, d).map(|s| (1.0 + a * a).sqrt() / -s.s_cr))
		.collect::<Result<_>>()?;

	let mut table = Table::new(
		"shape_deviation",
		&["n", "log_n", "scale", "max_deviation", "mean_signed_deviation", "outside_band", "visited"],
	);
	let (mut xs, mut devs) = (Vec::new(), Vec::new());
	let mut outside_total = 0usize;
	for &n in n_sweep {
		if plain_cost(n, d) > tol.max_fires {
			report.note(format!("n={n:e} skipped: about {:e} fires", plain_cost(n, d)));
			continue;
		}
		let sim = stabilize(point_source(n, start_radius(n, d))?, &rule)?;
		let prof = radial_profile(&sim.visited, &dirs.iter().map(|(_, dir)| *dir).collect::<Vec<_>>())?;
		let log_n = n.ln();
		let scale = CurveScale::LogNHalfLogLogN.factor(log_n);
		let band = radial_band(n, d, &slopes)?;
		let (mut worst, mut signed, mut outside) = (0.0f64, 0.0, 0usize);
		for (k, p) in prof.iter().enumerate() {
			let idx = k % SLOPES_PER_OCTANT;
			let q = (1.0 + slopes[idx] * slopes[idx]).sqrt();
			let dev = p.euclidean - scale * curve[idx];
			worst = worst.max(dev.abs());
			signed += dev;
			let e = &band.entries[idx];
			if p.euclidean < e.r_inner * q - tol.band_slack || p.euclidean > e.r_outer * q + tol.band_slack {
				outside += 1;
			}
		}
		let mean = signed / prof.len() as f64;
		table.rows.push(vec![n, log_n, scale, worst, mean, outside as f64, sim.visited_count as f64]);
		xs.push(log_n);
		devs.push(worst);
		outside_total += outside;
	}
	if devs.is_empty() {
		report.push(Check::at_most("runs completed", 0.0, -1.0).with_note("every n was skipped"));
		report.tables.push(table);
		return Ok(report);
	}

	let max_dev = devs.iter().copied().fold(0.0, f64::max);
	report.push(Check::at_most("max directional deviation (lattice units)", max_dev, tol.shape_deviation));
	let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min);
	let rise = slope(&xs, &devs) * span;
	report.push(
		Check::below("deviation trend across the sweep (lattice units)", rise, tol.shape_trend)
			.with_note("least-squares slope in log n times the log n span"),
	);
	report.push(Check::at_most("directions outside the widened band", outside_total as f64, 0.0));
	report.tables.push(table);
	Ok(report)
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn directions_cover_all_octants() {
		let dirs = boundary_directions(5);
		assert_eq!(dirs.len(), 40);
		let mut angles: Vec<f64> = dirs
			.iter()
			.map(|(_, d)| match d {
				Direction::Angle(t) => t.rem_euclid(std::f64::consts::TAU),
				Direction::Slope(_) => unreachable!(),
			})
			.collect();
		angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
		angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
		// 8 octants × 5 slopes with shared end rays counted once
		assert_eq!(angles.len(), 32);
	}

	#[test]
	fn small_sweep_runs() {
		let rep = check_shape_convergence(&[1e6, 1e8], 2.0, &Tolerances::default()).unwrap();
		assert_eq!(rep.tables[0].rows.len(), 2);
		assert!(check_shape_convergence(&[], 2.0, &Tolerances::default()).is_err());
	}
}
