use crate::engine::{point_source, radial_profile, sector_radii, sectors_for_arc, stabilize, start_radius};
use crate::error::{Error, Result};
use crate::krw::{death_prob_contour_auto, ContourRadius};
use crate::rule::ToppleRule;

use super::shape::{boundary_directions, plain_cost, SLOPES_PER_OCTANT};
use super::{Check, Table, Tolerances, VerificationReport};

/// Boundary arc length per sector in the anisotropy estimate, lattice units.
pub const SECTOR_ARC: f64 = 4.0;

fn log_p_axis(r: u64, d: f64) -> Result<f64> {
	death_prob_contour_auto(r, 0.0, d, ContourRadius::Saddle).map(|v| v.log_p)
}

/// Where `log P(r, 0)` falls through `log_level` along the positive x axis,
/// interpolating `log P` linearly between neighbouring integers.
///
/// Returns 0 when the origin is already below the level.
pub fn crossing_radius(log_level: f64, d: f64) -> Result<f64> {
	let l0 = log_p_axis(0, d)?;
	if l0 < log_level {
		return Ok(0.0);
	}
	let (mut lo, mut l_lo) = (0u64, l0);
	let mut hi = 1u64;
	let mut l_hi = log_p_axis(hi, d)?;
	while l_hi >= log_level {
		lo = hi;
		l_lo = l_hi;
		hi = hi.checked_mul(2).ok_or_else(|| Error::InvalidArgument("crossing radius overflow".into()))?;
		l_hi = log_p_axis(hi, d)?;
	}
	while hi - lo > 1 {
		let mid = lo + (hi - lo) / 2;
		let lm = log_p_axis(mid, d)?;
		if lm >= log_level {
			lo = mid;
			l_lo = lm;
		} else {
			hi = mid;
			l_hi = lm;
		}
	}
	Ok(lo as f64 + (l_lo - log_level) / (l_lo - l_hi))
}

/// Leakiness `d = 1 + t` shrinking with `n`.
///
/// For each `t` the exact inner and outer radii on the axis, where
/// `P = cd/n` and `P = c(d−1)/n`, are compared with the leading-order ratio
/// `1 + log t/log n`. When the simulation is affordable the visited set is
/// profiled in 512 directions and scaled by `√t/log n`. Its anisotropy is
/// the largest over the smallest outermost radius across angular sectors
/// whose boundary arcs are about [`SECTOR_ARC`] lattice units long; single
/// rays resolve the boundary only to about one site. For `t ≤ 1/log n` the
/// anisotropy must be within `tol.anisotropy` of 1.
pub fn check_leak_to_zero(n: f64, t_sweep: &[f64], tol: &Tolerances) -> Result<VerificationReport> {
	if !(n > 1.0 && n.is_finite()) {
		return Err(Error::InvalidArgument(format!("n = {n} must exceed 1")));
	}
	if t_sweep.is_empty() {
		return Err(Error::InvalidArgument("empty t sweep".into()));
	}
	let log_n = n.ln();
	let mut report = VerificationReport::new(format!("leak n={n:e}"), &["krw::contour", "engine"]);
	let mut table = Table::new(
		"leak_to_zero",
		&[
			"t",
			"predicted_ratio",
			"exact_ratio",
			"r_inner",
			"r_outer",
			"scaled_outer",
			"scaled_min",
			"scaled_max",
			"anisotropy",
		],
	);
	let mut simulated: Vec<(f64, f64, f64)> = Vec::new();
	let dirs: Vec<_> = boundary_directions(SLOPES_PER_OCTANT).into_iter().map(|(_, d)| d).collect();
	for &t in t_sweep {
		if !(t > 0.0 && t < 1.0) {
			return Err(Error::InvalidArgument(format!("t = {t} outside (0, 1)")));
		}
		if n * t <= 1.0 {
			report.note(format!("t={t:e} skipped: n·t ≤ 1"));
			continue;
		}
		let d = 1.0 + t;
		let c = 4.0;
		let predicted = 1.0 + t.ln() / log_n;
		let r_o = crossing_radius((c * t / n).ln(), d)?;
		let r_i = crossing_radius((c * d / n).ln(), d)?;
		let exact = r_i / r_o;
		let to_scaled = t.sqrt() / log_n;
		report.push(
			Check::below(format!("|r_i/r_o - (1 + log t/log n)| at t={t:.4e}"), (exact - predicted).abs(), tol.ratio)
				.with_note(format!("exact {exact:.4}, predicted {predicted:.4}")),
		);

		let (mut smin, mut smax, mut aniso) = (f64::NAN, f64::NAN, f64::NAN);
		if plain_cost(n, d) <= tol.max_fires {
			let sim = stabilize(point_source(n, start_radius(n, d))?, &ToppleRule::uniform(d)?)?;
			let prof = radial_profile(&sim.visited, &dirs)?;
			let (lo, hi) = prof
				.iter()
				.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.euclidean), hi.max(p.euclidean)));
			smin = lo * to_scaled;
			smax = hi * to_scaled;
			let area_radius = (sim.visited_count as f64 / std::f64::consts::PI).sqrt();
			let sectors = sector_radii(&sim.visited, sectors_for_arc(area_radius, SECTOR_ARC))?;
			let (slo, shi) = sectors.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
			aniso = shi / slo;
			simulated.push((t, aniso, area_radius));
			report.note(format!(
				"t={t:e}: {} sectors give anisotropy {aniso:.4}; single rays give {:.4}",
				sectors.len(),
				hi / lo
			));
			if t <= 1.0 / log_n * (1.0 + 1e-12) {
				report.push(Check::below(format!("anisotropy - 1 at t={t:.4e}"), aniso - 1.0, tol.anisotropy));
			}
		} else {
			report.note(format!("t={t:e}: simulation skipped, about {:e} fires", plain_cost(n, d)));
		}
		table.rows.push(vec![t, predicted, exact, r_i, r_o, r_o * to_scaled, smin, smax, aniso]);
	}
	if simulated.len() > 1 {
		// the anisotropy is only resolved to about one site over the radius
		simulated.sort_by(|a, b| a.0.total_cmp(&b.0));
		let trend: Vec<String> = simulated.iter().map(|(t, an, r)| format!("{an:.4} ± {:.4} at t={t:.3e}", 1.0 / r)).collect();
		report.note(format!("anisotropy by increasing t: {}", trend.join(", ")));
	}
	report.tables.push(table);
	Ok(report)
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn crossing_matches_axis_values() {
		let d = 2.0;
		let level = log_p_axis(3, d).unwrap();
		let r = crossing_radius(level, d).unwrap();
		assert!((r - 3.0).abs() < 1e-9, "{r}");
		assert_eq!(crossing_radius(1.0, d).unwrap(), 0.0);
		let mid = 0.5 * (log_p_axis(5, d).unwrap() + log_p_axis(6, d).unwrap());
		assert!((crossing_radius(mid, d).unwrap() - 5.5).abs() < 1e-12);
	}

	#[test]
	fn small_nt_is_skipped() {
		let rep = check_leak_to_zero(1e3, &[1e-4], &Tolerances::default()).unwrap();
		assert!(rep.checks.is_empty() && rep.notes.len() == 1);
	}
}
