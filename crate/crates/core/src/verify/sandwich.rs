use serde::Serialize;

use crate::engine::{point_source, stabilize, start_radius, StabilizationResult};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::krw::{death_prob_dp, log_add_exp, steps_for_tail};
use crate::rule::ToppleRule;

use super::{Check, Table, Tolerances, VerificationReport};

/// Site tallies of the sandwich comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SandwichCounts {
	/// Certified `P < c(d−1)/n` yet visited.
	pub visited_below: usize,
	/// Certified `P ≥ cd/n` yet not visited.
	pub unvisited_above: usize,
	/// The tail bound straddles one of the two thresholds.
	pub inconclusive: usize,
	/// Certified strictly between the thresholds; nothing is asserted there.
	pub gap: usize,
	/// Sites with a 4-neighbour of the other visited status.
	pub boundary_adjacent: usize,
	pub visited: usize,
}

impl SandwichCounts {
	pub fn violations(&self) -> usize {
		self.visited_below + self.unvisited_above
	}
}

fn boundary_adjacent(visited: &Grid<bool>) -> usize {
	visited
		.iter()
		.filter(|((x, y), &v)| {
			[(1, 0), (-1, 0), (0, 1), (0, -1)]
				.iter()
				.any(|(dx, dy)| visited.get(x + dx, y + dy).copied().unwrap_or(false) != v)
		})
		.count()
}

/// Compares the visited set of `n` chips at the origin with the two
/// death-probability thresholds, site by site.
///
/// The dynamic program misses at most `(1/d)^K` mass, so each site's true
/// probability lies in `[P_K, P_K + tail]`. A site is only asserted when the
/// whole interval is on one side of a threshold. Off the DP grid the
/// probability is at most `(1/d)^{|x|₁}`.
pub fn check_sandwich(n: f64, rule: &ToppleRule<f64>, tol: &Tolerances) -> Result<VerificationReport> {
	rule.validate()?;
	if !(n > 0.0 && n.is_finite()) {
		return Err(Error::InvalidArgument(format!("n = {n} must be positive")));
	}
	let d = rule.d;
	let c = rule.c();
	let [u, r, dn, l] = rule.weights();
	let mut report =
		VerificationReport::new(format!("sandwich n={n:e} d={d} weights=({u},{r},{dn},{l})"), &["krw::dp", "engine"]);
	if d == 1.0 {
		report.note("d = 1 has no killing; nothing to compare");
		return Ok(report);
	}

	let sim = stabilize(point_source(n, start_radius(n, d))?, rule)?;
	let lo_thr = (c * (d - 1.0) / n).ln();
	let hi_thr = (c * d / n).ln();
	// fine enough that only sites within 1e−6 of a threshold stay open
	let tail_eps = (c * (d - 1.0) / n) * 1e-6;
	let k = steps_for_tail(d, tail_eps)?;
	let radius = k.max(sim.radius() + 2);
	let field = death_prob_dp(rule, radius, tail_eps)?;
	let log_tail = field.tail_bound.ln();

	let counts = classify(&sim, |x, y| {
		if field.log_p.contains(x, y) {
			let lp = field.log_prob(x, y);
			(lp, log_add_exp(lp, log_tail))
		} else {
			(f64::NEG_INFINITY, (x.abs() + y.abs()) as f64 * (1.0 / d).ln())
		}
	}, lo_thr, hi_thr);

	report.push(Check::at_most("violations", counts.violations() as f64, 0.0).with_note(format!(
		"{} visited below c(d-1)/n, {} unvisited above cd/n",
		counts.visited_below, counts.unvisited_above
	)));
	let frac = counts.inconclusive as f64 / counts.boundary_adjacent.max(1) as f64;
	report.push(Check::below("inconclusive fraction of boundary-adjacent sites", frac, tol.inconclusive_fraction));
	report.note(format!(
		"visited {}, boundary-adjacent {}, gap {}, inconclusive {}, DP steps {}, tail {:e}",
		counts.visited, counts.boundary_adjacent, counts.gap, counts.inconclusive, field.steps_used, field.tail_bound
	));
	let mut t = Table::new("sandwich_counts", &["visited", "boundary_adjacent", "gap", "inconclusive", "violations"]);
	t.rows.push(vec![
		counts.visited as f64,
		counts.boundary_adjacent as f64,
		counts.gap as f64,
		counts.inconclusive as f64,
		counts.violations() as f64,
	]);
	report.tables.push(t);
	Ok(report)
}

/// `bounds(x, y)` returns lower and upper bounds on `log P(x, y)`.
pub(crate) fn classify(
	sim: &StabilizationResult<f64>,
	bounds: impl Fn(i64, i64) -> (f64, f64),
	lo_thr: f64,
	hi_thr: f64,
) -> SandwichCounts {
	let mut counts = SandwichCounts {
		boundary_adjacent: boundary_adjacent(&sim.visited),
		visited: sim.visited_count,
		..Default::default()
	};
	for ((x, y), &visited) in sim.visited.iter() {
		let (lo, hi) = bounds(x, y);
		if hi < lo_thr {
			if visited {
				counts.visited_below += 1;
			}
		} else if lo >= hi_thr {
			if !visited {
				counts.unvisited_above += 1;
			}
		} else if lo >= lo_thr && hi < hi_thr {
			counts.gap += 1;
		} else {
			counts.inconclusive += 1;
		}
	}
	counts
}
